#pragma once

#include <stdexcept>
#include <string>

namespace lrsdp {

struct InvalidDimension : std::runtime_error {
  explicit InvalidDimension(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalFailure : std::runtime_error {
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

struct NotInteriorPoint : std::runtime_error {
  explicit NotInteriorPoint(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateSpectrum : std::runtime_error {
  explicit DegenerateSpectrum(const std::string& what) : std::runtime_error(what) {}
};

struct PreconditionerFailure : std::runtime_error {
  explicit PreconditionerFailure(const std::string& what) : std::runtime_error(what) {}
};

struct Breakdown : std::runtime_error {
  explicit Breakdown(const std::string& what) : std::runtime_error(what) {}
};

struct GenerationFailure : std::runtime_error {
  explicit GenerationFailure(const std::string& what) : std::runtime_error(what) {}
};

// Parse failures carry the 1-based line number of the offending line.
struct ParseError : std::runtime_error {
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
  int line;
};

}  // namespace lrsdp
