#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>
#include <lrsdp/runtime.hpp>

int main(int argc, char** argv) {
  lrsdp::tune_allocator();
  return doctest::Context(argc, argv).run();
}
