#pragma once

namespace lrsdp {

// Dense kernels allocate and free O(n^2) temporaries at high rate; glibc's
// default trim/mmap thresholds turn that into per-call heap syscalls (about a
// 10x slowdown past n ~ 150). Call once at process start.
void tune_allocator();

}  // namespace lrsdp
