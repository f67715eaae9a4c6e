#pragma once

namespace critperc {

// Checks the BLAS kernels once per process with a product whose result is
// known, and under a dynamic-arch OpenBLAS switches to another core type when
// the autodetected one gives wrong answers. Throws InvariantError when no
// usable kernel is found. Also pins BLAS to one thread; parallelism comes
// from the experiment runner.
void ensure_blas_kernels();

}  // namespace critperc
