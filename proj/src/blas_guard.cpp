#include "blas_guard.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "critperc/error.hpp"

// Present only in dynamic-arch OpenBLAS builds.
extern "C" {
__attribute__((weak)) void gotoblas_dynamic_init(void);
__attribute__((weak)) void gotoblas_dynamic_quit(void);
__attribute__((weak)) char* openblas_get_corename(void);
__attribute__((weak)) void openblas_set_num_threads(int);
}

namespace critperc {

namespace {

// Max deviation of a dgemm/dgemv against a plain loop on sampled columns.
// Some kernels only misbehave above a few hundred rows, hence the size.
double probe_error() {
  const int m = 520;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(m) * m), b(a.size()), c(a.size()), x(m), y(m);
  for (double& v : a) v = u(rng);
  for (double& v : b) v = u(rng);
  for (double& v : x) v = u(rng);
  cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, m, m, m, 1.0, a.data(), m, b.data(), m, 0.0,
              c.data(), m);
  cblas_dgemv(CblasColMajor, CblasNoTrans, m, m, 1.0, a.data(), m, x.data(), 1, 0.0, y.data(), 1);
  double err = 0.0;
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += a[i + static_cast<std::size_t>(k) * m] * x[k];
    err = std::max(err, std::abs(s - y[i]));
  }
  for (int j = 0; j < m; j += 53) {
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) {
        s += a[i + static_cast<std::size_t>(k) * m] * b[k + static_cast<std::size_t>(j) * m];
      }
      err = std::max(err, std::abs(s - c[i + static_cast<std::size_t>(j) * m]));
    }
  }
  return err;
}

bool probe_ok() { return probe_error() < 1e-9; }

void select_kernels() {
  if (openblas_set_num_threads) openblas_set_num_threads(1);
  if (probe_ok()) return;
  std::string detected = openblas_get_corename ? openblas_get_corename() : "unknown";
  if (gotoblas_dynamic_init && gotoblas_dynamic_quit && std::getenv("OPENBLAS_CORETYPE") == nullptr) {
    for (const char* core : {"SkylakeX", "Haswell", "Sandybridge", "Nehalem", "Prescott"}) {
      setenv("OPENBLAS_CORETYPE", core, 1);
      gotoblas_dynamic_quit();
      gotoblas_dynamic_init();
      if (openblas_set_num_threads) openblas_set_num_threads(1);
      if (probe_ok()) return;
    }
  }
  throw InvariantError("BLAS self-check failed (core type " + detected +
                       "); set OPENBLAS_CORETYPE to a working kernel");
}

}  // namespace

void ensure_blas_kernels() {
  static std::once_flag once;
  std::call_once(once, select_kernels);
}

}  // namespace critperc
