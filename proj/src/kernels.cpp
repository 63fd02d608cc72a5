#include "ghinv/kernels.hpp"
#include <exception>

#include <atomic>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ghinv::par {

namespace {
bool g_enabled = true;
}

bool enabled() {
#ifdef _OPENMP
  return g_enabled;
#else
  return false;
#endif
}

void set_enabled(bool on) { g_enabled = on; }

int thread_count() {
#ifdef _OPENMP
  return enabled() ? omp_get_max_threads() : 1;
#else
  return 1;
#endif
}

void parallel_for(int n, const std::function<void(int)>& body) {
  if (!enabled() || n < 4) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
#ifdef _OPENMP
  std::exception_ptr err;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
#else
  for (int i = 0; i < n; ++i) body(i);
#endif
}

double max_over(int n, const std::function<double(int)>& fn) {
  if (!enabled() || n < 4) {
    double m = 0;
    for (int i = 0; i < n; ++i) m = std::max(m, fn(i));
    return m;
  }
  double m = 0;
#ifdef _OPENMP
#pragma omp parallel
  {
    double local = 0;
#pragma omp for schedule(static) nowait
    for (int i = 0; i < n; ++i) local = std::max(local, fn(i));
#pragma omp critical
    m = std::max(m, local);
  }
#else
  for (int i = 0; i < n; ++i) m = std::max(m, fn(i));
#endif
  return m;
}

// One output coefficient; its inner sum runs in a fixed serial order so the
// parallel table is bitwise identical to the serial one.
static Scalar dft_coeff(const RootConfig& cfg, int m, const std::vector<Rational>& base,
                        const std::vector<Scalar>& fvals, int flat_k) {
  const int l = cfg.ell;
  int k[2] = {0, 0};
  if (m == 1) {
    k[0] = flat_k;
  } else {
    k[0] = flat_k / l;
    k[1] = flat_k % l;
  }
  Scalar acc = 0;
  if (m == 1) {
    for (int i = 0; i < l; ++i) {
      Rational phase = -(Rational(k[0]) * (base[0] + Rational(i)));
      acc += cfg.xi_pow(phase) * fvals[(size_t)i];
    }
    return acc / (double)l;
  }
  for (int i0 = 0; i0 < l; ++i0)
    for (int i1 = 0; i1 < l; ++i1) {
      Rational phase = -(Rational(k[0]) * (base[0] + Rational(i0))) -
                       (Rational(k[1]) * (base[1] + Rational(i1)));
      acc += cfg.xi_pow(phase) * fvals[(size_t)i0 * l + i1];
    }
  return acc / (double)((long long)l * l);
}

std::vector<Scalar> dft_table_serial(const RootConfig& cfg, int m,
                                     const std::vector<Rational>& base,
                                     const std::vector<Scalar>& fvals) {
  if (m < 1 || m > 2) throw std::invalid_argument("dft_table: m must be 1 or 2");
  const int n = m == 1 ? cfg.ell : cfg.ell * cfg.ell;
  std::vector<Scalar> out((size_t)n);
  for (int k = 0; k < n; ++k) out[(size_t)k] = dft_coeff(cfg, m, base, fvals, k);
  return out;
}

std::vector<Scalar> dft_table_omp(const RootConfig& cfg, int m, const std::vector<Rational>& base,
                                  const std::vector<Scalar>& fvals) {
  if (m < 1 || m > 2) throw std::invalid_argument("dft_table: m must be 1 or 2");
  const int n = m == 1 ? cfg.ell : cfg.ell * cfg.ell;
  std::vector<Scalar> out((size_t)n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int k = 0; k < n; ++k) out[(size_t)k] = dft_coeff(cfg, m, base, fvals, k);
  return out;
}

std::vector<Scalar> dft_table(const RootConfig& cfg, int m, const std::vector<Rational>& base,
                              const std::vector<Scalar>& fvals) {
  return enabled() ? dft_table_omp(cfg, m, base, fvals) : dft_table_serial(cfg, m, base, fvals);
}

Scalar dft_reconstruct(const RootConfig& cfg, int m, const std::vector<Scalar>& coeffs,
                       const std::vector<Rational>& point) {
  const int l = cfg.ell;
  Scalar acc = 0;
  if (m == 1) {
    for (int k = 0; k < l; ++k) acc += coeffs[(size_t)k] * cfg.xi_pow(Rational(k) * point[0]);
    return acc;
  }
  for (int k0 = 0; k0 < l; ++k0)
    for (int k1 = 0; k1 < l; ++k1)
      acc += coeffs[(size_t)k0 * l + k1] *
             cfg.xi_pow(Rational(k0) * point[0] + Rational(k1) * point[1]);
  return acc;
}

}  // namespace ghinv::par
