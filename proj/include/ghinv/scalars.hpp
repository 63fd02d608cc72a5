#pragma once

#include <complex>

#include "ghinv/errors.hpp"
#include "ghinv/rational.hpp"

namespace ghinv {

using Scalar = std::complex<double>;

/// Order of the root of unity and the global tolerance policy.
/// ell >= 3 and ell not divisible by 8 (the Gauss sum below degenerates
/// exactly for ell in 8N, which breaks the integral normalization).
struct RootConfig {
  int ell = 3;
  int ell_prime = 3;  // ell / gcd(ell,2)
  double tol = 1e-9;

  RootConfig() = default;
  explicit RootConfig(int l, double tolerance = 1e-9) : ell(l), tol(tolerance) {
    if (l < 3) throw DegenerateRoot("ell must be >= 3, got " + std::to_string(l));
    ell_prime = (l % 2 == 0) ? l / 2 : l;
  }

  /// xi^c = exp(2*pi*i*c/ell) for exact rational c.
  Scalar xi_pow(const Rational& c) const {
    Rational r = c.mod_int(ell);
    double x = 2.0 * 3.14159265358979323846264338327950288 * r.to_double() / (double)ell;
    return Scalar(std::cos(x), std::sin(x));
  }
  Scalar xi_pow(long long c) const { return xi_pow(Rational(c)); }

  /// sum_{k=0}^{ell-1} xi^{2k^2-2k}; zero exactly when ell is a multiple of 8.
  Scalar gauss_sum() const {
    Scalar s = 0;
    for (long long k = 0; k < ell; ++k) s += xi_pow(2 * k * k - 2 * k);
    if (std::abs(s) < tol)
      throw DegenerateRoot("degenerate Gauss sum at ell = " + std::to_string(ell) +
                           " (ell in 8N)");
    return s;
  }

  bool approx_eq(const Scalar& a, const Scalar& b, double scale = 1.0) const {
    return std::abs(a - b) <= tol * std::max(1.0, scale);
  }
  bool approx_zero(const Scalar& a, double scale = 1.0) const {
    return std::abs(a) <= tol * std::max(1.0, scale);
  }
};

}  // namespace ghinv
