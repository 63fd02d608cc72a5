#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ghinv/rational.hpp"
#include "ghinv/scalars.hpp"

namespace ghinv {

/// Symbolic exponent  q(h) + l(h) + const  in the Cartan variables
/// h_0,...,h_{n-1} (one variable per diagram component for rank one):
/// q has integer coefficients, l rational ones.  quad[{a,b}] with a <= b is
/// the coefficient of h_a*h_b.
struct ExponentPoly {
  std::map<std::pair<int, int>, long long> quad;
  std::map<int, Rational> lin;
  Rational const_term;

  static ExponentPoly quadratic(int a, int b, long long coeff) {
    ExponentPoly p;
    if (a > b) std::swap(a, b);
    if (coeff) p.quad[{a, b}] = coeff;
    return p;
  }
  static ExponentPoly linear(int var, const Rational& coeff) {
    ExponentPoly p;
    if (!coeff.is_zero()) p.lin[var] = coeff;
    return p;
  }
  static ExponentPoly constant(const Rational& c) {
    ExponentPoly p;
    p.const_term = c;
    return p;
  }

  bool is_zero() const { return quad.empty() && lin.empty() && const_term.is_zero(); }
  bool quad_zero() const { return quad.empty(); }
  bool lin_zero() const { return lin.empty(); }

  ExponentPoly& operator+=(const ExponentPoly& o);
  friend ExponentPoly operator+(ExponentPoly a, const ExponentPoly& b) { return a += b; }
  ExponentPoly operator-() const;

  /// Exact evaluation at a rational point (variables not present count as 0).
  Rational eval(const std::vector<Rational>& at) const;

  /// Rename variables: var -> perm[var].
  ExponentPoly relabel(const std::vector<int>& perm) const;

  std::string str() const;
};

/// Polarization of a purely quadratic form: the linear form
/// q(at + h) - q(h) - q(at) = sum_b (sum_a 2*quad_ab*at_a) h_b.
ExponentPoly polarize(const ExponentPoly& q, const std::vector<Rational>& at);

/// Lattice base + Z^m corresponding to classes in (C/Z)^m; entries in [0,1).
struct Lattice {
  std::vector<Rational> base;
  explicit Lattice(std::vector<Rational> b) : base(std::move(b)) {
    for (auto& x : base) x = x.mod1();
  }
  int num_vars() const { return (int)base.size(); }
};

/// Dense Fourier coefficient table a_k, k in [0,ell)^m, m <= 2.
struct FourierExpansion {
  int m = 0;
  int ell = 0;
  std::vector<Scalar> coeffs;

  Scalar at(int k0) const { return coeffs[(size_t)k0]; }
  Scalar at(int k0, int k1) const { return coeffs[(size_t)k0 * ell + k1]; }
};

/// Averaging-formula DFT of f on the lattice; verifies reconstruction on all
/// ell^m representatives and throws PeriodicityViolation past tolerance.
FourierExpansion dft(const RootConfig& cfg, const Lattice& lattice,
                     const std::function<Scalar(const std::vector<Rational>&)>& f);

/// Split xi^q on the lattice as xi^{l} * (Laurent polynomial in xi^{h_i}):
/// l = polarize(q, base) - q(base), fourier = dft of xi^{q-l}.  The fourier
/// part depends only on q and the reconstruction identity holds at every
/// lattice representative.
std::pair<ExponentPoly, FourierExpansion> reduce_quadratic(const RootConfig& cfg,
                                                           const ExponentPoly& q,
                                                           const Lattice& lattice);

/// Commutation of a power element past a homogeneous algebra element of the
/// given integer weight vector: phase = exponent evaluated at the weight,
/// induced K powers = polarization at the weight (integer coefficients).
struct CommutePast {
  Rational phase;
  std::vector<long long> induced_k_power;
};
CommutePast commute_past(const ExponentPoly& q_or_l, const std::vector<long long>& weight);

}  // namespace ghinv
