#pragma once

#include <map>
#include <string>
#include <vector>

#include "ghinv/exponents.hpp"
#include "ghinv/linalg.hpp"
#include "ghinv/rational.hpp"
#include "ghinv/scalars.hpp"

namespace ghinv {

/// Degree in G = Q/Z, canonical representative in [0,1).
using GDegree = Rational;
inline GDegree gdeg(const Rational& r) { return r.mod1(); }
inline GDegree gdeg_add(const GDegree& a, const GDegree& b) { return (a + b).mod1(); }
inline GDegree gdeg_neg(const GDegree& a) { return (-a).mod1(); }

/// Basis monomial xi^{cH} E^i F^j K^k with c in [0,1), 0 <= i,j < ell',
/// 0 <= k < ell.  Elements of U_alpha proper have c = 0; nonzero c lives in
/// the extension LU_alpha by fractional Cartan powers.
struct Mono {
  Rational c;
  int i = 0, j = 0, k = 0;

  long long weight() const { return (long long)i - j; }
  bool operator<(const Mono& o) const {
    if (c != o.c) return c < o.c;
    if (i != o.i) return i < o.i;
    if (j != o.j) return j < o.j;
    return k < o.k;
  }
  bool operator==(const Mono& o) const { return c == o.c && i == o.i && j == o.j && k == o.k; }
};

/// Sparse element of LU_alpha (or U_alpha when every monomial has c = 0).
struct AlgebraElement {
  GDegree degree;
  std::map<Mono, Scalar> terms;

  AlgebraElement() = default;
  explicit AlgebraElement(GDegree d) : degree(d) {}

  void add(const Mono& m, const Scalar& v) {
    auto it = terms.find(m);
    if (it == terms.end())
      terms[m] = v;
    else
      it->second += v;
  }
  void prune(double eps = 1e-14);
  bool is_zero(double eps = 1e-12) const;
  bool fractional_free() const;
  double max_abs() const;
  AlgebraElement& operator+=(const AlgebraElement& o);
  AlgebraElement operator*(const Scalar& s) const;
  AlgebraElement operator-(const AlgebraElement& o) const;
};

/// Sparse element of a tensor power, one degree per slot.
struct TensorElement {
  std::vector<GDegree> degrees;
  std::map<std::vector<Mono>, Scalar> terms;

  TensorElement() = default;
  explicit TensorElement(std::vector<GDegree> d) : degrees(std::move(d)) {}
  int arity() const { return (int)degrees.size(); }

  void add(const std::vector<Mono>& m, const Scalar& v) {
    auto it = terms.find(m);
    if (it == terms.end())
      terms[m] = v;
    else
      it->second += v;
  }
  void prune(double eps = 1e-14);
  double max_abs() const;
  TensorElement& operator+=(const TensorElement& o);
  TensorElement operator*(const Scalar& s) const;
  TensorElement operator-(const TensorElement& o) const;
};

// ---- construction -------------------------------------------------------

AlgebraElement unit(const GDegree& deg);
AlgebraElement gen_E(const GDegree& deg);
AlgebraElement gen_F(const GDegree& deg);
AlgebraElement gen_K(const RootConfig& cfg, const GDegree& deg, long long power = 1);
/// image of K^{2-2*ell'}
AlgebraElement pivot(const RootConfig& cfg, const GDegree& deg);

TensorElement tensor_unit(const std::vector<GDegree>& degs);
TensorElement outer(const RootConfig& cfg, const AlgebraElement& a, const AlgebraElement& b);

// ---- products -----------------------------------------------------------

/// Product of two basis monomials in (L)U_deg, as a short term list.
std::vector<std::pair<Mono, Scalar>> mono_mul(const RootConfig& cfg, const GDegree& deg,
                                              const Mono& a, const Mono& b);

AlgebraElement multiply(const RootConfig& cfg, const AlgebraElement& a, const AlgebraElement& b);
TensorElement tensor_multiply(const RootConfig& cfg, const TensorElement& a,
                              const TensorElement& b);

// ---- Hopf structure -----------------------------------------------------

/// Delta_{alpha,beta} : U_{alpha+beta} -> U_alpha (x) U_beta.
TensorElement coproduct(const RootConfig& cfg, const AlgebraElement& x, const GDegree& alpha,
                        const GDegree& beta);
/// S_alpha : U_alpha -> U_{-alpha} (anti-homomorphism).
AlgebraElement antipode(const RootConfig& cfg, const AlgebraElement& x);
AlgebraElement antipode_inv(const RootConfig& cfg, const AlgebraElement& x);
/// Counit on U_0.
Scalar counit(const RootConfig& cfg, const AlgebraElement& x);

// ---- tensor utilities ---------------------------------------------------

TensorElement tensor_flip(const TensorElement& t);
/// Place a 2-slot tensor into arity `arity` at slot positions (p0, p1).
TensorElement tensor_embed(const TensorElement& t2, int arity, int p0, int p1,
                           const std::vector<GDegree>& degs);
/// Apply coproduct to one slot, splitting its degree as (a, b).
TensorElement tensor_coproduct_slot(const RootConfig& cfg, const TensorElement& t, int slot,
                                    const GDegree& a, const GDegree& b);
TensorElement tensor_antipode_slot(const RootConfig& cfg, const TensorElement& t, int slot);
AlgebraElement tensor_contract_mul(const RootConfig& cfg, const TensorElement& t);  // m(x (x) y)
AlgebraElement tensor_slot_counit(const RootConfig& cfg, const TensorElement& t, int slot);

// ---- R-matrix and twist -------------------------------------------------

/// Quasi R-matrix coefficients: quasi = sum_j coeff[j] E^j (x) F^j.
std::vector<Scalar> quasi_r_coeffs(const RootConfig& cfg);
/// Coefficients of the inverse (convolution inverse of quasi_r_coeffs).
std::vector<Scalar> quasi_r_inv_coeffs(const RootConfig& cfg);
TensorElement quasi_r_matrix(const RootConfig& cfg, const GDegree& alpha, const GDegree& beta);

/// Crossing operator R^{sign} reduced mod I_{(alpha,beta)}:
/// xi^{linear} * body with body in U_alpha (x) U_beta.  The linear part
/// (rational coefficients plus constant) is returned symbolically; its
/// fractional content is what propagates into LU during evaluation.
struct CrossingOp {
  ExponentPoly linear;  // variables 0,1 = the two slots
  TensorElement body;
};
CrossingOp r_matrix_quotient(const RootConfig& cfg, int sign, const GDegree& alpha,
                             const GDegree& beta);

/// Ribbon element theta_0 of U_0 and its inverse.
AlgebraElement twist_zero(const RootConfig& cfg);
AlgebraElement twist_zero_inverse(const RootConfig& cfg);

// ---- linear-algebra views ----------------------------------------------

int algebra_dim(const RootConfig& cfg);
int mono_flat_index(const RootConfig& cfg, const Mono& m);  // requires c = 0
Mono mono_from_flat(const RootConfig& cfg, int idx);
std::vector<Scalar> to_vector(const RootConfig& cfg, const AlgebraElement& x);
AlgebraElement from_vector(const RootConfig& cfg, const GDegree& deg,
                           const std::vector<Scalar>& v);
Mat left_regular(const RootConfig& cfg, const AlgebraElement& x);
Mat right_regular(const RootConfig& cfg, const AlgebraElement& x);

/// Weight-nu projection (keeps monomials with i - j = nu).
AlgebraElement weight_project(const AlgebraElement& x, long long nu);

/// Debug rendering: sum of `xi^(c H) E^i F^j K^k * (re+im i)` terms.
std::string to_string(const AlgebraElement& x);

}  // namespace ghinv
