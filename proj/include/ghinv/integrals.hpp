#pragma once

#include <map>
#include <optional>
#include <vector>

#include "ghinv/modules_catalog.hpp"
#include "ghinv/qalgebra.hpp"

namespace ghinv {

/// Normalization eta of the symmetrized integral:
///   eta = xi*ell / (c * gauss_sum),  c = last quasi R-matrix coefficient.
/// With it lambda_0(theta_0) = xi^{-1} and Axiom-4 nondegeneracy holds.
Scalar eta_normalization(const RootConfig& cfg);

/// mu_alpha(E^i F^j K^k) = eta [i = j = ell'-1][k = 0].  Throws
/// FractionalCartan when x has fractional Cartan content (a compatibility
/// violation upstream).  eta_override supports sensitivity experiments.
Scalar symmetrized_integral(const RootConfig& cfg, const AlgebraElement& x,
                            std::optional<Scalar> eta_override = std::nullopt);

/// Right G-integral lambda_alpha(x) = mu_alpha(g^{-1} x).
Scalar right_integral(const RootConfig& cfg, const AlgebraElement& x);

/// Two-sided cointegral of U_0, unique up to scale, normalized so that
/// lambda_0(cointegral) = 1.  Found as the nullspace of the stacked system
/// { L_x - eps(x) Id, R_x - eps(x) Id } over the generators.
AlgebraElement cointegral_solve(const RootConfig& cfg);

/// Distinguished G-grouplike gamma_alpha = g_alpha^2.
AlgebraElement distinguished_grouplike(const RootConfig& cfg, const GDegree& alpha);

/// Residual of the left-integral identity for lambda(gamma .) over a full
/// basis of U_{alpha+beta}; small iff gamma is the distinguished element.
double verify_distinguished(const RootConfig& cfg, const GDegree& alpha, const GDegree& beta);

/// delta = mu_0(g^{-1} theta_0) = lambda_0(theta_0); with the eta
/// normalization this equals xi^{-1}.
Scalar twist_integral(const RootConfig& cfg);
Scalar twist_inverse_integral(const RootConfig& cfg);

/// Per-degree data for the modified integral: central idempotents z_i,
/// block dimensions n_i = ell', modified dimensions d_i = mu(z_i)/n_i and
/// z_alpha = sum (d_i/n_i) z_i.
struct ModifiedIntegralData {
  GDegree degree;
  SimpleDecomposition dec;
  std::vector<Scalar> mod_dims;
  AlgebraElement z_deg;
};
ModifiedIntegralData modified_integral_data(const RootConfig& cfg, const GDegree& alpha);

/// Cache of per-degree data (computed once, then read-only).
class IntegralCache {
 public:
  explicit IntegralCache(const RootConfig& cfg) : cfg_(cfg) {}
  const ModifiedIntegralData& at(const GDegree& alpha);
  bool degree_semisimple(const GDegree& alpha);

 private:
  RootConfig cfg_;
  std::map<Rational, ModifiedIntegralData> data_;
  std::map<Rational, bool> semisimple_;
};

/// Modified dimensions d_i of the blocks at a semisimple degree.
std::vector<Scalar> modified_dimensions(const RootConfig& cfg, const ModifiedIntegralData& d);

/// Independent route: solve mu = sum_i d_i tr(rho_i(.)) in least squares
/// from random samples; cross-checks modified_dimensions.
std::vector<Scalar> modified_dimensions_solve(const RootConfig& cfg, const GDegree& alpha,
                                              unsigned seed = 1);

/// mu'_alpha(z) = mu_alpha(z_alpha z); z must be central.
Scalar modified_integral(const RootConfig& cfg, const ModifiedIntegralData& d,
                         const AlgebraElement& z);

/// m-trace of an intertwiner f of the weight module V (projective at a
/// semisimple degree): t_V(f) = sum_i (d_i/n_i) tr(f rho_V(z_i)).
Scalar m_trace(const RootConfig& cfg, const ModifiedIntegralData& d, const WeightModule& v,
               const Mat& f);
Scalar modified_dimension(const RootConfig& cfg, const ModifiedIntegralData& d,
                          const WeightModule& v);

/// Right partial quantum trace of f in End(V (x) W) down to End(V).
Mat partial_trace_right(const RootConfig& cfg, const WeightModule& v, const WeightModule& w,
                        const Mat& f);

/// Basis of the centralizer Z_{(alpha,beta)} of Delta(U_{alpha+beta}) inside
/// U_alpha (x) U_beta (weight-zero reduction plus nullspace solve).
std::vector<TensorElement> centralizer_basis_pair(const RootConfig& cfg, const GDegree& alpha,
                                                  const GDegree& beta);

}  // namespace ghinv
