#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ghinv/linalg.hpp"
#include "ghinv/qalgebra.hpp"

namespace ghinv {

/// Finite dimensional weight module in a weight-diagonal basis: H acts as
/// diag(weights) with exact rational eigenvalues and K = xi^H.
struct WeightModule {
  int dim = 0;
  GDegree degree;
  std::vector<Rational> weights;
  Mat E, F;
  std::string name;
  bool simple = false;

  Mat K(const RootConfig& cfg, long long power = 1) const {
    Mat m(dim, dim);
    for (int r = 0; r < dim; ++r) m(r, r) = cfg.xi_pow(Rational(power) * weights[(size_t)r]);
    return m;
  }
  Mat H() const {
    Mat m(dim, dim);
    for (int r = 0; r < dim; ++r) m(r, r) = Scalar(weights[(size_t)r].to_double(), 0);
    return m;
  }
  Mat pivot_mat(const RootConfig& cfg) const { return K(cfg, 2 - 2 * (long long)cfg.ell_prime); }

  /// rho(x) for x in LU_degree (fractional Cartan powers act diagonally).
  Mat act(const RootConfig& cfg, const AlgebraElement& x) const;
  Mat act_mono(const RootConfig& cfg, const Mono& m) const;
};

/// Simple ell'-dimensional module with highest weight a (weights a-i).
/// Throws RelationViolation if the defining relations fail to verify; a
/// non-generic weight yields simple = false.
WeightModule typical_module(const RootConfig& cfg, const Rational& highest_weight);

/// One dimensional module of weight lambda (needs 4*lambda = 0 mod ell).
WeightModule trivial_module(const RootConfig& cfg, const Rational& lambda);

WeightModule dual_module(const RootConfig& cfg, const WeightModule& v);
WeightModule tensor_module(const RootConfig& cfg, const WeightModule& v, const WeightModule& w);

/// Parse `typical(p/q)`, `trivial(p/q)`, `dual(...)`, `tensor(...,...)`.
WeightModule parse_module(const RootConfig& cfg, const std::string& spec);

/// Braiding c_{V,W} = tau . H . (rho (x) rho)(qR) : V (x) W -> W (x) V,
/// or its inverse for sign = -1.
Mat braiding(const RootConfig& cfg, const WeightModule& v, const WeightModule& w, int sign = 1);

/// Ribbon twist acting on V (diagonal-in-weight-blocks matrix).
Mat module_twist(const RootConfig& cfg, const WeightModule& v);
/// The dual-route formula; equals module_twist for a ribbon structure.
Mat module_twist_dual_route(const RootConfig& cfg, const WeightModule& v);

/// Matrix-block decomposition of the semisimple quotient U_alpha:
/// ell typical blocks of size ell', realized by the joint evaluation map.
struct SimpleDecomposition {
  GDegree degree;
  std::vector<WeightModule> blocks;
  std::vector<AlgebraElement> idempotents;  // z_i, block identities
  double condition_estimate = 0;
};
SimpleDecomposition simple_decomposition(const RootConfig& cfg, const GDegree& alpha);

/// True when every candidate typical block is simple and the joint
/// evaluation map has full rank.
bool is_semisimple_degree(const RootConfig& cfg, const GDegree& alpha);

}  // namespace ghinv
