#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ghinv/diagrams.hpp"
#include "ghinv/integrals.hpp"

namespace ghinv {

struct EngineOptions {
  bool check_exponent_theorem = true;  // exact cross-check against the linking matrix
  bool collect_closed_factors = false;
  bool verify_coupons = true;
  bool inject_sign_bug = false;  // negative control for the property suites
};

/// Outcome of evaluating a diagram: the symmetrized integrals applied to all
/// closed red components, blue loops traced out, plus any open-strand data.
struct EvalResult {
  Scalar scalar{1, 0};
  std::optional<AlgebraElement> open_red;  // (1,1) red cut
  std::optional<Mat> open_blue;            // (1,1) blue cut, M[out][in]
  std::string open_blue_color;
  std::map<int, AlgebraElement> closed_factors;  // diagnostics, per component
  double fractional_residual = 0;
};

struct InvariantReport {
  Scalar value{0, 0};
  std::string path;  // plain_H | modified_graph_cut | modified_red_cut | cgp_oracle
  int signature = 0;
  Scalar delta_used{0, 0};
  std::string admissibility;
  std::vector<std::string> notes;
  double seconds = 0;
};

class Engine {
 public:
  explicit Engine(const RootConfig& cfg, EngineOptions opt = {});

  const RootConfig& config() const { return cfg_; }
  IntegralCache& cache() { return cache_; }

  /// delta_+ = mu_0(g^{-1} theta_0) = lambda(theta), cross-checked against
  /// xi^{-1}, and delta_- = lambda(theta^{-1}).  Invariants normalize by
  /// delta_+^{-b+} delta_-^{-b-} over the eigenvalue signs of the surgery
  /// linking block; this equals delta^{-s} exactly when delta_+ delta_- = 1.
  Scalar delta();
  Scalar delta_minus();

  /// F_mu of the diagram: the universal invariant with every crossing reduced
  /// pairwise at the omega degrees, integrals applied on closed red loops.
  /// color_override recolors components (used by the oracle).
  EvalResult f_mu(const BichromeDiagram& d, const CohomologyAssignment& omega,
                  const std::map<int, std::string>& color_override = {});

  /// H(M, Gamma, omega) = delta^{-s} F_mu(L u Gamma, omega) for a closed
  /// surgery presentation.
  InvariantReport hennings_invariant(const BichromeDiagram& d, const CohomologyAssignment& omega);

  /// H' via the m-trace (open blue strand) or the modified integral (open red
  /// strand).  The diagram must be a cutting presentation: a (1,1)-tangle
  /// whose braid closure is the closed graph.
  InvariantReport modified_invariant(const BichromeDiagram& d, const CohomologyAssignment& omega);

  /// Independent evaluation: every surgery component is replaced by the
  /// Kirby-color weighted sum of typical modules and the all-blue diagram is
  /// contracted with braiding matrices; requires a blue cutting presentation.
  InvariantReport cgp_oracle(const BichromeDiagram& d, const CohomologyAssignment& omega);

  /// Both sides of H'(M # M') = H'(M) H(M'); returns (lhs, rhs).
  std::pair<Scalar, Scalar> connected_sum_check(const BichromeDiagram& sp1,
                                                const CohomologyAssignment& om1,
                                                const BichromeDiagram& sp2,
                                                const CohomologyAssignment& om2);

  EngineOptions options;

  struct TableCache;  // crossing tables and parsed modules, defined internally

 private:
  RootConfig cfg_;
  IntegralCache cache_;
  std::optional<Scalar> delta_, delta_minus_;
  std::shared_ptr<TableCache> tables_;

  Scalar anomaly_norm(const Inertia& in);
};

}  // namespace ghinv
