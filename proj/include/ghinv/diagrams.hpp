#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ghinv/exponents.hpp"
#include "ghinv/linalg.hpp"
#include "ghinv/qalgebra.hpp"

namespace ghinv {

/// Elementary slice events.  Cups declare the strand orientation (the arrow
/// direction at the minimum); caps derive theirs from the incoming strands.
/// XPos is the crossing whose bottom-left entrant passes over.
enum class Ev { Id, XPos, XNeg, CupL, CupR, Cap, Coupon };

struct Event {
  Ev kind = Ev::Id;
  int coupon = -1;
  int in_width(const struct BichromeDiagram& d) const;
  int out_width(const struct BichromeDiagram& d) const;
};

/// Coupon with k red legs (first legs, oriented upward) and optional blue
/// legs: morphism (L_{xi^{q+l}} (x) Id) sum_i L_{u_i} (x) f_i.
struct Coupon {
  int red_legs = 0;
  std::vector<std::string> blue_in, blue_out;  // module specs
  ExponentPoly exponent;                       // variables 0..red_legs-1
  struct Summand {
    Scalar coeff{1, 0};
    std::vector<Mono> red_beads;  // one per red leg, integral Cartan content
    Mat f;                        // blue part; 1x1 identity when no blue legs
  };
  std::vector<Summand> body;
};

/// Values of omega on the meridians of red components (exact rationals mod 1).
/// Entries for blue components are optional and are checked against the
/// degree of the edge color.
struct CohomologyAssignment {
  std::map<int, Rational> values;
  Rational at(int comp) const {
    auto it = values.find(comp);
    return it == values.end() ? Rational(0) : it->second;
  }
};

/// Slice-based planar diagram of a colored bichrome graph.
struct BichromeDiagram {
  std::vector<std::vector<Event>> rows;
  std::vector<std::string> open_colors;  // bottom boundary strands, left to right
  std::map<int, std::string> colors;     // component id -> "red" (default) or module spec
  std::vector<int> surgery;              // component ids forming the surgery link
  std::vector<Coupon> coupons;
  CohomologyAssignment omega;            // bundled assignment (CLI may override)
};

struct CrossingInfo {
  int row = 0, col = 0;
  int pattern = +1;       // +1: bottom-left entrant passes over
  int comp[2] = {-1, -1};  // entrant components (left, right)
  int dir[2] = {+1, +1};   // strand directions at the bottom boundary
  int sign() const { return pattern * dir[0] * dir[1]; }
  int over_slot() const { return pattern > 0 ? 0 : 1; }
};

struct CouponUse {
  int row = 0, col = 0, coupon = -1;
  std::vector<int> red_comps;
  std::vector<int> blue_in_comps, blue_out_comps;
};

struct CupCapInfo {
  int row = 0, col = 0;
  bool is_cup = true;
  int comp = -1;
  int arrow = -1;  // -1 left, +1 right
};

/// Result of tracing a diagram: components, orientations, crossings,
/// coupon uses and the full linking matrix.
struct Traced {
  int ncomp = 0;
  std::vector<bool> closed;
  std::vector<bool> red;
  std::vector<std::string> color;  // module spec for blue components
  std::vector<int> open_bottom, open_top;
  std::vector<CrossingInfo> crossings;
  std::vector<CouponUse> coupon_uses;
  std::vector<CupCapInfo> cupcaps;
  std::vector<std::vector<int>> comp_at;  // per slice boundary
  std::vector<std::vector<int>> dir_at;
  std::vector<std::vector<long long>> lk;

  long long writhe(int comp) const { return lk[(size_t)comp][(size_t)comp]; }
};

/// Validates slice widths, colors and orientations; throws ParseError with
/// the offending row/column.
Traced analyze(const BichromeDiagram& d);

std::vector<std::vector<long long>> linking_matrix(const BichromeDiagram& d);

/// Numbers of positive and negative eigenvalues of the linking matrix
/// restricted to the surgery components; signature = plus - minus.
struct Inertia {
  int plus = 0, minus = 0;
  int signature() const { return plus - minus; }
};
Inertia surgery_inertia(const BichromeDiagram& d, const Traced& t);
int surgery_signature(const BichromeDiagram& d, const Traced& t);

struct CompatReport {
  bool compatible = true;
  struct Violation {
    int comp;
    Rational residue;
    std::string what;
  };
  std::vector<Violation> violations;
};
CompatReport check_compatibility(const RootConfig& cfg, const BichromeDiagram& d,
                                 const Traced& t, const CohomologyAssignment& omega);

enum class Admissibility { None, GraphAdmissible, GAdmissible, Both };
class IntegralCache;  // fwd
Admissibility check_admissibility(const RootConfig& cfg, const BichromeDiagram& d,
                                  const Traced& t, const CohomologyAssignment& omega,
                                  class IntegralCache& cache);

// ---- Kirby moves ---------------------------------------------------------

struct KirbyMove {
  enum Kind { K0, KIPlus, KIMinus, KII } kind = K0;
  int comp = -1;  // K0: component to reverse; KII: component slid over
  int edge = -1;  // KII: component containing the slid edge
};

std::pair<BichromeDiagram, CohomologyAssignment> kirby_move(const RootConfig& cfg,
                                                            const BichromeDiagram& d,
                                                            const CohomologyAssignment& omega,
                                                            const KirbyMove& move);

/// Disjoint union, placing b to the right of a.  Component ids are assigned
/// by the canonical trace order of the union, so both inputs' ids get
/// remapped; colors, surgery marks and omega entries are carried across.
struct UnionResult {
  BichromeDiagram d;
  std::map<int, int> remap_a, remap_b;
};
UnionResult diagram_union(const BichromeDiagram& a, const BichromeDiagram& b);

// ---- serialization -------------------------------------------------------

BichromeDiagram parse_diagram(const std::string& json_text);
std::string serialize_diagram(const BichromeDiagram& d);
BichromeDiagram load_diagram_file(const std::string& path);

/// Omega entries from strings like "0=1/4".
CohomologyAssignment parse_omega(const std::vector<std::string>& entries);

}  // namespace ghinv
