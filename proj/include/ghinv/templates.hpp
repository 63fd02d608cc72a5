#pragma once

#include <string>
#include <vector>

#include "ghinv/diagrams.hpp"
#include "ghinv/engine.hpp"

namespace ghinv {

/// Closed unknot diagram with |framing| curls of the right sign.
BichromeDiagram framed_unknot(int framing, bool cup_right = false);

/// Two circles with the given linking number (framings zero).
BichromeDiagram hopf_link(int linking = 1);

/// Right-handed trefoil as a plat (writhe +3).
BichromeDiagram trefoil();

/// Chain of framed circles, consecutive pairs clasped with the given linking
/// numbers; orientation flags flip the corresponding circle's cups.
BichromeDiagram chain_link(const std::vector<int>& framings, const std::vector<int>& linkings,
                           const std::vector<bool>& flipped = {});

/// Surgery presentation of the lens space L(p,1) decorated with a blue
/// unknot linked once with the surgery circle (closed form).
BichromeDiagram lens_with_blue(int p, const std::string& blue_module, const Rational& alpha);
/// Cutting presentation of the same triple, open blue strand.
BichromeDiagram lens_cut_blue(int p, const std::string& blue_module, const Rational& alpha);
/// Cutting presentation opening the surgery circle (red cut).
BichromeDiagram lens_cut_red(int p, const std::string& blue_module, const Rational& alpha);

/// Closed blue unknot colored by the module, with optional framing curls.
BichromeDiagram blue_unknot(const std::string& module, int framing = 0);

/// Find a compatible cohomology assignment with small denominators; the
/// all-zero class is returned when nothing better is found within budget.
CohomologyAssignment random_compatible_omega(const RootConfig& cfg, const BichromeDiagram& d,
                                             unsigned seed, bool want_nonzero = true);

/// Randomized Kirby-move invariance suite: `trials` moves of each type
/// (K0, KI+, KI-, KII, plus modified-invariant checks when requested).
struct KirbySuiteResult {
  int trials = 0;
  int performed = 0;
  int failures = 0;
  int per_kind[4] = {0, 0, 0, 0};
  int modified_performed = 0;
  double worst_residual = 0;
  std::vector<std::string> failure_notes;
  bool passed() const { return failures == 0 && performed > 0; }
};
KirbySuiteResult kirby_property_suite(Engine& eng, int trials, unsigned seed,
                                      bool include_modified = true);

}  // namespace ghinv
