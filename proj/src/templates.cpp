#include "ghinv/templates.hpp"

#include <cmath>
#include <random>

#include "ghinv/errors.hpp"

namespace ghinv {

static Event id_ev() { return Event{Ev::Id}; }
static std::vector<Event> ids(int n) { return std::vector<Event>((size_t)n, id_ev()); }

BichromeDiagram framed_unknot(int framing, bool cup_right) {
  BichromeDiagram d;
  d.rows.push_back({Event{cup_right ? Ev::CupR : Ev::CupL}});
  // a curl on the circle's own two legs has oriented sign opposite to the
  // crossing pattern (the legs run antiparallel)
  for (int t = 0; t < std::abs(framing); ++t)
    d.rows.push_back({Event{framing > 0 ? Ev::XNeg : Ev::XPos}});
  d.rows.push_back({Event{Ev::Cap}});
  return d;
}

BichromeDiagram hopf_link(int linking) { return chain_link({0, 0}, {linking}); }

BichromeDiagram trefoil() {
  // plat closure: the middle strands run antiparallel, so x+ gives writhe +3
  BichromeDiagram d;
  d.rows.push_back({Event{Ev::CupL}, Event{Ev::CupR}});
  for (int t = 0; t < 3; ++t) d.rows.push_back({id_ev(), Event{Ev::XPos}, id_ev()});
  d.rows.push_back({Event{Ev::Cap}, Event{Ev::Cap}});
  return d;
}

BichromeDiagram chain_link(const std::vector<int>& framings, const std::vector<int>& linkings,
                           const std::vector<bool>& flipped) {
  const int n = (int)framings.size();
  BichromeDiagram d;
  std::vector<Event> cups;
  std::vector<int> left_dir(framings.size());  // orientation of each circle's left leg
  for (int i = 0; i < n; ++i) {
    bool flip = i < (int)flipped.size() && flipped[(size_t)i];
    cups.push_back(Event{flip ? Ev::CupR : Ev::CupL});
    left_dir[(size_t)i] = flip ? -1 : +1;
  }
  d.rows.push_back(cups);
  const int width = 2 * n;
  // curls per circle; a curl's oriented sign is minus its pattern since the
  // legs run antiparallel, and each curl swaps the legs
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < std::abs(framings[(size_t)i]); ++t) {
      std::vector<Event> row = ids(width - 2);
      row.insert(row.begin() + 2 * i, Event{framings[(size_t)i] > 0 ? Ev::XNeg : Ev::XPos});
      d.rows.push_back(row);
      left_dir[(size_t)i] = -left_dir[(size_t)i];
    }
  // clasps between neighbours: a pair of same-pattern crossings per unit of
  // linking, pattern chosen from the actual leg directions
  for (int i = 0; i + 1 < n; ++i) {
    int link = i < (int)linkings.size() ? linkings[(size_t)i] : 0;
    if (!link) continue;
    int d1 = -left_dir[(size_t)i];       // right leg of circle i
    int d2 = left_dir[(size_t)(i + 1)];  // left leg of circle i+1
    int pattern = (link > 0 ? 1 : -1) * d1 * d2;
    for (int t = 0; t < 2 * std::abs(link); ++t) {
      std::vector<Event> row = ids(width - 2);
      row.insert(row.begin() + (2 * i + 1), Event{pattern > 0 ? Ev::XPos : Ev::XNeg});
      d.rows.push_back(row);
    }
  }
  std::vector<Event> caps;
  for (int i = 0; i < n; ++i) caps.push_back(Event{Ev::Cap});
  d.rows.push_back(caps);
  return d;
}

BichromeDiagram lens_with_blue(int p, const std::string& blue_module, const Rational& alpha) {
  // red surgery circle at columns 0..1 with p curls, blue circle at 2..3,
  // clasped once (linking +1); the clasp pattern follows the leg directions
  BichromeDiagram d;
  d.rows.push_back({Event{Ev::CupL}, Event{Ev::CupL}});
  int red_left = +1;
  for (int t = 0; t < std::abs(p); ++t) {
    d.rows.push_back({Event{p > 0 ? Ev::XNeg : Ev::XPos}, id_ev(), id_ev()});
    red_left = -red_left;
  }
  int pattern = (-red_left) * (+1);
  for (int t = 0; t < 2; ++t)
    d.rows.push_back({id_ev(), Event{pattern > 0 ? Ev::XPos : Ev::XNeg}, id_ev()});
  d.rows.push_back({Event{Ev::Cap}, Event{Ev::Cap}});
  d.colors[1] = blue_module;
  d.surgery = {0};
  d.omega.values[0] = alpha.mod1();
  return d;
}

BichromeDiagram lens_cut_blue(int p, const std::string& blue_module, const Rational& alpha) {
  // open blue strand in column 0, red surgery circle beside it, linking +1
  BichromeDiagram d;
  d.open_colors = {blue_module};
  d.rows.push_back({id_ev(), Event{Ev::CupL}});
  int red_left = +1;
  for (int t = 0; t < std::abs(p); ++t) {
    d.rows.push_back({id_ev(), Event{p > 0 ? Ev::XNeg : Ev::XPos}});
    red_left = -red_left;
  }
  int pattern = (+1) * red_left;
  for (int t = 0; t < 2; ++t)
    d.rows.push_back({Event{pattern > 0 ? Ev::XPos : Ev::XNeg}, id_ev()});
  d.rows.push_back({id_ev(), Event{Ev::Cap}});
  d.surgery = {1};
  d.omega.values[1] = alpha.mod1();
  return d;
}

BichromeDiagram lens_cut_red(int p, const std::string& blue_module, const Rational& alpha) {
  // open red strand in column 0 carrying p curls, blue circle linked once
  BichromeDiagram d;
  d.open_colors = {"red"};
  for (int t = 0; t < std::abs(p); ++t) {
    d.rows.push_back({id_ev(), Event{Ev::CupL}});
    d.rows.push_back({Event{p > 0 ? Ev::XPos : Ev::XNeg}, id_ev()});
    d.rows.push_back({id_ev(), Event{Ev::Cap}});
  }
  d.rows.push_back({id_ev(), Event{Ev::CupL}});
  for (int t = 0; t < 2; ++t) d.rows.push_back({Event{Ev::XPos}, id_ev()});
  d.rows.push_back({id_ev(), Event{Ev::Cap}});
  d.colors[1] = blue_module;
  d.surgery = {0};
  d.omega.values[0] = alpha.mod1();
  return d;
}

BichromeDiagram blue_unknot(const std::string& module, int framing) {
  BichromeDiagram d = framed_unknot(framing);
  d.colors[0] = module;
  return d;
}

CohomologyAssignment random_compatible_omega(const RootConfig& cfg, const BichromeDiagram& d,
                                             unsigned seed, bool want_nonzero) {
  Traced t = analyze(d);
  std::vector<int> red_closed;
  for (int c = 0; c < t.ncomp; ++c)
    if (t.red[(size_t)c]) red_closed.push_back(c);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> den_pick(0, 4);
  const long long dens[5] = {1, 2, 3, 4, 6};
  CohomologyAssignment best;  // zero class, always compatible for framed links
  for (int attempt = 0; attempt < 400; ++attempt) {
    CohomologyAssignment om;
    bool nonzero = false;
    for (int c : red_closed) {
      long long den = 4 * dens[den_pick(rng)];
      std::uniform_int_distribution<long long> num(0, den - 1);
      Rational v(num(rng), den);
      om.values[c] = v.mod1();
      if (!v.mod1().is_zero()) nonzero = true;
    }
    if (want_nonzero && !nonzero) continue;
    if (check_compatibility(cfg, d, t, om).compatible) return om;
  }
  return best;
}

KirbySuiteResult kirby_property_suite(Engine& eng, int trials, unsigned seed,
                                      bool include_modified) {
  const RootConfig& cfg = eng.config();
  KirbySuiteResult res;
  res.trials = trials;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> ncomp_pick(1, 3);
  std::uniform_int_distribution<int> framing_pick(-1, 1);
  std::uniform_int_distribution<int> link_pick(-1, 1);
  std::uniform_int_distribution<int> coin(0, 1);

  auto run_one = [&](int trial, KirbyMove::Kind kind) {
    int n = ncomp_pick(rng);
    std::vector<int> framings, linkings;
    std::vector<bool> flips;
    for (int i = 0; i < n; ++i) {
      framings.push_back(framing_pick(rng));
      flips.push_back(coin(rng) == 1);
    }
    for (int i = 0; i + 1 < n; ++i) linkings.push_back(link_pick(rng));
    BichromeDiagram d = chain_link(framings, linkings, flips);
    Traced t = analyze(d);
    for (int c = 0; c < t.ncomp; ++c) d.surgery.push_back(c);
    CohomologyAssignment om =
        random_compatible_omega(cfg, d, (unsigned)(seed * 7919 + trial), true);

    KirbyMove mv;
    mv.kind = kind;
    std::uniform_int_distribution<int> comp_pick(0, t.ncomp - 1);
    if (kind == KirbyMove::K0) mv.comp = comp_pick(rng);
    if (kind == KirbyMove::KII) {
      if (t.ncomp < 2) return;  // need a second component to slide
      mv.comp = comp_pick(rng);
      do {
        mv.edge = comp_pick(rng);
      } while (mv.edge == mv.comp);
    }
    Scalar before, after;
    try {
      before = eng.hennings_invariant(d, om).value;
      auto [d2, om2] = kirby_move(cfg, d, om, mv);
      after = eng.hennings_invariant(d2, om2).value;
    } catch (const MoveNotApplicable&) {
      return;
    }
    ++res.performed;
    double resid = std::abs(before - after) / std::max(1.0, std::abs(before));
    res.worst_residual = std::max(res.worst_residual, resid);
    if (resid > 1e-8) {
      ++res.failures;
      res.failure_notes.push_back("trial " + std::to_string(trial) + " move " +
                                  std::to_string((int)kind) + " residual " +
                                  std::to_string(resid));
    }
  };

  for (int trial = 0; trial < trials; ++trial) {
    run_one(trial, KirbyMove::K0);
    run_one(trial, KirbyMove::KIPlus);
    run_one(trial, KirbyMove::KIMinus);
    run_one(trial, KirbyMove::KII);
  }

  if (include_modified) {
    // H' invariance on admissible lens-type presentations: K0 and KI on the
    // surgery circle of a cut presentation
    std::uniform_int_distribution<int> p_pick(1, 3);
    for (int trial = 0; trial < std::max(1, trials / 2); ++trial) {
      int p = p_pick(rng);
      Rational alpha(1 + (trial % 3), 4 * p);
      Rational a(1, 4 * p);
      // compatibility: 4(p alpha + a) must be integral
      Rational need = (Rational(4) * (Rational(p) * alpha + a));
      if (!need.is_integer()) {
        a = -Rational(p) * alpha + Rational(1, 4) * Rational(need.floor() + 1);
        a = a.mod1();
      }
      std::string mod = "typical(" + a.str() + ")";
      BichromeDiagram d = lens_cut_blue(p, mod, alpha);
      Traced t = analyze(d);
      if (!check_compatibility(cfg, d, t, d.omega).compatible) continue;
      try {
        if (!eng.cache().degree_semisimple(alpha.mod1()) ||
            !eng.cache().degree_semisimple(a.mod1()))
          continue;
        Scalar before = eng.modified_invariant(d, d.omega).value;
        KirbyMove mv;
        mv.kind = trial % 2 ? KirbyMove::KIPlus : KirbyMove::KIMinus;
        auto [d2, om2] = kirby_move(cfg, d, d.omega, mv);
        Scalar mid = eng.modified_invariant(d2, om2).value;
        KirbyMove k0;
        k0.kind = KirbyMove::K0;
        k0.comp = 1;  // the surgery circle
        auto [d3, om3] = kirby_move(cfg, d, d.omega, k0);
        Scalar rev = eng.modified_invariant(d3, om3).value;
        ++res.performed;
        double resid = std::max(std::abs(before - mid), std::abs(before - rev)) /
                       std::max(1.0, std::abs(before));
        res.worst_residual = std::max(res.worst_residual, resid);
        if (resid > 1e-8) {
          ++res.failures;
          res.failure_notes.push_back("modified trial " + std::to_string(trial) + " residual " +
                                      std::to_string(resid));
        }
      } catch (const GhinvError& e) {
        ++res.failures;
        res.failure_notes.push_back(std::string("modified trial raised: ") + e.what());
      }
    }
  }
  return res;
}

}  // namespace ghinv
