#include "ghinv/engine.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <cmath>

#include "ghinv/errors.hpp"
#include "ghinv/kernels.hpp"
#include "ghinv/modules_catalog.hpp"

namespace ghinv {

namespace {

using Key = std::vector<int>;

struct Entry {
  Key key;
  Scalar amp;
};

void sort_merge(std::vector<Entry>& v, double eps = 1e-15) {
  std::sort(v.begin(), v.end(), [](const Entry& a, const Entry& b) { return a.key < b.key; });
  size_t w = 0;
  double scale = 1e-300;
  for (const auto& e : v) scale = std::max(scale, std::abs(e.amp));
  for (size_t r = 0; r < v.size();) {
    size_t s = r;
    Scalar acc = 0;
    while (s < v.size() && v[s].key == v[r].key) acc += v[s++].amp;
    if (std::abs(acc) > eps * scale) {
      if (w != r) v[w].key = std::move(v[r].key);
      v[w].amp = acc;
      ++w;
    }
    r = s;
  }
  v.resize(w);
}

// correlated bead-pair table for one crossing; payloads are interned monomial
// ids for red slots and matrix-pool ids for blue slots
struct PairTable {
  struct Term {
    int p1, p2;
    Scalar coeff;
  };
  std::vector<Term> terms;
  bool blue1 = false, blue2 = false;
  std::vector<Mat> pool1, pool2;
};

struct CouponTerm {
  std::vector<Mono> leg;  // combined Cartan.u bead per red leg
  Scalar coeff;
  const Mat* f;
};

}  // namespace

namespace {
struct MonoInterner {
  std::map<Mono, int> idx;
  std::vector<Mono> monos;
  int intern(const Mono& m) {
    auto it = idx.find(m);
    if (it != idx.end()) return it->second;
    int id = (int)monos.size();
    idx[m] = id;
    monos.push_back(m);
    return id;
  }
};
}  // namespace

struct Engine::TableCache {
  std::map<std::string, PairTable> tables;
  std::map<std::string, WeightModule> modules;
  std::map<Rational, MonoInterner> interner;
  std::map<std::tuple<long long, long long, int, int>, std::vector<std::pair<int, Scalar>>>
      prod_memo;
};

Engine::Engine(const RootConfig& cfg, EngineOptions opt)
    : options(opt), cfg_(cfg), cache_(cfg), tables_(std::make_shared<TableCache>()) {}

Scalar Engine::delta() {
  if (!delta_) {
    Scalar d = right_integral(cfg_, twist_zero(cfg_));
    if (std::abs(d - cfg_.xi_pow(-1)) > cfg_.tol)
      throw PropertyViolation("normalization regression: lambda(theta) != xi^{-1}");
    delta_ = d;
  }
  return *delta_;
}

Scalar Engine::delta_minus() {
  if (!delta_minus_) {
    Scalar d = right_integral(cfg_, twist_zero_inverse(cfg_));
    if (std::abs(d) < cfg_.tol)
      throw DegenerateRoot("lambda(theta^{-1}) vanishes");
    delta_minus_ = d;
  }
  return *delta_minus_;
}

Scalar Engine::anomaly_norm(const Inertia& in) {
  Scalar f = 1;
  for (int t = 0; t < in.plus; ++t) f = f / delta();
  for (int t = 0; t < in.minus; ++t) f = f / delta_minus();
  return f;
}

// ---- the bead sweep ---------------------------------------------------------

namespace {

class Sweep {
 public:
  Sweep(const RootConfig& cfg, Engine::TableCache& tc, const BichromeDiagram& d, const Traced& t,
        const CohomologyAssignment& om, const std::map<int, std::string>& color_override,
        const EngineOptions& opt)
      : cfg_(cfg), tc_(tc), d_(d), t_(t), om_(om), opt_(opt) {
    color_.resize((size_t)t.ncomp);
    red_.resize((size_t)t.ncomp);
    for (int c = 0; c < t.ncomp; ++c) {
      auto it = color_override.find(c);
      std::string col = it != color_override.end() ? it->second : t.color[(size_t)c];
      color_[(size_t)c] = col;
      red_[(size_t)c] = col == "red";
      if (!red_[(size_t)c]) module_of(col);
    }
    overridden_ = !color_override.empty();
  }

  EvalResult run();

 private:
  const RootConfig& cfg_;
  Engine::TableCache& tc_;
  const BichromeDiagram& d_;
  const Traced& t_;
  const CohomologyAssignment& om_;
  const EngineOptions& opt_;
  bool overridden_ = false;

  std::vector<std::string> color_;
  std::vector<bool> red_;

  struct SlotRef {
    bool blue = false;
    int id = -1;
  };
  struct Arc {
    int comp;
  };
  struct Leg {
    int comp;
    const WeightModule* mod;
  };
  std::vector<Arc> arcs_;
  std::vector<Leg> legs_;
  std::vector<SlotRef> cols_;
  std::map<int, int> arc_slot_, leg_slot_;
  int nslots_ = 0;
  std::vector<Entry> state_;
  std::vector<int> bottom_legs_;  // phantom slots holding open-boundary indices
  int bottom_red_arc_ = -1;


  ExponentPoly sweep_quad_;
  std::map<int, Rational> sweep_lin_;
  EvalResult result_;

  GDegree deg_of(int comp) {
    if (red_[(size_t)comp]) return om_.at(comp).mod1();
    return module_of(color_[(size_t)comp]).degree;
  }

  const WeightModule& module_of(const std::string& spec) {
    auto it = tc_.modules.find(spec);
    if (it == tc_.modules.end()) it = tc_.modules.emplace(spec, parse_module(cfg_, spec)).first;
    return it->second;
  }

  MonoInterner& interner(const GDegree& deg) { return tc_.interner[deg]; }

  const std::vector<std::pair<int, Scalar>>& mono_prod(const GDegree& deg, int a, int b) {
    auto k = std::make_tuple(deg.num, deg.den, a, b);
    auto it = tc_.prod_memo.find(k);
    if (it != tc_.prod_memo.end()) return it->second;
    MonoInterner& in = interner(deg);
    auto prods = mono_mul(cfg_, deg, in.monos[(size_t)a], in.monos[(size_t)b]);
    std::vector<std::pair<int, Scalar>> out;
    for (auto& [m, v] : prods)
      if (std::abs(v) > 1e-16) out.emplace_back(in.intern(m), v);
    return tc_.prod_memo.emplace(k, std::move(out)).first->second;
  }

  int push_slot() { return nslots_++; }

  int new_arc(int comp, int init_mono, Scalar phase) {
    int id = (int)arcs_.size();
    arcs_.push_back({comp});
    arc_slot_[id] = push_slot();
    for (auto& e : state_) {
      e.key.push_back(init_mono);
      e.amp *= phase;
    }
    return id;
  }

  std::pair<int, int> new_leg_pair(int comp, const WeightModule& mod, const Mat& bead_up_right) {
    int id1 = (int)legs_.size();
    legs_.push_back({comp, &mod});
    int id2 = (int)legs_.size();
    legs_.push_back({comp, &mod});
    leg_slot_[id1] = push_slot();
    leg_slot_[id2] = push_slot();
    std::vector<Entry> next;
    next.reserve(state_.size() * (size_t)mod.dim);
    for (const auto& e : state_)
      for (int a = 0; a < mod.dim; ++a)
        for (int b = 0; b < mod.dim; ++b) {
          Scalar c = bead_up_right(b, a);
          if (c == Scalar(0)) continue;
          Entry ne = e;
          ne.key.push_back(a);
          ne.key.push_back(b);
          ne.amp *= c;
          next.push_back(std::move(ne));
        }
    state_ = std::move(next);
    return {id1, id2};
  }

  // role +1: bead multiplies on the left (head / upward end); -1: on the right
  void apply_red_bead(int arc, int role, int mono_id, const GDegree& deg, Scalar phase = 1) {
    int slot = arc_slot_.at(arc);
    std::vector<Entry> next;
    next.reserve(state_.size() * 2);
    for (const auto& e : state_) {
      const auto& prods = role > 0 ? mono_prod(deg, mono_id, e.key[(size_t)slot])
                                   : mono_prod(deg, e.key[(size_t)slot], mono_id);
      for (const auto& [m, v] : prods) {
        Entry ne = e;
        ne.key[(size_t)slot] = m;
        ne.amp *= v * phase;
        next.push_back(std::move(ne));
      }
    }
    sort_merge(next);
    state_ = std::move(next);
  }

  void apply_blue_bead(int leg, const Mat& m) {
    int slot = leg_slot_.at(leg);
    std::vector<Entry> next;
    next.reserve(state_.size() * 2);
    for (const auto& e : state_) {
      int r = e.key[(size_t)slot];
      for (int s = 0; s < m.rows; ++s) {
        Scalar c = m(s, r);
        if (c == Scalar(0)) continue;
        Entry ne = e;
        ne.key[(size_t)slot] = s;
        ne.amp *= c;
        next.push_back(std::move(ne));
      }
    }
    sort_merge(next);
    state_ = std::move(next);
  }

  void apply_pair_table(const PairTable& tab, const SlotRef& s1, int role1, const GDegree& g1,
                        const SlotRef& s2, int role2, const GDegree& g2) {
    int slot1 = s1.blue ? leg_slot_.at(s1.id) : arc_slot_.at(s1.id);
    int slot2 = s2.blue ? leg_slot_.at(s2.id) : arc_slot_.at(s2.id);
    // warm the product memo serially so the parallel loop only reads
    if (slot1 != slot2) {
      std::set<int> vals1, vals2;
      for (const auto& e : state_) {
        vals1.insert(e.key[(size_t)slot1]);
        vals2.insert(e.key[(size_t)slot2]);
      }
      for (const auto& term : tab.terms) {
        if (!tab.blue1)
          for (int v : vals1) (void)(role1 > 0 ? mono_prod(g1, term.p1, v) : mono_prod(g1, v, term.p1));
        if (!tab.blue2)
          for (int v : vals2) (void)(role2 > 0 ? mono_prod(g2, term.p2, v) : mono_prod(g2, v, term.p2));
      }
    }
    const bool can_parallel = slot1 != slot2;
    std::vector<std::vector<Entry>> chunks(state_.size());
    auto process = [&](int ei) {
      const Entry& e = state_[(size_t)ei];
      auto& out = chunks[(size_t)ei];
      for (const auto& term : tab.terms) {
        std::vector<std::pair<int, Scalar>> exp1;
        if (tab.blue1) {
          const Mat& m = tab.pool1[(size_t)term.p1];
          int r = e.key[(size_t)slot1];
          for (int s = 0; s < m.rows; ++s)
            if (m(s, r) != Scalar(0)) exp1.emplace_back(s, m(s, r));
        } else {
          const auto& prods = role1 > 0 ? mono_prod(g1, term.p1, e.key[(size_t)slot1])
                                        : mono_prod(g1, e.key[(size_t)slot1], term.p1);
          exp1 = prods;
        }
        for (const auto& [v1, c1] : exp1) {
          if (tab.blue2) {
            const Mat& m = tab.pool2[(size_t)term.p2];
            int r = slot1 == slot2 ? v1 : e.key[(size_t)slot2];
            for (int s = 0; s < m.rows; ++s) {
              if (m(s, r) == Scalar(0)) continue;
              Entry ne = e;
              ne.key[(size_t)slot1] = v1;
              ne.key[(size_t)slot2] = s;
              ne.amp *= term.coeff * c1 * m(s, r);
              out.push_back(std::move(ne));
            }
          } else {
            int base = slot1 == slot2 ? v1 : e.key[(size_t)slot2];
            const auto& prods = role2 > 0 ? mono_prod(g2, term.p2, base)
                                          : mono_prod(g2, base, term.p2);
            for (const auto& [v2, c2] : prods) {
              Entry ne = e;
              ne.key[(size_t)slot1] = v1;
              ne.key[(size_t)slot2] = v2;
              ne.amp *= term.coeff * c1 * c2;
              out.push_back(std::move(ne));
            }
          }
        }
      }
    };
    if (can_parallel)
      par::parallel_for((int)state_.size(), process);
    else
      for (int ei = 0; ei < (int)state_.size(); ++ei) process(ei);
    std::vector<Entry> next;
    size_t total = 0;
    for (const auto& c : chunks) total += c.size();
    next.reserve(total);
    for (auto& c : chunks)
      for (auto& e : c) next.push_back(std::move(e));
    sort_merge(next);
    state_ = std::move(next);
  }

  void close_red(int arc, const GDegree& deg, int comp) {
    int slot = arc_slot_.at(arc);
    MonoInterner& in = interner(deg);
    const Scalar eta = eta_normalization(cfg_);
    double scale = 1e-300;
    for (const auto& e : state_) scale = std::max(scale, std::abs(e.amp));
    AlgebraElement factor(deg);
    std::vector<Entry> next;
    for (const auto& e : state_) {
      const Mono& m = in.monos[(size_t)e.key[(size_t)slot]];
      if (opt_.collect_closed_factors) factor.add(m, e.amp);
      if (!m.c.is_zero()) {
        if (std::abs(e.amp) > cfg_.tol * scale)
          throw FractionalResidue("closed component " + std::to_string(comp) +
                                  " carries fractional Cartan residue " + m.c.str());
        result_.fractional_residual = std::max(result_.fractional_residual, std::abs(e.amp));
        continue;
      }
      if (m.i != cfg_.ell_prime - 1 || m.j != cfg_.ell_prime - 1 || m.k != 0) continue;
      Entry ne = e;
      ne.amp *= eta;
      next.push_back(std::move(ne));
    }
    if (opt_.collect_closed_factors) {
      factor.prune();
      result_.closed_factors.emplace(comp, std::move(factor));
    }
    state_ = std::move(next);
    arc_slot_.erase(arc);
    drop_slot_list({slot});
  }

  void drop_slot_list(const std::vector<int>& dead) {
    std::vector<int> sorted = dead;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> keep;
    for (int p = 0; p < nslots_; ++p)
      if (!std::binary_search(sorted.begin(), sorted.end(), p)) keep.push_back(p);
    for (auto& e : state_) {
      Key nk(keep.size());
      for (size_t i = 0; i < keep.size(); ++i) nk[i] = e.key[(size_t)keep[i]];
      e.key = std::move(nk);
    }
    auto shift = [&](int s) {
      int dd = 0;
      for (int x : sorted)
        if (x < s) ++dd;
      return s - dd;
    };
    for (auto& [a, s] : arc_slot_) s = shift(s);
    for (auto& [l, s] : leg_slot_) s = shift(s);
    for (auto& s : bottom_legs_) s = shift(s);
    nslots_ -= (int)sorted.size();
    sort_merge(state_);
  }

  void close_blue(int leg1, int leg2) {
    int slot1 = leg_slot_.at(leg1), slot2 = leg_slot_.at(leg2);
    std::vector<Entry> next;
    for (const auto& e : state_)
      if (e.key[(size_t)slot1] == e.key[(size_t)slot2]) next.push_back(e);
    state_ = std::move(next);
    leg_slot_.erase(leg1);
    leg_slot_.erase(leg2);
    drop_slot_list({slot1, slot2});
  }

  void merge_arcs(int arc_head, int arc_tail, const GDegree& deg) {
    // joined word = w(tail-side) . w(head-side)
    int slot_h = arc_slot_.at(arc_head), slot_t = arc_slot_.at(arc_tail);
    std::vector<Entry> next;
    next.reserve(state_.size() * 2);
    for (const auto& e : state_) {
      const auto& prods = mono_prod(deg, e.key[(size_t)slot_t], e.key[(size_t)slot_h]);
      for (const auto& [m, v] : prods) {
        Entry ne = e;
        ne.key[(size_t)slot_h] = m;
        ne.amp *= v;
        next.push_back(std::move(ne));
      }
    }
    state_ = std::move(next);
    arc_slot_.erase(arc_tail);
    drop_slot_list({slot_t});
  }

  std::pair<Mono, Scalar> cartan_mono(const GDegree& deg, const Rational& l, long long ktable) {
    long long t = l.floor();
    Rational c = l - Rational(t);
    long long q2 = ktable + t;
    long long qq = q2 >= 0 ? q2 / cfg_.ell : -(((-q2) + cfg_.ell - 1) / cfg_.ell);
    long long rr = q2 - qq * cfg_.ell;
    Scalar ph = cfg_.xi_pow(Rational(cfg_.ell * qq) * deg);
    return {Mono{c, 0, 0, (int)rr}, ph};
  }

  const PairTable& crossing_table(const CrossingInfo& x) {
    const int over = x.over_slot();
    const int co = x.comp[over], cu = x.comp[1 - over];
    const bool down_o = x.dir[over] < 0, down_u = x.dir[1 - over] < 0;
    const bool red_o = red_[(size_t)co], red_u = red_[(size_t)cu];
    const GDegree go = deg_of(co), gu = deg_of(cu);
    std::string key = std::to_string(x.pattern) + "|" + go.str() + "," + gu.str() + "|" +
                      (red_o ? "R" : color_[(size_t)co]) + (down_o ? "v" : "^") + "|" +
                      (red_u ? "R" : color_[(size_t)cu]) + (down_u ? "v" : "^") +
                      (opt_.inject_sign_bug ? "!" : "");
    auto it = tc_.tables.find(key);
    if (it != tc_.tables.end()) return it->second;

    PairTable tab;
    tab.blue1 = !red_o;
    tab.blue2 = !red_u;
    int eps_prime = x.pattern;
    if (opt_.inject_sign_bug) eps_prime = -eps_prime;
    // the S^- adjustment of downward strands applies to every color, so the
    // effective Cartan sign is the oriented crossing sign
    int flips = (down_o ? 1 : 0) + (down_u ? 1 : 0);
    int eps = (flips % 2) ? -eps_prime : eps_prime;

    ExponentPoly q = ExponentPoly::quadratic(0, 1, 2 * (long long)eps);
    auto [lin, fe] = reduce_quadratic(cfg_, q, Lattice({go, gu}));
    Scalar phi = cfg_.xi_pow(lin.const_term);
    Rational l1 = lin.lin.count(0) ? lin.lin.at(0) : Rational(0);
    Rational l2 = lin.lin.count(1) ? lin.lin.at(1) : Rational(0);

    auto coeffs = eps_prime > 0 ? quasi_r_coeffs(cfg_) : quasi_r_inv_coeffs(cfg_);
    const bool cart_left_base = eps_prime > 0;
    // W-parts: the over slot carries E^j, the under slot F^j; S applied on
    // downward red arcs (single monomials either way)
    std::vector<std::pair<Mono, Scalar>> w1((size_t)cfg_.ell_prime), w2((size_t)cfg_.ell_prime);
    for (int j = 0; j < cfg_.ell_prime; ++j) {
      auto w_of = [&](bool is_E, bool apply_S, const GDegree& target) {
        AlgebraElement e(apply_S ? gdeg_neg(target) : target);
        e.terms[Mono{Rational(0), is_E ? j : 0, is_E ? 0 : j, 0}] = 1;
        if (apply_S) e = antipode(cfg_, e);
        return std::pair<Mono, Scalar>(e.terms.begin()->first, e.terms.begin()->second);
      };
      w1[(size_t)j] = w_of(true, down_o, go);
      w2[(size_t)j] = w_of(false, down_u, gu);
    }
    const WeightModule* mod_o = red_o ? nullptr : &module_of(color_[(size_t)co]);
    const WeightModule* mod_u = red_u ? nullptr : &module_of(color_[(size_t)cu]);
    bool cl1 = down_o ? !cart_left_base : cart_left_base;
    bool cl2 = down_u ? !cart_left_base : cart_left_base;

    std::map<Mono, int> pidx1, pidx2;
    auto payload = [&](bool blue, bool down, const WeightModule* mod, const GDegree& deg,
                       const Mono& m, std::map<Mono, int>& pidx, std::vector<Mat>& pool) -> int {
      if (!blue) return interner(deg).intern(m);
      auto itp = pidx.find(m);
      if (itp != pidx.end()) return itp->second;
      Mat mm = mod->act_mono(cfg_, m);
      if (down) mm = mm.transpose();
      int id = (int)pool.size();
      pool.push_back(std::move(mm));
      pidx[m] = id;
      return id;
    };
    for (int j = 0; j < cfg_.ell_prime; ++j) {
      if (std::abs(coeffs[(size_t)j]) < 1e-16) continue;
      for (int k1 = 0; k1 < cfg_.ell; ++k1)
        for (int k2 = 0; k2 < cfg_.ell; ++k2) {
          Scalar tv = fe.at(k1, k2);
          if (std::abs(tv) < 1e-15) continue;
          auto c1 = cartan_mono(go, l1, k1);
          auto c2 = cartan_mono(gu, l2, k2);
          auto combine = [&](const GDegree& deg, const std::pair<Mono, Scalar>& w,
                             const std::pair<Mono, Scalar>& cart, bool cart_left) {
            auto prods = cart_left ? mono_mul(cfg_, deg, cart.first, w.first)
                                   : mono_mul(cfg_, deg, w.first, cart.first);
            return std::pair<Mono, Scalar>(prods[0].first,
                                           prods[0].second * w.second * cart.second);
          };
          auto s1 = combine(go, w1[(size_t)j], c1, cl1);
          auto s2 = combine(gu, w2[(size_t)j], c2, cl2);
          PairTable::Term term;
          term.coeff = coeffs[(size_t)j] * tv * phi * s1.second * s2.second;
          term.p1 = payload(tab.blue1, down_o, mod_o, go, s1.first, pidx1, tab.pool1);
          term.p2 = payload(tab.blue2, down_u, mod_u, gu, s2.first, pidx2, tab.pool2);
          tab.terms.push_back(term);
        }
    }
    return tc_.tables.emplace(key, std::move(tab)).first->second;
  }

  // expand xi^{q+l} . u_i into flat bead terms
  std::vector<CouponTerm> expand_coupon(const Coupon& cp, const std::vector<GDegree>& legdeg) {
    struct Partial {
      std::vector<std::pair<Mono, Scalar>> leg;
      Scalar coeff{1, 0};
    };
    std::vector<Partial> parts(1);
    parts[0].leg.assign((size_t)cp.red_legs, {Mono{}, Scalar(1)});
    auto mul_leg = [&](Partial& p, int leg, const std::pair<Mono, Scalar>& cm) {
      auto prods =
          mono_mul(cfg_, legdeg[(size_t)leg], p.leg[(size_t)leg].first, cm.first);
      p.leg[(size_t)leg] = {prods[0].first,
                            prods[0].second * p.leg[(size_t)leg].second * cm.second};
    };
    for (const auto& [vars, coeff] : cp.exponent.quad) {
      int a = vars.first, b = vars.second;
      std::vector<Partial> next;
      if (a == b) {
        auto [lin, fe] =
            reduce_quadratic(cfg_, ExponentPoly::quadratic(0, 0, coeff), Lattice({legdeg[(size_t)a]}));
        Scalar phi = cfg_.xi_pow(lin.const_term);
        Rational l0 = lin.lin.count(0) ? lin.lin.at(0) : Rational(0);
        for (const auto& p : parts)
          for (int k = 0; k < cfg_.ell; ++k) {
            if (std::abs(fe.at(k)) < 1e-15) continue;
            Partial np = p;
            mul_leg(np, a, cartan_mono(legdeg[(size_t)a], l0, k));
            np.coeff *= fe.at(k) * phi;
            next.push_back(std::move(np));
          }
      } else {
        auto [lin, fe] = reduce_quadratic(cfg_, ExponentPoly::quadratic(0, 1, coeff),
                                          Lattice({legdeg[(size_t)a], legdeg[(size_t)b]}));
        Scalar phi = cfg_.xi_pow(lin.const_term);
        Rational l0 = lin.lin.count(0) ? lin.lin.at(0) : Rational(0);
        Rational l1 = lin.lin.count(1) ? lin.lin.at(1) : Rational(0);
        for (const auto& p : parts)
          for (int k1 = 0; k1 < cfg_.ell; ++k1)
            for (int k2 = 0; k2 < cfg_.ell; ++k2) {
              if (std::abs(fe.at(k1, k2)) < 1e-15) continue;
              Partial np = p;
              mul_leg(np, a, cartan_mono(legdeg[(size_t)a], l0, k1));
              mul_leg(np, b, cartan_mono(legdeg[(size_t)b], l1, k2));
              np.coeff *= fe.at(k1, k2) * phi;
              next.push_back(std::move(np));
            }
      }
      parts = std::move(next);
    }
    for (const auto& [var, lcoef] : cp.exponent.lin)
      for (auto& p : parts) mul_leg(p, var, cartan_mono(legdeg[(size_t)var], lcoef, 0));

    std::vector<CouponTerm> terms;
    for (const auto& sm : cp.body)
      for (const auto& p : parts) {
        CouponTerm tmn;
        tmn.coeff = sm.coeff * p.coeff;
        tmn.f = &sm.f;
        for (int leg = 0; leg < cp.red_legs; ++leg) {
          auto prods = mono_mul(cfg_, legdeg[(size_t)leg], p.leg[(size_t)leg].first,
                                sm.red_beads[(size_t)leg]);
          tmn.leg.push_back(prods[0].first);
          tmn.coeff *= prods[0].second * p.leg[(size_t)leg].second;
        }
        terms.push_back(std::move(tmn));
      }
    return terms;
  }

  void verify_coupon(const CouponUse& use) {
    const Coupon& cp = d_.coupons[(size_t)use.coupon];
    if (!cp.blue_in.empty() || !cp.blue_out.empty()) return;  // red-leg coupons only
    if (cp.red_legs < 1 || cp.red_legs > 2) return;
    std::vector<GDegree> legdeg;
    for (int comp : use.red_comps) legdeg.push_back(deg_of(comp));
    auto terms = expand_coupon(cp, legdeg);
    auto fscalar = [](const Mat& f) { return f.rows ? f.a[0] : Scalar(1); };
    if (cp.red_legs == 1) {
      AlgebraElement op(legdeg[0]);
      for (const auto& tmn : terms) op.add(tmn.leg[0], tmn.coeff * fscalar(*tmn.f));
      op.prune();
      double scale = std::max(1.0, op.max_abs());
      for (const AlgebraElement& g :
           {gen_E(legdeg[0]), gen_F(legdeg[0]), gen_K(cfg_, legdeg[0])}) {
        AlgebraElement diff = multiply(cfg_, op, g) - multiply(cfg_, g, op);
        if (diff.max_abs() > cfg_.tol * scale * 10)
          throw PropertyViolation("coupon morphism is not equivariant (1 leg)");
      }
    } else {
      TensorElement op({legdeg[0], legdeg[1]});
      for (const auto& tmn : terms)
        op.add({tmn.leg[0], tmn.leg[1]}, tmn.coeff * fscalar(*tmn.f));
      op.prune();
      double scale = std::max(1.0, op.max_abs());
      GDegree ab = gdeg_add(legdeg[0], legdeg[1]);
      for (const AlgebraElement& g : {gen_E(ab), gen_F(ab), gen_K(cfg_, ab)}) {
        TensorElement dg = coproduct(cfg_, g, legdeg[0], legdeg[1]);
        TensorElement diff =
            tensor_multiply(cfg_, op, dg) - tensor_multiply(cfg_, dg, op);
        if (diff.max_abs() > cfg_.tol * scale * 10)
          throw PropertyViolation("coupon morphism is not equivariant (2 legs)");
      }
    }
  }

  void process_coupon(const CouponUse& use, int col0) {
    const Coupon& cp = d_.coupons[(size_t)use.coupon];
    std::vector<GDegree> legdeg;
    for (int comp : use.red_comps) legdeg.push_back(deg_of(comp));
    auto terms = expand_coupon(cp, legdeg);

    if (opt_.check_exponent_theorem) {
      std::vector<int> perm;
      for (int comp : use.red_comps) perm.push_back(comp);
      ExponentPoly quad_only;
      quad_only.quad = cp.exponent.quad;
      sweep_quad_ += quad_only.relabel(perm);
      for (const auto& [var, lcoef] : cp.exponent.lin) {
        int comp = use.red_comps[(size_t)var];
        sweep_lin_[comp] = (sweep_lin_[comp] + lcoef).mod1();
      }
    }

    std::vector<int> red_arcs;
    for (int leg = 0; leg < cp.red_legs; ++leg) red_arcs.push_back(cols_[(size_t)(col0 + leg)].id);
    std::vector<int> in_legs;
    for (size_t leg = 0; leg < cp.blue_in.size(); ++leg)
      in_legs.push_back(cols_[(size_t)(col0 + cp.red_legs + (int)leg)].id);

    // blue modules and new out legs
    std::vector<const WeightModule*> in_mods, out_mods;
    for (const auto& s : cp.blue_in) in_mods.push_back(&module_of(s));
    for (const auto& s : cp.blue_out) out_mods.push_back(&module_of(s));
    std::vector<int> in_slots;
    for (int leg : in_legs) in_slots.push_back(leg_slot_.at(leg));

    coupon_out_legs_.clear();
    std::vector<int> out_slots;
    for (size_t leg = 0; leg < out_mods.size(); ++leg) {
      int id = (int)legs_.size();
      legs_.push_back({use.blue_out_comps[(size_t)leg], out_mods[(size_t)leg]});
      leg_slot_[id] = push_slot();
      coupon_out_legs_.push_back(id);
      out_slots.push_back(leg_slot_.at(id));
    }

    std::vector<Entry> next;
    for (const auto& e : state_) {
      // in-leg flat index for the f matrix
      int flat_in = 0;
      for (size_t leg = 0; leg < in_slots.size(); ++leg)
        flat_in = flat_in * in_mods[(size_t)leg]->dim + e.key[(size_t)in_slots[(size_t)leg]];
      for (const auto& tmn : terms) {
        // expand red beads leg by leg
        std::vector<std::pair<Key, Scalar>> partial{{e.key, e.amp * tmn.coeff}};
        // append placeholder out-leg values later
        for (int leg = 0; leg < cp.red_legs; ++leg) {
          int slot = arc_slot_.at(red_arcs[(size_t)leg]);
          int mono = interner(legdeg[(size_t)leg]).intern(tmn.leg[(size_t)leg]);
          std::vector<std::pair<Key, Scalar>> np;
          for (auto& [k, v] : partial) {
            const auto& prods = mono_prod(legdeg[(size_t)leg], mono, k[(size_t)slot]);
            for (const auto& [m, c] : prods) {
              Key nk = k;
              nk[(size_t)slot] = m;
              np.emplace_back(std::move(nk), v * c);
            }
          }
          partial = std::move(np);
        }
        if (out_mods.empty() && in_mods.empty()) {
          Scalar fv = tmn.f->rows ? tmn.f->a[0] : Scalar(1);
          for (auto& [k, v] : partial) next.push_back({std::move(k), v * fv});
        } else {
          int out_total = 1;
          for (auto* m : out_mods) out_total *= m->dim;
          for (auto& [k, v] : partial) {
            for (int fo = 0; fo < out_total; ++fo) {
              Scalar fv = (*tmn.f)(fo, flat_in);
              if (fv == Scalar(0)) continue;
              Key nk = k;
              int rem = fo;
              // unpack row-major out tuple
              std::vector<int> outvals(out_mods.size());
              for (int leg = (int)out_mods.size() - 1; leg >= 0; --leg) {
                outvals[(size_t)leg] = rem % out_mods[(size_t)leg]->dim;
                rem /= out_mods[(size_t)leg]->dim;
              }
              nk.resize(nk.size() + out_mods.size());
              for (size_t leg = 0; leg < out_mods.size(); ++leg)
                nk[(size_t)out_slots[(size_t)leg]] = outvals[leg];
              next.push_back({std::move(nk), v * fv});
            }
          }
        }
      }
    }
    state_ = std::move(next);
    sort_merge(state_);
    // consume the in legs
    if (!in_legs.empty()) {
      std::vector<int> dead;
      for (int leg : in_legs) {
        dead.push_back(leg_slot_.at(leg));
        leg_slot_.erase(leg);
      }
      drop_slot_list(dead);
    }
  }

  void exponent_theorem_check() {
    // formula side: Q_D from the linking matrix over red components,
    // L_D from red-blue co-crossings, coupon exponents added identically
    ExponentPoly qf;
    for (int a = 0; a < t_.ncomp; ++a) {
      if (!red_[(size_t)a]) continue;
      for (int b = a; b < t_.ncomp; ++b) {
        if (!red_[(size_t)b]) continue;
        long long coeff = a == b ? 2 * t_.lk[(size_t)a][(size_t)a]
                                 : 2 * (t_.lk[(size_t)a][(size_t)b] + t_.lk[(size_t)b][(size_t)a]);
        if (coeff) qf += ExponentPoly::quadratic(a, b, coeff);
      }
    }
    std::map<int, Rational> lf;
    for (int a = 0; a < t_.ncomp; ++a) {
      if (!red_[(size_t)a]) continue;
      Rational acc(0);
      for (int b = 0; b < t_.ncomp; ++b) {
        if (red_[(size_t)b]) continue;
        acc += Rational(2 * (t_.lk[(size_t)a][(size_t)b] + t_.lk[(size_t)b][(size_t)a])) *
               deg_of(b);
      }
      if (!acc.mod1().is_zero()) lf[a] = acc.mod1();
    }
    for (const auto& use : t_.coupon_uses) {
      const Coupon& cp = d_.coupons[(size_t)use.coupon];
      std::vector<int> perm;
      for (int comp : use.red_comps) perm.push_back(comp);
      ExponentPoly quad_only;
      quad_only.quad = cp.exponent.quad;
      qf += quad_only.relabel(perm);
      for (const auto& [var, lcoef] : cp.exponent.lin) {
        int comp = use.red_comps[(size_t)var];
        lf[comp] = (lf[comp] + lcoef).mod1();
      }
    }
    ExponentPoly diff = sweep_quad_ + (-qf);
    if (!diff.quad.empty())
      throw PropertyViolation("exponent theorem: quadratic part mismatch: sweep " +
                              sweep_quad_.str() + " vs formula " + qf.str());
    for (int c = 0; c < t_.ncomp; ++c) {
      Rational a = sweep_lin_.count(c) ? sweep_lin_.at(c).mod1() : Rational(0);
      Rational b = lf.count(c) ? lf.at(c).mod1() : Rational(0);
      if (!(a == b))
        throw PropertyViolation("exponent theorem: linear class mismatch on component " +
                                std::to_string(c) + ": " + a.str() + " vs " + b.str());
    }
  }

  std::vector<int> coupon_out_legs_;
};

EvalResult Sweep::run() {
  CompatReport rep = check_compatibility(cfg_, d_, t_, om_);
  if (!rep.compatible) {
    std::string what = "incompatible cohomology class:";
    for (const auto& v : rep.violations)
      what += " [component " + std::to_string(v.comp) + ": " + v.what + ", residue " +
              v.residue.str() + "]";
    throw Incompatible(what);
  }
  if (opt_.verify_coupons)
    for (const auto& use : t_.coupon_uses) verify_coupon(use);

  state_.clear();
  state_.push_back({{}, Scalar(1)});
  cols_.clear();
  for (size_t c = 0; c < t_.open_bottom.size(); ++c) {
    int comp = t_.open_bottom[c];
    if (red_[(size_t)comp]) {
      if (bottom_red_arc_ >= 0)
        throw GhinvError("only one open red strand is supported");
      GDegree deg = deg_of(comp);
      int arc = new_arc(comp, interner(deg).intern(Mono{}), 1);
      bottom_red_arc_ = arc;
      cols_.push_back({false, arc});
    } else {
      const WeightModule& mod = module_of(color_[(size_t)comp]);
      auto [phantom, active] = new_leg_pair(comp, mod, Mat::identity(mod.dim));
      bottom_legs_.push_back(leg_slot_.at(phantom));
      leg_slot_.erase(phantom);  // the phantom index is frozen
      cols_.push_back({true, active});
    }
  }

  for (int r = 0; r < (int)d_.rows.size(); ++r) {
    int ci = 0, col = 0;
    std::vector<SlotRef> next_cols;
    for (const auto& e : d_.rows[(size_t)r]) {
      switch (e.kind) {
        case Ev::Id:
          next_cols.push_back(cols_[(size_t)ci]);
          break;
        case Ev::XPos:
        case Ev::XNeg: {
          const CrossingInfo* x = nullptr;
          for (const auto& xc : t_.crossings)
            if (xc.row == r && xc.col == col) x = &xc;
          if (!x) throw GhinvError("internal: missing crossing info");
          int over = x->over_slot();
          SlotRef so = cols_[(size_t)(ci + over)], su = cols_[(size_t)(ci + 1 - over)];
          const PairTable& tab = crossing_table(*x);
          apply_pair_table(tab, so, x->dir[over], deg_of(x->comp[over]), su, x->dir[1 - over],
                           deg_of(x->comp[1 - over]));
          if (opt_.check_exponent_theorem && !overridden_) {
            int eps = x->sign();
            int c0 = x->comp[over], c1 = x->comp[1 - over];
            if (red_[(size_t)c0] && red_[(size_t)c1]) {
              sweep_quad_ += ExponentPoly::quadratic(c0, c1, 2 * (long long)eps);
            } else if (red_[(size_t)c0] != red_[(size_t)c1]) {
              int redc = red_[(size_t)c0] ? c0 : c1;
              int bluec = red_[(size_t)c0] ? c1 : c0;
              sweep_lin_[redc] = (sweep_lin_[redc] + Rational(2 * eps) * deg_of(bluec)).mod1();
            }
          }
          next_cols.push_back(cols_[(size_t)ci + 1]);
          next_cols.push_back(cols_[(size_t)ci]);
          break;
        }
        case Ev::CupL:
        case Ev::CupR: {
          int comp = t_.comp_at[(size_t)r + 1][next_cols.size()];
          bool right = e.kind == Ev::CupR;  // bead g^{-1} on the up (right) leg
          if (red_[(size_t)comp]) {
            GDegree deg = deg_of(comp);
            AlgebraElement b =
                right ? gen_K(cfg_, deg, 2 * (long long)cfg_.ell_prime - 2) : unit(deg);
            int arc = new_arc(comp, interner(deg).intern(b.terms.begin()->first),
                              b.terms.begin()->second);
            next_cols.push_back({false, arc});
            next_cols.push_back({false, arc});
          } else {
            const WeightModule& mod = module_of(color_[(size_t)comp]);
            Mat bead =
                right ? mod.K(cfg_, 2 * (long long)cfg_.ell_prime - 2) : Mat::identity(mod.dim);
            auto [l1, l2] = new_leg_pair(comp, mod, bead);
            next_cols.push_back({true, l1});
            next_cols.push_back({true, l2});
          }
          break;
        }
        case Ev::Cap: {
          SlotRef sl = cols_[(size_t)ci], sr = cols_[(size_t)ci + 1];
          int dl = t_.dir_at[(size_t)r][(size_t)ci];
          int comp = t_.comp_at[(size_t)r][(size_t)ci];
          bool arrow_right = dl > 0;  // left leg flows up: bead g on it
          if (arrow_right) {
            if (red_[(size_t)comp]) {
              GDegree deg = deg_of(comp);
              AlgebraElement g = pivot(cfg_, deg);
              apply_red_bead(sl.id, +1, interner(deg).intern(g.terms.begin()->first), deg,
                             g.terms.begin()->second);
            } else {
              apply_blue_bead(sl.id, module_of(color_[(size_t)comp]).pivot_mat(cfg_));
            }
          }
          if (red_[(size_t)comp]) {
            int arc_up = (arrow_right ? sl : sr).id;
            int arc_dn = (arrow_right ? sr : sl).id;
            GDegree deg = deg_of(comp);
            if (arc_up == arc_dn) {
              close_red(arc_up, deg, comp);
            } else {
              merge_arcs(arc_up, arc_dn, deg);
              // the absorbed arc's other end lives on in the column lists
              for (auto& s : cols_)
                if (!s.blue && s.id == arc_dn) s.id = arc_up;
              for (auto& s : next_cols)
                if (!s.blue && s.id == arc_dn) s.id = arc_up;
            }
          } else {
            close_blue(sl.id, sr.id);
          }
          break;
        }
        case Ev::Coupon: {
          const CouponUse* use = nullptr;
          for (const auto& u : t_.coupon_uses)
            if (u.row == r && u.col == col) use = &u;
          if (!use) throw GhinvError("internal: missing coupon use");
          process_coupon(*use, ci);
          const Coupon& cp = d_.coupons[(size_t)use->coupon];
          for (int tcol = 0; tcol < cp.red_legs; ++tcol)
            next_cols.push_back(cols_[(size_t)(ci + tcol)]);
          for (int id : coupon_out_legs_) next_cols.push_back({true, id});
          break;
        }
      }
      ci += e.in_width(d_);
      ++col;
    }
    cols_ = std::move(next_cols);
  }

  if (opt_.check_exponent_theorem && !overridden_) exponent_theorem_check();

  // assemble the outcome from the remaining open slots
  bool open_red = bottom_red_arc_ >= 0;
  bool open_blue = !bottom_legs_.empty();
  if (open_red && open_blue)
    throw GhinvError("mixed open boundaries are not supported");
  if (open_red) {
    int slot = arc_slot_.at(bottom_red_arc_);
    if (nslots_ != 1) throw GhinvError("unexpected extra open slots");
    GDegree deg = deg_of(arcs_[(size_t)bottom_red_arc_].comp);
    AlgebraElement x(deg);
    MonoInterner& in = interner(deg);
    for (const auto& e : state_) x.add(in.monos[(size_t)e.key[(size_t)slot]], e.amp);
    x.prune();
    result_.open_red = std::move(x);
  } else if (open_blue) {
    if (bottom_legs_.size() != 1 || nslots_ != 2)
      throw GhinvError("only (1,1) blue cut presentations are supported");
    int bslot = bottom_legs_[0];
    int tslot = 1 - bslot;
    if (cols_.size() != 1 || !cols_[0].blue)
      throw GhinvError("open blue strand does not reach the top boundary");
    const WeightModule& mod = *legs_[(size_t)cols_[0].id].mod;
    Mat m(mod.dim, mod.dim);
    for (const auto& e : state_) m(e.key[(size_t)tslot], e.key[(size_t)bslot]) += e.amp;
    result_.open_blue = m;
    result_.open_blue_color = mod.name;
  } else {
    if (nslots_ != 0) throw GhinvError("diagram left unconsumed strands");
    Scalar s = 0;
    for (const auto& e : state_) s += e.amp;
    result_.scalar = s;
  }
  return std::move(result_);
}

}  // namespace

// ---- engine API ---------------------------------------------------------------

EvalResult Engine::f_mu(const BichromeDiagram& d, const CohomologyAssignment& omega,
                        const std::map<int, std::string>& color_override) {
  Traced t = analyze(d);
  Sweep sweep(cfg_, *tables_, d, t, omega, color_override, options);
  return sweep.run();
}

InvariantReport Engine::hennings_invariant(const BichromeDiagram& d,
                                           const CohomologyAssignment& omega) {
  auto t0 = std::chrono::steady_clock::now();
  Traced t = analyze(d);
  InvariantReport rep;
  rep.path = "plain_H";
  Inertia in = surgery_inertia(d, t);
  rep.signature = in.signature();
  rep.delta_used = delta();
  EvalResult ev = f_mu(d, omega);
  if (ev.open_red || ev.open_blue)
    throw GhinvError("hennings_invariant expects a closed diagram");
  rep.value = anomaly_norm(in) * ev.scalar;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

InvariantReport Engine::modified_invariant(const BichromeDiagram& d,
                                           const CohomologyAssignment& omega) {
  auto t0 = std::chrono::steady_clock::now();
  Traced t = analyze(d);
  InvariantReport rep;
  Inertia in = surgery_inertia(d, t);
  rep.signature = in.signature();
  rep.delta_used = delta();
  Admissibility adm = check_admissibility(cfg_, d, t, omega, cache_);
  rep.admissibility = adm == Admissibility::Both           ? "both"
                      : adm == Admissibility::GraphAdmissible ? "graph"
                      : adm == Admissibility::GAdmissible     ? "G"
                                                              : "none";
  if (t.open_bottom.size() != 1 || t.open_top.size() != 1 ||
      t.open_bottom[0] != t.open_top[0])
    throw NotAdmissible("modified invariant needs a (1,1) cutting presentation");
  int cut = t.open_bottom[0];
  EvalResult ev = f_mu(d, omega);
  Scalar dpow = anomaly_norm(in);
  if (t.red[(size_t)cut]) {
    if (!ev.open_red) throw GhinvError("internal: missing open red factor");
    GDegree deg = omega.at(cut).mod1();
    if (!cache_.degree_semisimple(deg))
      throw NotAdmissible("cut red edge has a non-semisimple degree " + deg.str());
    rep.path = "modified_red_cut";
    if (!ev.open_red->fractional_free())
      throw FractionalResidue("open red factor has fractional Cartan content");
    rep.value = dpow * modified_integral(cfg_, cache_.at(deg), *ev.open_red);
  } else {
    if (!ev.open_blue) throw GhinvError("internal: missing open blue morphism");
    const WeightModule& mod = parse_module(cfg_, t.color[(size_t)cut]);
    if (!mod.simple || !cache_.degree_semisimple(mod.degree))
      throw NotAdmissible("cut blue edge is not colored by a projective module");
    rep.path = "modified_graph_cut";
    rep.value = dpow * m_trace(cfg_, cache_.at(mod.degree), mod, *ev.open_blue);
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

InvariantReport Engine::cgp_oracle(const BichromeDiagram& d, const CohomologyAssignment& omega) {
  auto t0 = std::chrono::steady_clock::now();
  Traced t = analyze(d);
  InvariantReport rep;
  rep.path = "cgp_oracle";
  Inertia in = surgery_inertia(d, t);
  rep.signature = in.signature();
  rep.delta_used = delta();
  if (t.open_bottom.size() != 1 || t.open_top.size() != 1 || t.red[(size_t)t.open_bottom[0]])
    throw NotAdmissible("the oracle needs a blue (1,1) cutting presentation");
  // every closed red component must be a surgery component at a semisimple degree
  std::vector<int> reds;
  for (int c = 0; c < t.ncomp; ++c)
    if (t.red[(size_t)c]) {
      if (!t.closed[(size_t)c])
        throw NotAdmissible("oracle: open red strands are not supported");
      if (std::find(d.surgery.begin(), d.surgery.end(), c) == d.surgery.end())
        throw NotAdmissible("oracle: the graph must be monochrome blue");
      GDegree deg = omega.at(c).mod1();
      if (!cache_.degree_semisimple(deg))
        throw NotSemisimple("oracle: surgery degree " + deg.str() + " is not semisimple");
      reds.push_back(c);
    }
  const WeightModule& cutmod = parse_module(cfg_, t.color[(size_t)t.open_bottom[0]]);
  Mat total(cutmod.dim, cutmod.dim);
  // sum over Kirby-color assignments: each red component is replaced by a
  // typical block, weighted by its modified dimension
  std::vector<int> assign(reds.size(), 0);
  bool done = false;
  while (!done) {
    std::map<int, std::string> override_colors;
    Scalar weight = 1;
    for (size_t i = 0; i < reds.size(); ++i) {
      GDegree deg = omega.at(reds[i]).mod1();
      const auto& data = cache_.at(deg);
      int k = assign[i];
      override_colors[reds[i]] = data.dec.blocks[(size_t)k].name;
      weight *= data.mod_dims[(size_t)k];
    }
    EvalResult ev = f_mu(d, omega, override_colors);
    if (!ev.open_blue) throw GhinvError("internal: oracle expected a blue morphism");
    total = total + *ev.open_blue * weight;
    // next assignment
    done = true;
    for (size_t i = 0; i < assign.size(); ++i) {
      if (++assign[i] < cfg_.ell) {
        done = false;
        break;
      }
      assign[i] = 0;
    }
    if (assign.empty()) break;
  }
  rep.value = anomaly_norm(in) * m_trace(cfg_, cache_.at(cutmod.degree), cutmod, total);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::pair<Scalar, Scalar> Engine::connected_sum_check(const BichromeDiagram& sp1,
                                                      const CohomologyAssignment& om1,
                                                      const BichromeDiagram& sp2,
                                                      const CohomologyAssignment& om2) {
  BichromeDiagram a = sp1, b = sp2;
  a.omega = om1;
  b.omega = om2;
  UnionResult u = diagram_union(a, b);
  InvariantReport lhs = modified_invariant(u.d, u.d.omega);
  InvariantReport h1 = modified_invariant(sp1, om1);
  InvariantReport h2 = hennings_invariant(sp2, om2);
  return {lhs.value, h1.value * h2.value};
}

}  // namespace ghinv
