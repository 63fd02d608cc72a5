#include "ghinv/diagrams.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "ghinv/errors.hpp"
#include "ghinv/integrals.hpp"
#include "ghinv/modules_catalog.hpp"

namespace ghinv {

int Event::in_width(const BichromeDiagram& d) const {
  switch (kind) {
    case Ev::Id: return 1;
    case Ev::XPos:
    case Ev::XNeg:
    case Ev::Cap: return 2;
    case Ev::CupL:
    case Ev::CupR: return 0;
    case Ev::Coupon:
      return d.coupons[(size_t)coupon].red_legs + (int)d.coupons[(size_t)coupon].blue_in.size();
  }
  return 0;
}

int Event::out_width(const BichromeDiagram& d) const {
  switch (kind) {
    case Ev::Id: return 1;
    case Ev::XPos:
    case Ev::XNeg: return 2;
    case Ev::Cap: return 0;
    case Ev::CupL:
    case Ev::CupR: return 2;
    case Ev::Coupon:
      return d.coupons[(size_t)coupon].red_legs + (int)d.coupons[(size_t)coupon].blue_out.size();
  }
  return 0;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[(size_t)x] != x) x = parent[(size_t)x] = parent[(size_t)parent[(size_t)x]];
    return x;
  }
  void unite(int a, int b) { parent[(size_t)find(a)] = find(b); }
};

std::vector<int> boundary_widths(const BichromeDiagram& d) {
  std::vector<int> w;
  w.push_back((int)d.open_colors.size());
  for (size_t r = 0; r < d.rows.size(); ++r) {
    int in = 0, out = 0;
    for (const auto& e : d.rows[r]) {
      if (e.kind == Ev::Coupon && (e.coupon < 0 || e.coupon >= (int)d.coupons.size()))
        throw ParseError("coupon reference out of range", (int)r);
    }
    for (const auto& e : d.rows[r]) {
      in += e.in_width(d);
      out += e.out_width(d);
    }
    if (in != w.back())
      throw ParseError("slice widths do not compose: row consumes " + std::to_string(in) +
                           " strands, " + std::to_string(w.back()) + " available",
                       (int)r);
    w.push_back(out);
  }
  return w;
}

}  // namespace

Traced analyze(const BichromeDiagram& d) {
  const auto widths = boundary_widths(d);
  const int nb = (int)widths.size();
  std::vector<int> offset(widths.size() + 1, 0);
  for (int b = 0; b < nb; ++b) offset[(size_t)b + 1] = offset[(size_t)b] + widths[(size_t)b];
  const int npos = offset[(size_t)nb];
  auto pos = [&](int b, int c) { return offset[(size_t)b] + c; };

  UnionFind uf(npos);
  // connect strand positions through events (blue edges stop at coupons)
  for (int r = 0; r + 1 < nb; ++r) {
    int ci = 0, co = 0;
    for (const auto& e : d.rows[(size_t)r]) {
      switch (e.kind) {
        case Ev::Id: uf.unite(pos(r, ci), pos(r + 1, co)); break;
        case Ev::XPos:
        case Ev::XNeg:
          uf.unite(pos(r, ci), pos(r + 1, co + 1));
          uf.unite(pos(r, ci + 1), pos(r + 1, co));
          break;
        case Ev::CupL:
        case Ev::CupR: uf.unite(pos(r + 1, co), pos(r + 1, co + 1)); break;
        case Ev::Cap: uf.unite(pos(r, ci), pos(r, ci + 1)); break;
        case Ev::Coupon: {
          const Coupon& cp = d.coupons[(size_t)e.coupon];
          for (int t = 0; t < cp.red_legs; ++t) uf.unite(pos(r, ci + t), pos(r + 1, co + t));
          break;
        }
      }
      ci += e.in_width(d);
      co += e.out_width(d);
    }
  }

  Traced tr;
  // canonical component numbering: bottom boundary left to right, then first
  // appearance of cups / coupon blue outputs scanning rows bottom to top
  std::vector<int> comp_of_class((size_t)npos, -1);
  auto assign = [&](int b, int c) {
    int root = uf.find(pos(b, c));
    if (comp_of_class[(size_t)root] < 0) comp_of_class[(size_t)root] = tr.ncomp++;
    return comp_of_class[(size_t)root];
  };
  for (int c = 0; c < widths[0]; ++c) tr.open_bottom.push_back(assign(0, c));
  for (int r = 0; r + 1 < nb; ++r) {
    int co = 0;
    for (const auto& e : d.rows[(size_t)r]) {
      if (e.kind == Ev::CupL || e.kind == Ev::CupR) assign(r + 1, co);
      if (e.kind == Ev::Coupon) {
        const Coupon& cp = d.coupons[(size_t)e.coupon];
        for (int t = 0; t < (int)cp.blue_out.size(); ++t) assign(r + 1, co + cp.red_legs + t);
      }
      co += e.out_width(d);
    }
  }
  // every position must now be reachable
  tr.comp_at.assign((size_t)nb, {});
  for (int b = 0; b < nb; ++b) {
    tr.comp_at[(size_t)b].resize((size_t)widths[(size_t)b]);
    for (int c = 0; c < widths[(size_t)b]; ++c) {
      int root = uf.find(pos(b, c));
      if (comp_of_class[(size_t)root] < 0)
        throw ParseError("strand with no origin (missing cup or boundary)", b, c);
      tr.comp_at[(size_t)b][(size_t)c] = comp_of_class[(size_t)root];
    }
  }
  for (int c = 0; c < widths[(size_t)nb - 1]; ++c)
    tr.open_top.push_back(tr.comp_at[(size_t)nb - 1][(size_t)c]);

  // orientation propagation
  tr.dir_at.assign((size_t)nb, {});
  tr.dir_at[0].assign((size_t)widths[0], +1);
  for (int r = 0; r + 1 < nb; ++r) {
    tr.dir_at[(size_t)r + 1].assign((size_t)widths[(size_t)r + 1], 0);
    int ci = 0, co = 0, col = 0;
    for (const auto& e : d.rows[(size_t)r]) {
      auto din = [&](int t) { return tr.dir_at[(size_t)r][(size_t)(ci + t)]; };
      auto& dout = tr.dir_at[(size_t)r + 1];
      switch (e.kind) {
        case Ev::Id: dout[(size_t)co] = din(0); break;
        case Ev::XPos:
        case Ev::XNeg: {
          dout[(size_t)co] = din(1);
          dout[(size_t)co + 1] = din(0);
          CrossingInfo x;
          x.row = r;
          x.col = col;
          x.pattern = e.kind == Ev::XPos ? +1 : -1;
          x.comp[0] = tr.comp_at[(size_t)r][(size_t)ci];
          x.comp[1] = tr.comp_at[(size_t)r][(size_t)ci + 1];
          x.dir[0] = din(0);
          x.dir[1] = din(1);
          tr.crossings.push_back(x);
          break;
        }
        case Ev::CupL:
          dout[(size_t)co] = +1;
          dout[(size_t)co + 1] = -1;
          tr.cupcaps.push_back({r, col, true, tr.comp_at[(size_t)r + 1][(size_t)co], -1});
          break;
        case Ev::CupR:
          dout[(size_t)co] = -1;
          dout[(size_t)co + 1] = +1;
          tr.cupcaps.push_back({r, col, true, tr.comp_at[(size_t)r + 1][(size_t)co], +1});
          break;
        case Ev::Cap: {
          if (din(0) * din(1) != -1)
            throw ParseError("inconsistent orientation at cap", r, col);
          // left leg flowing up means the arrow points right
          tr.cupcaps.push_back({r, col, false, tr.comp_at[(size_t)r][(size_t)ci], din(0)});
          break;
        }
        case Ev::Coupon: {
          const Coupon& cp = d.coupons[(size_t)e.coupon];
          CouponUse use;
          use.row = r;
          use.col = col;
          use.coupon = e.coupon;
          for (int t = 0; t < cp.red_legs + (int)cp.blue_in.size(); ++t) {
            if (din(t) != +1) throw ParseError("coupon legs must be oriented upward", r, col);
            if (t < cp.red_legs)
              use.red_comps.push_back(tr.comp_at[(size_t)r][(size_t)(ci + t)]);
            else
              use.blue_in_comps.push_back(tr.comp_at[(size_t)r][(size_t)(ci + t)]);
          }
          for (int t = 0; t < cp.red_legs + (int)cp.blue_out.size(); ++t) {
            dout[(size_t)(co + t)] = +1;
            if (t >= cp.red_legs)
              use.blue_out_comps.push_back(tr.comp_at[(size_t)r + 1][(size_t)(co + t)]);
          }
          tr.coupon_uses.push_back(use);
          break;
        }
      }
      ci += e.in_width(d);
      co += e.out_width(d);
      ++col;
    }
  }

  // colors: explicit map, bottom-boundary declarations, coupon leg specs
  tr.color.assign((size_t)tr.ncomp, "red");
  std::vector<bool> color_set((size_t)tr.ncomp, false);
  auto set_color = [&](int comp, const std::string& spec, int row, int col) {
    std::string s = spec.rfind("blue:", 0) == 0 ? spec.substr(5) : spec;
    if (color_set[(size_t)comp] && tr.color[(size_t)comp] != s)
      throw ParseError("conflicting colors for component " + std::to_string(comp), row, col);
    tr.color[(size_t)comp] = s;
    color_set[(size_t)comp] = true;
  };
  for (size_t c = 0; c < d.open_colors.size(); ++c)
    set_color(tr.open_bottom[c], d.open_colors[c], 0, (int)c);
  for (const auto& [comp, spec] : d.colors) {
    if (comp < 0 || comp >= tr.ncomp)
      throw ParseError("color entry for unknown component " + std::to_string(comp));
    set_color(comp, spec, -1, -1);
  }
  for (const auto& use : tr.coupon_uses) {
    const Coupon& cp = d.coupons[(size_t)use.coupon];
    for (int t = 0; t < (int)use.red_comps.size(); ++t) set_color(use.red_comps[(size_t)t], "red", use.row, use.col);
    for (int t = 0; t < (int)use.blue_in_comps.size(); ++t)
      set_color(use.blue_in_comps[(size_t)t], cp.blue_in[(size_t)t], use.row, use.col);
    for (int t = 0; t < (int)use.blue_out_comps.size(); ++t)
      set_color(use.blue_out_comps[(size_t)t], cp.blue_out[(size_t)t], use.row, use.col);
  }
  tr.red.assign((size_t)tr.ncomp, true);
  for (int c = 0; c < tr.ncomp; ++c) tr.red[(size_t)c] = tr.color[(size_t)c] == "red";

  // closedness: open boundary or coupon-attached blue edges are not closed
  tr.closed.assign((size_t)tr.ncomp, true);
  for (int c : tr.open_bottom) tr.closed[(size_t)c] = false;
  for (int c : tr.open_top) tr.closed[(size_t)c] = false;
  for (const auto& use : tr.coupon_uses) {
    for (int c : use.blue_in_comps) tr.closed[(size_t)c] = false;
    for (int c : use.blue_out_comps) tr.closed[(size_t)c] = false;
  }

  // surgery components must be red; an open one is allowed as the cut strand
  // of a cutting presentation
  for (int c : d.surgery) {
    if (c < 0 || c >= tr.ncomp || !tr.red[(size_t)c])
      throw ParseError("surgery component " + std::to_string(c) + " is not a red component");
  }

  // linking matrix: lk[i][j] = signed crossings where j passes over i
  tr.lk.assign((size_t)tr.ncomp, std::vector<long long>((size_t)tr.ncomp, 0));
  for (const auto& x : tr.crossings) {
    int over = x.comp[x.over_slot()], under = x.comp[1 - x.over_slot()];
    tr.lk[(size_t)under][(size_t)over] += x.sign();
  }
  return tr;
}

std::vector<std::vector<long long>> linking_matrix(const BichromeDiagram& d) {
  return analyze(d).lk;
}

// eigenvalue signs of the real symmetric surgery block via Jacobi iteration
Inertia surgery_inertia(const BichromeDiagram& d, const Traced& t) {
  const int n = (int)d.surgery.size();
  if (n == 0) return {};
  std::vector<std::vector<double>> a((size_t)n, std::vector<double>((size_t)n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a[(size_t)i][(size_t)j] =
          (double)(t.lk[(size_t)d.surgery[(size_t)i]][(size_t)d.surgery[(size_t)j]] +
                   t.lk[(size_t)d.surgery[(size_t)j]][(size_t)d.surgery[(size_t)i]]) /
          2.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a[(size_t)i][(size_t)j] * a[(size_t)i][(size_t)j];
    if (off < 1e-18) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a[(size_t)p][(size_t)q]) < 1e-15) continue;
        double theta = 0.5 * std::atan2(2 * a[(size_t)p][(size_t)q],
                                        a[(size_t)q][(size_t)q] - a[(size_t)p][(size_t)p]);
        double c = std::cos(theta), s = std::sin(theta);
        for (int k = 0; k < n; ++k) {
          double akp = a[(size_t)k][(size_t)p], akq = a[(size_t)k][(size_t)q];
          a[(size_t)k][(size_t)p] = c * akp - s * akq;
          a[(size_t)k][(size_t)q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a[(size_t)p][(size_t)k], aqk = a[(size_t)q][(size_t)k];
          a[(size_t)p][(size_t)k] = c * apk - s * aqk;
          a[(size_t)q][(size_t)k] = s * apk + c * aqk;
        }
      }
  }
  Inertia in;
  for (int i = 0; i < n; ++i) {
    if (a[(size_t)i][(size_t)i] > 1e-9) ++in.plus;
    if (a[(size_t)i][(size_t)i] < -1e-9) ++in.minus;
  }
  return in;
}

int surgery_signature(const BichromeDiagram& d, const Traced& t) {
  return surgery_inertia(d, t).signature();
}

static GDegree color_degree(const RootConfig& cfg, const std::string& spec) {
  return parse_module(cfg, spec).degree;
}

CompatReport check_compatibility(const RootConfig& cfg, const BichromeDiagram& d, const Traced& t,
                                 const CohomologyAssignment& omega) {
  CompatReport rep;
  // meridian values: omega for red, color degree for blue
  std::vector<Rational> val((size_t)t.ncomp, Rational(0));
  for (int c = 0; c < t.ncomp; ++c) {
    if (t.red[(size_t)c]) {
      val[(size_t)c] = omega.at(c).mod1();
    } else {
      GDegree deg = color_degree(cfg, t.color[(size_t)c]);
      val[(size_t)c] = deg;
      auto it = omega.values.find(c);
      if (it != omega.values.end() && !(it->second.mod1() == deg)) {
        rep.compatible = false;
        rep.violations.push_back(
            {c, (it->second - deg).mod1(), "blue edge degree differs from omega on its meridian"});
      }
    }
  }
  // coupon exponent contributions f_i per component
  std::vector<Rational> fc((size_t)t.ncomp, Rational(0));
  for (const auto& use : t.coupon_uses) {
    const Coupon& cp = d.coupons[(size_t)use.coupon];
    std::vector<Rational> legvals;
    for (int comp : use.red_comps) legvals.push_back(val[(size_t)comp]);
    ExponentPoly quad_only;
    quad_only.quad = cp.exponent.quad;
    ExponentPoly pol = polarize(quad_only, legvals);
    for (int leg = 0; leg < cp.red_legs; ++leg) {
      Rational coeff(0);
      if (auto it = pol.lin.find(leg); it != pol.lin.end()) coeff += it->second;
      if (auto it = cp.exponent.lin.find(leg); it != cp.exponent.lin.end()) coeff += it->second;
      fc[(size_t)use.red_comps[(size_t)leg]] += coeff;
    }
  }
  // condition (2) for every closed red component
  for (int i = 0; i < t.ncomp; ++i) {
    if (!t.red[(size_t)i] || !t.closed[(size_t)i]) continue;
    Rational parallel(0);
    for (int k = 0; k < t.ncomp; ++k)
      parallel += Rational(t.lk[(size_t)i][(size_t)k]) * val[(size_t)k];
    Rational residue = (Rational(4) * parallel + fc[(size_t)i]).mod1();
    if (!residue.is_zero()) {
      rep.compatible = false;
      rep.violations.push_back({i, residue, "parallel condition fails"});
    }
  }
  return rep;
}

Admissibility check_admissibility(const RootConfig& cfg, const BichromeDiagram& d, const Traced& t,
                                  const CohomologyAssignment& omega, IntegralCache& cache) {
  (void)d;
  bool graph = false, gadm = false;
  for (int c = 0; c < t.ncomp; ++c) {
    if (!t.red[(size_t)c]) {
      WeightModule m = parse_module(cfg, t.color[(size_t)c]);
      if (m.simple && cache.degree_semisimple(m.degree)) graph = true;
    } else if (t.closed[(size_t)c] && cache.degree_semisimple(omega.at(c).mod1())) {
      gadm = true;
    }
  }
  if (graph && gadm) return Admissibility::Both;
  if (graph) return Admissibility::GraphAdmissible;
  if (gadm) return Admissibility::GAdmissible;
  return Admissibility::None;
}

// ---- Kirby moves -----------------------------------------------------------

static BichromeDiagram kink_unknot(int sign) {
  // the circle's legs run antiparallel: x- gives writhe +1
  BichromeDiagram d;
  d.rows.push_back({Event{Ev::CupL}});
  d.rows.push_back({Event{sign > 0 ? Ev::XNeg : Ev::XPos}});
  d.rows.push_back({Event{Ev::Cap}});
  return d;
}

UnionResult diagram_union(const BichromeDiagram& a, const BichromeDiagram& b) {
  Traced ta = analyze(a), tb = analyze(b);
  UnionResult out;
  BichromeDiagram& u = out.d;
  const size_t rows = std::max(a.rows.size(), b.rows.size());
  auto top_width = [](const BichromeDiagram&, const Traced& t) {
    return (int)t.comp_at.back().size();
  };
  int wa_top = top_width(a, ta), wb_top = top_width(b, tb);
  for (size_t r = 0; r < rows; ++r) {
    std::vector<Event> row;
    if (r < a.rows.size())
      row = a.rows[r];
    else
      row.assign((size_t)wa_top, Event{Ev::Id});
    std::vector<Event> brow;
    if (r < b.rows.size())
      brow = b.rows[r];
    else
      brow.assign((size_t)wb_top, Event{Ev::Id});
    for (auto e : brow) {
      if (e.kind == Ev::Coupon) e.coupon += (int)a.coupons.size();
      row.push_back(e);
    }
    u.rows.push_back(std::move(row));
  }
  u.open_colors = a.open_colors;
  for (const auto& c : b.open_colors) u.open_colors.push_back(c);
  u.coupons = a.coupons;
  for (const auto& c : b.coupons) u.coupons.push_back(c);
  Traced tu = analyze(u);
  // remap via anchor positions
  auto remap_from = [&](const Traced& t, int row_off, auto col_off) {
    std::map<int, int> remap;
    for (size_t b2 = 0; b2 < t.comp_at.size(); ++b2)
      for (size_t c = 0; c < t.comp_at[b2].size(); ++c) {
        int comp = t.comp_at[b2][c];
        if (!remap.count(comp))
          remap[comp] = tu.comp_at[b2 + (size_t)row_off][(size_t)((int)c + col_off((int)b2))];
      }
    return remap;
  };
  auto wa_at = [&](int b2) {
    return b2 < (int)ta.comp_at.size() ? (int)ta.comp_at[(size_t)b2].size() : wa_top;
  };
  out.remap_a = remap_from(ta, 0, [&](int) { return 0; });
  out.remap_b = remap_from(tb, 0, wa_at);
  // carry colors, surgery, omega through the remaps
  for (const auto& [c, s] : a.colors) u.colors[out.remap_a.at(c)] = s;
  for (const auto& [c, s] : b.colors) u.colors[out.remap_b.at(c)] = s;
  for (int c : a.surgery) u.surgery.push_back(out.remap_a.at(c));
  for (int c : b.surgery) u.surgery.push_back(out.remap_b.at(c));
  for (const auto& [c, v] : a.omega.values) u.omega.values[out.remap_a.at(c)] = v;
  for (const auto& [c, v] : b.omega.values) u.omega.values[out.remap_b.at(c)] = v;
  return out;
}

namespace {

// Double the closed red component `comp` into two blackboard-parallel cables.
// Returns the new diagram plus position maps (per old boundary: new boundary
// index and new start column of each old column).
struct Doubled {
  BichromeDiagram d;
  std::vector<int> row_of;               // old boundary -> new boundary
  std::vector<std::vector<int>> col_of;  // old boundary -> old col -> new col
};

Doubled double_component(const BichromeDiagram& d, const Traced& t, int comp) {
  Doubled out;
  out.d.open_colors = d.open_colors;  // comp is closed, no boundary strands of it
  out.d.coupons = d.coupons;
  const int nb = (int)t.comp_at.size();
  out.row_of.resize((size_t)nb);
  out.col_of.resize((size_t)nb);
  auto expand = [&](int b, int c) { return t.comp_at[(size_t)b][(size_t)c] == comp ? 2 : 1; };
  for (int b = 0; b < nb; ++b) {
    int acc = 0;
    out.col_of[(size_t)b].resize(t.comp_at[(size_t)b].size());
    for (size_t c = 0; c < t.comp_at[(size_t)b].size(); ++c) {
      out.col_of[(size_t)b][c] = acc;
      acc += expand(b, (int)c);
    }
  }
  out.row_of[0] = 0;
  for (int r = 0; r + 1 < nb; ++r) {
    // per-event involvement, tracked with explicit in/out columns
    int nsub = 1;
    {
      int ci = 0, co = 0;
      for (const auto& e : d.rows[(size_t)r]) {
        bool on0 = e.in_width(d) > 0 && t.comp_at[(size_t)r][(size_t)ci] == comp;
        bool on1 = e.in_width(d) > 1 && t.comp_at[(size_t)r][(size_t)ci + 1] == comp;
        bool cup_on = (e.kind == Ev::CupL || e.kind == Ev::CupR) &&
                      t.comp_at[(size_t)r + 1][(size_t)co] == comp;
        if ((e.kind == Ev::XPos || e.kind == Ev::XNeg) && on0 && on1)
          nsub = std::max(nsub, 3);
        else if ((e.kind == Ev::XPos || e.kind == Ev::XNeg) && (on0 || on1))
          nsub = std::max(nsub, 2);
        else if (e.kind == Ev::Cap && on0)
          nsub = std::max(nsub, 2);
        else if (cup_on)
          nsub = std::max(nsub, 2);
        ci += e.in_width(d);
        co += e.out_width(d);
      }
    }
    std::vector<std::vector<Event>> sub((size_t)nsub);
    int ci = 0, co = 0;
    for (const auto& e : d.rows[(size_t)r]) {
      const int iw = e.in_width(d), ow = e.out_width(d);
      int ow_exp = 0;
      for (int tcol = 0; tcol < ow; ++tcol) ow_exp += expand(r + 1, co + tcol);
      bool on0 = iw > 0 && t.comp_at[(size_t)r][(size_t)ci] == comp;
      bool on1 = iw > 1 && t.comp_at[(size_t)r][(size_t)ci + 1] == comp;
      auto ids = [&](int subrow, int count) {
        for (int c = 0; c < count; ++c) sub[(size_t)subrow].push_back(Event{Ev::Id});
      };
      auto pad_rest = [&](int from_subrow) {
        for (int s = from_subrow; s < nsub; ++s) ids(s, ow_exp);
      };
      switch (e.kind) {
        case Ev::Id:
          ids(0, ow_exp);
          pad_rest(1);
          break;
        case Ev::CupL:
        case Ev::CupR: {
          bool on = t.comp_at[(size_t)r + 1][(size_t)co] == comp;
          if (!on) {
            sub[0].push_back(e);
            pad_rest(1);
          } else {
            sub[0].push_back(e);  // outer cup
            sub[1].push_back(Event{Ev::Id});
            sub[1].push_back(e);  // inner cup, same orientation
            sub[1].push_back(Event{Ev::Id});
            pad_rest(2);
          }
          break;
        }
        case Ev::Cap: {
          if (!on0) {
            sub[0].push_back(e);
            pad_rest(1);
          } else {
            sub[0].push_back(Event{Ev::Id});
            sub[0].push_back(Event{Ev::Cap});  // inner cap
            sub[0].push_back(Event{Ev::Id});
            sub[1].push_back(Event{Ev::Cap});  // outer cap
            pad_rest(2);
          }
          break;
        }
        case Ev::XPos:
        case Ev::XNeg: {
          Event x{e.kind};
          if (on0 && on1) {  // self-crossing: full 2-cable of the crossing
            sub[0].push_back(Event{Ev::Id});
            sub[0].push_back(x);
            sub[0].push_back(Event{Ev::Id});
            sub[1].push_back(x);
            sub[1].push_back(x);
            sub[2].push_back(Event{Ev::Id});
            sub[2].push_back(x);
            sub[2].push_back(Event{Ev::Id});
          } else if (on0) {  // doubled strand enters on the left
            sub[0].push_back(Event{Ev::Id});
            sub[0].push_back(x);
            sub[1].push_back(x);
            sub[1].push_back(Event{Ev::Id});
            pad_rest(2);
          } else if (on1) {  // doubled strand enters on the right
            sub[0].push_back(x);
            sub[0].push_back(Event{Ev::Id});
            sub[1].push_back(Event{Ev::Id});
            sub[1].push_back(x);
            pad_rest(2);
          } else {
            sub[0].push_back(x);
            pad_rest(1);
          }
          break;
        }
        case Ev::Coupon:
          sub[0].push_back(e);
          pad_rest(1);
          break;
      }
      ci += iw;
      co += ow;
    }
    for (auto& srow : sub) out.d.rows.push_back(std::move(srow));
    out.row_of[(size_t)r + 1] = (int)out.d.rows.size();
  }
  return out;
}

}  // namespace

std::pair<BichromeDiagram, CohomologyAssignment> kirby_move(const RootConfig& cfg,
                                                            const BichromeDiagram& d,
                                                            const CohomologyAssignment& omega,
                                                            const KirbyMove& move) {
  Traced t = analyze(d);
  auto require_closed_red_bare = [&](int comp) {
    if (comp < 0 || comp >= t.ncomp || !t.red[(size_t)comp] || !t.closed[(size_t)comp])
      throw MoveNotApplicable("component " + std::to_string(comp) +
                              " is not a closed red component");
    for (const auto& use : t.coupon_uses)
      for (int c : use.red_comps)
        if (c == comp)
          throw MoveNotApplicable("component " + std::to_string(comp) + " passes a coupon");
  };
  switch (move.kind) {
    case KirbyMove::K0: {
      require_closed_red_bare(move.comp);
      BichromeDiagram out = d;
      // flip the declared orientation of every cup on this component
      for (const auto& cc : t.cupcaps) {
        if (!cc.is_cup || cc.comp != move.comp) continue;
        Event& e = out.rows[(size_t)cc.row][(size_t)cc.col];
        e.kind = e.kind == Ev::CupL ? Ev::CupR : Ev::CupL;
      }
      CohomologyAssignment om = omega;
      om.values[move.comp] = (-omega.at(move.comp)).mod1();
      out.omega = om;
      return {out, om};
    }
    case KirbyMove::KIPlus:
    case KirbyMove::KIMinus: {
      BichromeDiagram kink = kink_unknot(move.kind == KirbyMove::KIPlus ? +1 : -1);
      UnionResult u = diagram_union(d, kink);
      CohomologyAssignment om;
      for (const auto& [c, v] : omega.values) om.values[u.remap_a.at(c)] = v;
      // the stabilizing unknot is the single component of the kink
      int stab = u.remap_b.at(0);
      om.values[stab] = Rational(0);
      u.d.surgery.push_back(stab);
      u.d.omega = om;
      return {u.d, om};
    }
    case KirbyMove::KII: {
      require_closed_red_bare(move.comp);
      if (move.edge < 0 || move.edge >= t.ncomp || move.edge == move.comp)
        throw MoveNotApplicable("invalid edge for a handle slide");
      // double the component into two parallel cables
      Doubled dd = double_component(d, t, move.comp);
      Traced t2 = analyze(dd.d);
      // identify the cables and the slid edge in the doubled diagram
      int anchor_b = -1, anchor_c = -1;
      for (int b = 0; b < (int)t.comp_at.size() && anchor_b < 0; ++b)
        for (int c = 0; c < (int)t.comp_at[(size_t)b].size(); ++c)
          if (t.comp_at[(size_t)b][(size_t)c] == move.comp) {
            anchor_b = b;
            anchor_c = c;
            break;
          }
      int cableA = t2.comp_at[(size_t)dd.row_of[(size_t)anchor_b]]
                             [(size_t)dd.col_of[(size_t)anchor_b][(size_t)anchor_c]];
      int cableB = t2.comp_at[(size_t)dd.row_of[(size_t)anchor_b]]
                             [(size_t)dd.col_of[(size_t)anchor_b][(size_t)anchor_c] + 1];
      auto remap_old = [&](int oldc) -> int {
        for (int b = 0; b < (int)t.comp_at.size(); ++b)
          for (int c = 0; c < (int)t.comp_at[(size_t)b].size(); ++c)
            if (t.comp_at[(size_t)b][(size_t)c] == oldc)
              return t2.comp_at[(size_t)dd.row_of[(size_t)b]]
                               [(size_t)dd.col_of[(size_t)b][(size_t)c]];
        throw MoveNotApplicable("component vanished while doubling");
      };
      int edge2 = remap_old(move.edge);
      // find a boundary where the edge and the inner cable run antiparallel
      int sb = -1, se = -1, sa = -1, inner = -1;
      for (int b = 0; b < (int)t2.comp_at.size() && sb < 0; ++b) {
        for (int ce = 0; ce < (int)t2.comp_at[(size_t)b].size() && sb < 0; ++ce) {
          if (t2.comp_at[(size_t)b][(size_t)ce] != edge2) continue;
          for (int ca = 0; ca < (int)t2.comp_at[(size_t)b].size(); ++ca) {
            int cc = t2.comp_at[(size_t)b][(size_t)ca];
            if (cc != cableA && cc != cableB) continue;
            if (t2.dir_at[(size_t)b][(size_t)ca] == -t2.dir_at[(size_t)b][(size_t)ce]) {
              sb = b;
              se = ce;
              sa = ca;
              inner = cc;
              break;
            }
          }
        }
      }
      if (sb < 0) throw MoveNotApplicable("no slice where the edge can reach the cable");
      // build the reroute + saddle + reroute-back block at boundary sb
      const int W = (int)t2.comp_at[(size_t)sb].size();
      std::vector<std::vector<Event>> block;
      auto id_row_with = [&](int at, Ev kind) {
        std::vector<Event> row;
        for (int c = 0; c < W; ++c) {
          if (c == at) {
            row.push_back(Event{kind});
            if (kind != Ev::Id) ++c;  // crossing/cap/cup spans 2 columns
          } else
            row.push_back(Event{Ev::Id});
        }
        return row;
      };
      int cur = se;
      std::vector<int> path;  // crossing columns on the way out
      while (cur + 1 < sa) {  // move right over everything
        block.push_back(id_row_with(cur, Ev::XPos));
        path.push_back(cur);
        ++cur;
      }
      while (cur > sa + 1) {  // or move left over everything
        block.push_back(id_row_with(cur - 1, Ev::XNeg));
        path.push_back(cur - 1);
        --cur;
      }
      int lo = std::min(cur, sa), hi = std::max(cur, sa);
      if (hi != lo + 1) throw MoveNotApplicable("edge strand could not be made adjacent");
      block.push_back(id_row_with(lo, Ev::Cap));
      // saddle cup: the left leg keeps the direction of whichever strand
      // occupies the left column (the rerouted edge when it came from the
      // left, the cable otherwise)
      int dleft = cur < sa ? t2.dir_at[(size_t)sb][(size_t)se] : t2.dir_at[(size_t)sb][(size_t)sa];
      block.push_back(id_row_with(lo, dleft > 0 ? Ev::CupL : Ev::CupR));
      for (auto it = path.rbegin(); it != path.rend(); ++it)
        block.push_back(id_row_with(*it, se < sa ? Ev::XNeg : Ev::XPos));
      // insert the block at boundary sb
      BichromeDiagram out;
      out.open_colors = dd.d.open_colors;
      out.coupons = dd.d.coupons;
      for (int r = 0; r < sb; ++r) out.rows.push_back(dd.d.rows[(size_t)r]);
      for (auto& row : block) out.rows.push_back(std::move(row));
      for (size_t r = (size_t)sb; r < dd.d.rows.size(); ++r) out.rows.push_back(dd.d.rows[r]);
      Traced t3 = analyze(out);
      // rebuild colors / surgery / omega: map old components by anchors
      std::map<int, int> remap;
      for (int oldc = 0; oldc < t.ncomp; ++oldc) {
        if (oldc == move.comp) continue;
        for (int b = 0; b < (int)t.comp_at.size() && !remap.count(oldc); ++b)
          for (int c = 0; c < (int)t.comp_at[(size_t)b].size(); ++c)
            if (t.comp_at[(size_t)b][(size_t)c] == oldc) {
              int nb2 = dd.row_of[(size_t)b];
              int nc2 = dd.col_of[(size_t)b][(size_t)c];
              int nb3 = nb2 >= sb ? nb2 + (int)block.size() : nb2;
              remap[oldc] = t3.comp_at[(size_t)nb3][(size_t)nc2];
              break;
            }
      }
      // the outer (unspliced) cable is the new surgery component
      int outer2 = inner == cableA ? cableB : cableA;
      int outer3 = -1;
      for (int b = 0; b < (int)t2.comp_at.size() && outer3 < 0; ++b)
        for (int c = 0; c < (int)t2.comp_at[(size_t)b].size(); ++c)
          if (t2.comp_at[(size_t)b][(size_t)c] == outer2) {
            int nb3 = b >= sb ? b + (int)block.size() : b;
            outer3 = t3.comp_at[(size_t)nb3][(size_t)c];
            break;
          }
      if (outer3 < 0) throw MoveNotApplicable("lost track of the outer cable");
      BichromeDiagram final = out;
      for (const auto& [c, s] : d.colors)
        if (c != move.comp && remap.count(c)) final.colors[remap.at(c)] = s;
      for (int c : d.surgery) final.surgery.push_back(c == move.comp ? outer3 : remap.at(c));
      CohomologyAssignment om;
      for (const auto& [c, v] : omega.values)
        if (c != move.comp && remap.count(c)) om.values[remap.at(c)] = v;
      // transported value on the slid-over component: try beta -+ alpha and
      // keep the exactly compatible one
      Rational alpha_e = t.red[(size_t)move.edge]
                             ? omega.at(move.edge)
                             : color_degree(cfg, t.color[(size_t)move.edge]);
      Rational beta = omega.at(move.comp);
      for (const Rational& cand : {(beta - alpha_e).mod1(), (beta + alpha_e).mod1()}) {
        om.values[outer3] = cand;
        final.omega = om;
        if (check_compatibility(cfg, final, t3, om).compatible) return {final, om};
      }
      throw MoveNotApplicable("no compatible transported cohomology value found");
    }
  }
  throw MoveNotApplicable("unknown move");
}

// ---- serialization ---------------------------------------------------------

using nlohmann::json;

static Event event_from_token(const std::string& tok, int row) {
  if (tok == "id" || tok == "|") return Event{Ev::Id};
  if (tok == "x+") return Event{Ev::XPos};
  if (tok == "x-") return Event{Ev::XNeg};
  if (tok == "cupl") return Event{Ev::CupL};
  if (tok == "cupr") return Event{Ev::CupR};
  if (tok == "cap" || tok == "capl" || tok == "capr") return Event{Ev::Cap};
  if (tok.rfind("coupon:", 0) == 0) {
    Event e{Ev::Coupon};
    e.coupon = std::stoi(tok.substr(7));
    return e;
  }
  throw ParseError("unknown event token '" + tok + "'", row);
}

static std::string token_of(const Event& e) {
  switch (e.kind) {
    case Ev::Id: return "id";
    case Ev::XPos: return "x+";
    case Ev::XNeg: return "x-";
    case Ev::CupL: return "cupl";
    case Ev::CupR: return "cupr";
    case Ev::Cap: return "cap";
    case Ev::Coupon: return "coupon:" + std::to_string(e.coupon);
  }
  return "?";
}

static Coupon coupon_from_json(const json& j) {
  Coupon c;
  c.red_legs = j.value("red_legs", 0);
  for (const auto& s : j.value("blue_in", std::vector<std::string>{})) c.blue_in.push_back(s);
  for (const auto& s : j.value("blue_out", std::vector<std::string>{})) c.blue_out.push_back(s);
  if (j.contains("exponent")) {
    const auto& ex = j["exponent"];
    if (ex.contains("quad"))
      for (const auto& q : ex["quad"])
        c.exponent += ExponentPoly::quadratic(q[0].get<int>(), q[1].get<int>(),
                                              q[2].get<long long>());
    if (ex.contains("lin"))
      for (const auto& l : ex["lin"])
        c.exponent +=
            ExponentPoly::linear(l[0].get<int>(), Rational::parse(l[1].get<std::string>()));
  }
  for (const auto& s : j.value("body", json::array())) {
    Coupon::Summand sm;
    if (s.contains("coeff"))
      sm.coeff = Scalar(s["coeff"][0].get<double>(), s["coeff"][1].get<double>());
    for (const auto& mono : s.value("red", json::array())) {
      Mono m;
      m.i = mono[0].get<int>();
      m.j = mono[1].get<int>();
      m.k = mono[2].get<int>();
      sm.red_beads.push_back(m);
    }
    if ((int)sm.red_beads.size() != c.red_legs)
      throw ParseError("coupon summand has wrong number of red beads");
    if (s.contains("f")) {
      const auto& rowsj = s["f"];
      int rows = (int)rowsj.size();
      int cols = rows ? (int)rowsj[0].size() : 0;
      sm.f = Mat(rows, cols);
      for (int r = 0; r < rows; ++r)
        for (int cc = 0; cc < cols; ++cc)
          sm.f(r, cc) = Scalar(rowsj[(size_t)r][(size_t)cc][0].get<double>(),
                               rowsj[(size_t)r][(size_t)cc][1].get<double>());
    } else {
      sm.f = Mat::identity(1);
    }
    c.body.push_back(std::move(sm));
  }
  return c;
}

static json coupon_to_json(const Coupon& c) {
  json j;
  j["red_legs"] = c.red_legs;
  j["blue_in"] = c.blue_in;
  j["blue_out"] = c.blue_out;
  json ex;
  ex["quad"] = json::array();
  for (const auto& [k, v] : c.exponent.quad) ex["quad"].push_back({k.first, k.second, v});
  ex["lin"] = json::array();
  for (const auto& [k, v] : c.exponent.lin) ex["lin"].push_back({k, v.str()});
  j["exponent"] = ex;
  j["body"] = json::array();
  for (const auto& s : c.body) {
    json sj;
    sj["coeff"] = {s.coeff.real(), s.coeff.imag()};
    sj["red"] = json::array();
    for (const auto& m : s.red_beads) sj["red"].push_back({m.i, m.j, m.k});
    json f = json::array();
    for (int r = 0; r < s.f.rows; ++r) {
      json row = json::array();
      for (int cc = 0; cc < s.f.cols; ++cc)
        row.push_back({s.f(r, cc).real(), s.f(r, cc).imag()});
      f.push_back(row);
    }
    sj["f"] = f;
    j["body"].push_back(sj);
  }
  return j;
}

BichromeDiagram parse_diagram(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  BichromeDiagram d;
  if (j.contains("coupons"))
    for (const auto& c : j["coupons"]) d.coupons.push_back(coupon_from_json(c));
  if (!j.contains("rows")) throw ParseError("diagram has no rows");
  int r = 0;
  for (const auto& rowj : j["rows"]) {
    std::vector<Event> row;
    for (const auto& tok : rowj) row.push_back(event_from_token(tok.get<std::string>(), r));
    d.rows.push_back(std::move(row));
    ++r;
  }
  for (const auto& s : j.value("open", std::vector<std::string>{})) d.open_colors.push_back(s);
  if (j.contains("colors"))
    for (const auto& [k, v] : j["colors"].items()) d.colors[std::stoi(k)] = v.get<std::string>();
  for (const auto& s : j.value("surgery", std::vector<int>{})) d.surgery.push_back(s);
  if (j.contains("omega"))
    for (const auto& [k, v] : j["omega"].items())
      d.omega.values[std::stoi(k)] = Rational::parse(v.get<std::string>()).mod1();
  analyze(d);  // validate eagerly so errors carry positions
  return d;
}

std::string serialize_diagram(const BichromeDiagram& d) {
  json j;
  j["rows"] = json::array();
  for (const auto& row : d.rows) {
    json rj = json::array();
    for (const auto& e : row) rj.push_back(token_of(e));
    j["rows"].push_back(rj);
  }
  if (!d.open_colors.empty()) j["open"] = d.open_colors;
  if (!d.colors.empty()) {
    json c;
    for (const auto& [k, v] : d.colors) c[std::to_string(k)] = v;
    j["colors"] = c;
  }
  if (!d.surgery.empty()) j["surgery"] = d.surgery;
  if (!d.omega.values.empty()) {
    json o;
    for (const auto& [k, v] : d.omega.values) o[std::to_string(k)] = v.str();
    j["omega"] = o;
  }
  if (!d.coupons.empty()) {
    j["coupons"] = json::array();
    for (const auto& c : d.coupons) j["coupons"].push_back(coupon_to_json(c));
  }
  return j.dump(1);
}

BichromeDiagram load_diagram_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open diagram file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_diagram(ss.str());
}

CohomologyAssignment parse_omega(const std::vector<std::string>& entries) {
  CohomologyAssignment om;
  for (const auto& e : entries) {
    auto eq = e.find('=');
    if (eq == std::string::npos) throw ParseError("omega entry must look like k=p/q: '" + e + "'");
    om.values[std::stoi(e.substr(0, eq))] = Rational::parse(e.substr(eq + 1)).mod1();
  }
  return om;
}

}  // namespace ghinv
