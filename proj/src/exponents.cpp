#include "ghinv/exponents.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "ghinv/errors.hpp"
#include "ghinv/kernels.hpp"

namespace ghinv {

ExponentPoly& ExponentPoly::operator+=(const ExponentPoly& o) {
  for (const auto& [k, v] : o.quad) {
    auto it = quad.find(k);
    if (it == quad.end())
      quad[k] = v;
    else if ((it->second += v) == 0)
      quad.erase(it);
  }
  for (const auto& [k, v] : o.lin) {
    auto it = lin.find(k);
    if (it == lin.end())
      lin[k] = v;
    else {
      it->second += v;
      if (it->second.is_zero()) lin.erase(it);
    }
  }
  const_term += o.const_term;
  return *this;
}

ExponentPoly ExponentPoly::operator-() const {
  ExponentPoly r;
  for (const auto& [k, v] : quad) r.quad[k] = -v;
  for (const auto& [k, v] : lin) r.lin[k] = -v;
  r.const_term = -const_term;
  return r;
}

Rational ExponentPoly::eval(const std::vector<Rational>& at) const {
  auto get = [&](int i) { return i < (int)at.size() ? at[(size_t)i] : Rational(0); };
  Rational r = const_term;
  for (const auto& [k, v] : quad) r += Rational(v) * get(k.first) * get(k.second);
  for (const auto& [k, v] : lin) r += v * get(k);
  return r;
}

ExponentPoly ExponentPoly::relabel(const std::vector<int>& perm) const {
  ExponentPoly r;
  r.const_term = const_term;
  for (const auto& [k, v] : quad) {
    int a = perm[(size_t)k.first], b = perm[(size_t)k.second];
    if (a > b) std::swap(a, b);
    r.quad[{a, b}] += v;
    if (r.quad[{a, b}] == 0) r.quad.erase({a, b});
  }
  for (const auto& [k, v] : lin) {
    auto it = r.lin.find(perm[(size_t)k]);
    if (it == r.lin.end())
      r.lin[perm[(size_t)k]] = v;
    else {
      it->second += v;
      if (it->second.is_zero()) r.lin.erase(it);
    }
  }
  return r;
}

std::string ExponentPoly::str() const {
  std::string s;
  for (const auto& [k, v] : quad) {
    if (!s.empty()) s += " + ";
    s += std::to_string(v) + "*H" + std::to_string(k.first) + "H" + std::to_string(k.second);
  }
  for (const auto& [k, v] : lin) {
    if (!s.empty()) s += " + ";
    s += v.str() + "*H" + std::to_string(k);
  }
  if (!const_term.is_zero() || s.empty()) {
    if (!s.empty()) s += " + ";
    s += const_term.str();
  }
  return s;
}

ExponentPoly polarize(const ExponentPoly& q, const std::vector<Rational>& at) {
  if (!q.lin_zero()) throw std::invalid_argument("polarize: expected a purely quadratic form");
  auto get = [&](int i) { return i < (int)at.size() ? at[(size_t)i] : Rational(0); };
  ExponentPoly r;
  for (const auto& [k, v] : q.quad) {
    // c*h_a*h_b polarizes to c*(at_a h_b + at_b h_a); diagonal gives 2c*at_a h_a
    auto add = [&](int var, const Rational& coeff) {
      if (coeff.is_zero()) return;
      auto it = r.lin.find(var);
      if (it == r.lin.end())
        r.lin[var] = coeff;
      else {
        it->second += coeff;
        if (it->second.is_zero()) r.lin.erase(it);
      }
    };
    add(k.second, Rational(v) * get(k.first));
    add(k.first, Rational(v) * get(k.second));
  }
  return r;
}

FourierExpansion dft(const RootConfig& cfg, const Lattice& lattice,
                     const std::function<Scalar(const std::vector<Rational>&)>& f) {
  const int m = lattice.num_vars();
  if (m < 1 || m > 2) throw std::invalid_argument("dft: only 1 or 2 lattice variables supported");
  const int l = cfg.ell;
  const size_t grid = m == 1 ? (size_t)l : (size_t)l * l;
  std::vector<Scalar> fvals(grid);
  std::vector<Rational> pt(m);
  double scale = 1.0;
  for (size_t t = 0; t < grid; ++t) {
    int i0 = m == 1 ? (int)t : (int)(t / l);
    int i1 = m == 1 ? 0 : (int)(t % l);
    pt[0] = lattice.base[0] + Rational(i0);
    if (m == 2) pt[1] = lattice.base[1] + Rational(i1);
    fvals[t] = f(pt);
    scale = std::max(scale, std::abs(fvals[t]));
  }
  FourierExpansion fe;
  fe.m = m;
  fe.ell = l;
  fe.coeffs = par::dft_table(cfg, m, lattice.base, fvals);
  // Exhaustive reconstruction check over all representatives and over the
  // representatives shifted by ell in each variable.  The expansion itself is
  // ell-periodic, so the shifted comparison is what certifies periodicity of f.
  for (size_t t = 0; t < grid; ++t) {
    int i0 = m == 1 ? (int)t : (int)(t / l);
    int i1 = m == 1 ? 0 : (int)(t % l);
    for (int shift = 0; shift <= m; ++shift) {
      pt[0] = lattice.base[0] + Rational(i0 + (shift == 1 ? l : 0));
      if (m == 2) pt[1] = lattice.base[1] + Rational(i1 + (shift == 2 ? l : 0));
      Scalar want = shift == 0 ? fvals[t] : f(pt);
      Scalar rec = par::dft_reconstruct(cfg, m, fe.coeffs, pt);
      if (std::abs(rec - want) > cfg.tol * scale)
        throw PeriodicityViolation("DFT reconstruction failed at lattice point (" + pt[0].str() +
                                   (m == 2 ? "," + pt[1].str() : std::string()) + "), residual " +
                                   std::to_string(std::abs(rec - want)));
    }
  }
  return fe;
}

std::pair<ExponentPoly, FourierExpansion> reduce_quadratic(const RootConfig& cfg,
                                                           const ExponentPoly& q,
                                                           const Lattice& lattice) {
  if (!q.lin_zero() || !q.const_term.is_zero())
    throw std::invalid_argument("reduce_quadratic: expected a purely quadratic form");
  ExponentPoly l = polarize(q, lattice.base);
  l.const_term = -q.eval(lattice.base);
  ExponentPoly diff = q + (-l);
  FourierExpansion fe =
      dft(cfg, lattice, [&](const std::vector<Rational>& pt) { return cfg.xi_pow(diff.eval(pt)); });
  return {l, fe};
}

CommutePast commute_past(const ExponentPoly& p, const std::vector<long long>& weight) {
  std::vector<Rational> w(weight.size());
  for (size_t i = 0; i < weight.size(); ++i) w[i] = Rational(weight[(size_t)i]);
  CommutePast r;
  ExponentPoly no_const = p;
  no_const.const_term = Rational(0);
  r.phase = no_const.eval(w);
  int maxvar = -1;
  for (const auto& [k, v] : p.quad) maxvar = std::max(maxvar, k.second);
  r.induced_k_power.assign((size_t)maxvar + 1, 0);
  if (!p.quad_zero()) {
    ExponentPoly q_only;
    q_only.quad = p.quad;
    ExponentPoly pol = polarize(q_only, w);
    for (const auto& [k, v] : pol.lin) {
      if (!v.is_integer())
        throw std::invalid_argument("commute_past: polarization not integral at this weight");
      r.induced_k_power[(size_t)k] = v.num;
    }
  }
  return r;
}

}  // namespace ghinv
