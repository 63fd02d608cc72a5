#include "ghinv/modules_catalog.hpp"

#include <cmath>

#include "ghinv/errors.hpp"
#include "ghinv/kernels.hpp"

namespace ghinv {

Mat WeightModule::act_mono(const RootConfig& cfg, const Mono& m) const {
  Mat r = Mat::identity(dim);
  if (m.i) r = r * E.pow(m.i);
  if (m.j) r = r * F.pow(m.j);
  if (m.k) r = r * K(cfg, m.k);
  if (!m.c.is_zero()) {
    Mat d(dim, dim);
    for (int t = 0; t < dim; ++t) d(t, t) = cfg.xi_pow(m.c * weights[(size_t)t]);
    r = d * r;
  }
  return r;
}

Mat WeightModule::act(const RootConfig& cfg, const AlgebraElement& x) const {
  Mat r(dim, dim);
  for (const auto& [m, v] : x.terms) r = r + act_mono(cfg, m) * v;
  return r;
}

static void verify_relations(const RootConfig& cfg, const WeightModule& v) {
  const Scalar denom = cfg.xi_pow(1) - cfg.xi_pow(-1);
  Mat K1 = v.K(cfg), Kinv = v.K(cfg, -1), K2 = v.K(cfg, 2), Km2 = v.K(cfg, -2);
  Mat lhs = K1 * v.E * Kinv - v.E * cfg.xi_pow(1);
  if (lhs.max_abs() > cfg.tol) throw RelationViolation("KEK^-1 = xi E fails for " + v.name);
  lhs = K1 * v.F * Kinv - v.F * cfg.xi_pow(-1);
  if (lhs.max_abs() > cfg.tol) throw RelationViolation("KFK^-1 = xi^-1 F fails for " + v.name);
  lhs = v.E * v.F - v.F * v.E - (K2 - Km2) * (Scalar(1) / denom);
  if (lhs.max_abs() > cfg.tol) throw RelationViolation("[E,F] relation fails for " + v.name);
  if (v.E.pow(cfg.ell_prime).max_abs() > cfg.tol)
    throw RelationViolation("E^{ell'} != 0 for " + v.name);
  if (v.F.pow(cfg.ell_prime).max_abs() > cfg.tol)
    throw RelationViolation("F^{ell'} != 0 for " + v.name);
  // homogeneity: all weights congruent to the degree mod 1
  for (const auto& w : v.weights)
    if (!(gdeg(w) == v.degree)) throw RelationViolation("weights not homogeneous for " + v.name);
}

WeightModule typical_module(const RootConfig& cfg, const Rational& highest_weight) {
  const int n = cfg.ell_prime;
  WeightModule v;
  v.dim = n;
  v.degree = gdeg(highest_weight);
  v.name = "typical(" + highest_weight.str() + ")";
  v.weights.resize((size_t)n);
  for (int t = 0; t < n; ++t) v.weights[(size_t)t] = highest_weight - Rational(t);
  v.E = Mat(n, n);
  v.F = Mat(n, n);
  // F lowers the basis index (v_t -> v_{t+1}); E raises it with coefficients
  // solving the recurrence the commutator relation imposes:
  //   c_{t+1} = c_t + (xi^{2(a-t)} - xi^{-2(a-t)})/(xi - xi^{-1}),  c_0 = 0.
  const Scalar denom = cfg.xi_pow(1) - cfg.xi_pow(-1);
  for (int t = 0; t + 1 < n; ++t) v.F(t + 1, t) = 1;
  Scalar c = 0;
  bool all_nonzero = true;
  for (int t = 0; t + 1 < n; ++t) {
    Rational w = highest_weight - Rational(t);
    c += (cfg.xi_pow(Rational(2) * w) - cfg.xi_pow(Rational(-2) * w)) / denom;
    v.E(t, t + 1) = c;
    if (std::abs(c) < cfg.tol) all_nonzero = false;
  }
  v.simple = all_nonzero;
  verify_relations(cfg, v);
  return v;
}

WeightModule trivial_module(const RootConfig& cfg, const Rational& lambda) {
  WeightModule v;
  v.dim = 1;
  v.degree = gdeg(lambda);
  v.name = "trivial(" + lambda.str() + ")";
  v.weights = {lambda};
  v.E = Mat(1, 1);
  v.F = Mat(1, 1);
  v.simple = true;
  verify_relations(cfg, v);  // needs xi^{2 lambda} = xi^{-2 lambda}
  return v;
}

WeightModule dual_module(const RootConfig& cfg, const WeightModule& m) {
  WeightModule v;
  v.dim = m.dim;
  v.degree = gdeg_neg(m.degree);
  v.name = "dual(" + m.name + ")";
  v.weights.resize((size_t)m.dim);
  for (int t = 0; t < m.dim; ++t) v.weights[(size_t)t] = -m.weights[(size_t)t];
  // rho*(x) = transpose(rho(S x))
  v.E = (m.E * m.K(cfg, -2)).transpose() * Scalar(-1);
  v.F = (m.K(cfg, 2) * m.F).transpose() * Scalar(-1);
  v.simple = m.simple;
  verify_relations(cfg, v);
  return v;
}

WeightModule tensor_module(const RootConfig& cfg, const WeightModule& a, const WeightModule& b) {
  WeightModule v;
  v.dim = a.dim * b.dim;
  v.degree = gdeg_add(a.degree, b.degree);
  v.name = "tensor(" + a.name + "," + b.name + ")";
  v.weights.resize((size_t)v.dim);
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < b.dim; ++j)
      v.weights[(size_t)(i * b.dim + j)] = a.weights[(size_t)i] + b.weights[(size_t)j];
  Mat Ia = Mat::identity(a.dim), Ib = Mat::identity(b.dim);
  v.E = Ia.kron(b.E) + a.E.kron(b.K(cfg, 2));
  v.F = a.K(cfg, -2).kron(b.F) + a.F.kron(Ib);
  v.simple = false;
  verify_relations(cfg, v);
  return v;
}

WeightModule parse_module(const RootConfig& cfg, const std::string& spec) {
  auto fail = [&](const std::string& why) -> WeightModule {
    throw ParseError("bad module spec '" + spec + "': " + why);
  };
  auto open = spec.find('(');
  if (open == std::string::npos || spec.back() != ')') return fail("expected name(args)");
  std::string head = spec.substr(0, open);
  std::string args = spec.substr(open + 1, spec.size() - open - 2);
  if (head == "typical") return typical_module(cfg, Rational::parse(args));
  if (head == "trivial") return trivial_module(cfg, Rational::parse(args));
  if (head == "dual") return dual_module(cfg, parse_module(cfg, args));
  if (head == "tensor") {
    int depth = 0;
    size_t split = std::string::npos;
    for (size_t t = 0; t < args.size(); ++t) {
      if (args[t] == '(') ++depth;
      if (args[t] == ')') --depth;
      if (args[t] == ',' && depth == 0) {
        split = t;
        break;
      }
    }
    if (split == std::string::npos) return fail("tensor needs two arguments");
    return tensor_module(cfg, parse_module(cfg, args.substr(0, split)),
                         parse_module(cfg, args.substr(split + 1)));
  }
  return fail("unknown constructor '" + head + "'");
}

Mat braiding(const RootConfig& cfg, const WeightModule& v, const WeightModule& w, int sign) {
  if (sign < 0) return inverse(braiding(cfg, w, v, +1));
  const int dv = v.dim, dw = w.dim, n = dv * dw;
  auto coeffs = quasi_r_coeffs(cfg);
  Mat qr(n, n);
  for (int j = 0; j < cfg.ell_prime; ++j) qr = qr + v.E.pow(j).kron(w.F.pow(j)) * coeffs[(size_t)j];
  // Cartan operator xi^{2 wt.wt} applied to the output of qr, then the flip
  Mat out(n, n);
  for (int a = 0; a < dv; ++a)
    for (int b = 0; b < dw; ++b) {
      Scalar h = cfg.xi_pow(Rational(2) * v.weights[(size_t)a] * w.weights[(size_t)b]);
      for (int c = 0; c < n; ++c) {
        Scalar val = qr(a * dw + b, c);
        if (val == Scalar(0)) continue;
        out(b * dv + a, c) += val * h;
      }
    }
  return out;
}

Mat module_twist(const RootConfig& cfg, const WeightModule& v) {
  auto coeffs = quasi_r_coeffs(cfg);
  Mat g = v.pivot_mat(cfg);
  Mat out(v.dim, v.dim);
  for (int j = 0; j < cfg.ell_prime; ++j) {
    Mat op = v.F.pow(j) * g * v.E.pow(j);
    // on a weight-lambda vector the Cartan parts contribute xi^{2 lam^2 + 2 j lam}
    for (int col = 0; col < v.dim; ++col) {
      Rational lam = v.weights[(size_t)col];
      Scalar ph = cfg.xi_pow(Rational(2) * lam * lam + Rational(2 * j) * lam) * coeffs[(size_t)j];
      for (int r = 0; r < v.dim; ++r) out(r, col) += op(r, col) * ph;
    }
  }
  return out;
}

Mat module_twist_dual_route(const RootConfig& cfg, const WeightModule& v) {
  auto coeffs = quasi_r_coeffs(cfg);
  Mat ginv = v.K(cfg, 2 * (long long)cfg.ell_prime - 2);
  Mat out(v.dim, v.dim);
  for (int j = 0; j < cfg.ell_prime; ++j) {
    Mat op = v.E.pow(j) * ginv * v.F.pow(j);
    for (int col = 0; col < v.dim; ++col) {
      Rational lam = v.weights[(size_t)col];
      Scalar ph = cfg.xi_pow(Rational(2) * lam * lam - Rational(2 * j) * lam) * coeffs[(size_t)j];
      for (int r = 0; r < v.dim; ++r) out(r, col) += op(r, col) * ph;
    }
  }
  return out;
}

SimpleDecomposition simple_decomposition(const RootConfig& cfg, const GDegree& alpha) {
  const int n = algebra_dim(cfg);
  const int bs = cfg.ell_prime;
  SimpleDecomposition dec;
  dec.degree = alpha;
  for (int k = 0; k < cfg.ell; ++k) {
    WeightModule v = typical_module(cfg, alpha + Rational(k));
    if (!v.simple)
      throw NotSemisimple("typical block " + v.name + " degenerates at degree " + alpha.str());
    dec.blocks.push_back(std::move(v));
  }
  // joint evaluation x -> (rho_i(x))_i as a square matrix over the monomial basis
  Mat J(n, n);
  par::parallel_for(n, [&](int col) {
    Mono m = mono_from_flat(cfg, col);
    for (int blk = 0; blk < cfg.ell; ++blk) {
      Mat r = dec.blocks[(size_t)blk].act_mono(cfg, m);
      for (int a = 0; a < bs; ++a)
        for (int b = 0; b < bs; ++b) J(blk * bs * bs + a * bs + b, col) = r(a, b);
    }
  });
  Mat Jinv;
  try {
    Jinv = inverse(J, 1e-10);
  } catch (const NotInvertible&) {
    throw NotSemisimple("joint evaluation map is rank deficient at degree " + alpha.str());
  }
  dec.condition_estimate = J.max_abs() * Jinv.max_abs() * n;
  if (dec.condition_estimate > 1e6)
    throw NotSemisimple("joint evaluation map ill conditioned at degree " + alpha.str() +
                        " (cond ~ " + std::to_string(dec.condition_estimate) + ")");
  for (int blk = 0; blk < cfg.ell; ++blk) {
    std::vector<Scalar> rhs((size_t)n, Scalar(0));
    for (int a = 0; a < bs; ++a) rhs[(size_t)(blk * bs * bs + a * bs + a)] = 1;
    std::vector<Scalar> col((size_t)n, Scalar(0));
    for (int r = 0; r < n; ++r) {
      Scalar s = 0;
      for (int c2 = 0; c2 < n; ++c2) s += Jinv(r, c2) * rhs[(size_t)c2];
      col[(size_t)r] = s;
    }
    AlgebraElement z = from_vector(cfg, alpha, col);
    z.prune();
    dec.idempotents.push_back(std::move(z));
  }
  return dec;
}

bool is_semisimple_degree(const RootConfig& cfg, const GDegree& alpha) {
  try {
    simple_decomposition(cfg, alpha);
    return true;
  } catch (const NotSemisimple&) {
    return false;
  } catch (const RelationViolation&) {
    return false;
  }
}

}  // namespace ghinv
