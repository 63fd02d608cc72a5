#include "ghinv/integrals.hpp"

#include <cmath>
#include <random>

#include "ghinv/errors.hpp"
#include "ghinv/kernels.hpp"

namespace ghinv {

Scalar eta_normalization(const RootConfig& cfg) {
  Scalar c = quasi_r_coeffs(cfg).back();
  return cfg.xi_pow(1) * Scalar(cfg.ell) / (c * cfg.gauss_sum());
}

Scalar symmetrized_integral(const RootConfig& cfg, const AlgebraElement& x,
                            std::optional<Scalar> eta_override) {
  double scale = std::max(1.0, x.max_abs());
  Scalar coeff = 0;
  for (const auto& [m, v] : x.terms) {
    if (!m.c.is_zero()) {
      if (std::abs(v) > cfg.tol * scale)
        throw FractionalCartan("symmetrized integral of an element with fractional Cartan part " +
                               m.c.str());
      continue;
    }
    if (m.i == cfg.ell_prime - 1 && m.j == cfg.ell_prime - 1 && m.k == 0) coeff += v;
  }
  return coeff * (eta_override ? *eta_override : eta_normalization(cfg));
}

Scalar right_integral(const RootConfig& cfg, const AlgebraElement& x) {
  AlgebraElement ginv = gen_K(cfg, x.degree, 2 * (long long)cfg.ell_prime - 2);
  return symmetrized_integral(cfg, multiply(cfg, ginv, x));
}

AlgebraElement cointegral_solve(const RootConfig& cfg) {
  const GDegree zero = gdeg(Rational(0));
  const int n = algebra_dim(cfg);
  struct GenRow {
    AlgebraElement g;
    Scalar eps;
  };
  std::vector<GenRow> gens{{gen_E(zero), 0}, {gen_F(zero), 0}, {gen_K(cfg, zero), 1}};
  Mat A(6 * n, n);
  int blk = 0;
  for (const auto& [g, eps] : gens) {
    Mat L = left_regular(cfg, g), R = right_regular(cfg, g);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        A(blk * n + r, c) = L(r, c) - (r == c ? eps : Scalar(0));
        A((blk + 1) * n + r, c) = R(r, c) - (r == c ? eps : Scalar(0));
      }
    blk += 2;
  }
  auto basis = nullspace(A, 1e-10);
  if (basis.size() != 1)
    throw NotUnimodular("cointegral space has dimension " + std::to_string(basis.size()));
  AlgebraElement up = from_vector(cfg, zero, basis[0]);
  Scalar norm = right_integral(cfg, up);
  if (std::abs(norm) < cfg.tol) throw NotUnimodular("cointegral pairs to zero with the integral");
  up = up * (Scalar(1) / norm);
  up.prune();
  return up;
}

AlgebraElement distinguished_grouplike(const RootConfig& cfg, const GDegree& alpha) {
  return gen_K(cfg, alpha, 4 - 4 * (long long)cfg.ell_prime);
}

double verify_distinguished(const RootConfig& cfg, const GDegree& alpha, const GDegree& beta) {
  // lambda^L = lambda(gamma .) must satisfy (Id (x) lambda^L_b) Delta_{a,b}(x)
  // = lambda^L_{a+b}(x) 1_a on a full basis of U_{a+b}
  const GDegree ab = gdeg_add(alpha, beta);
  const int n = algebra_dim(cfg);
  AlgebraElement gamma_b = distinguished_grouplike(cfg, beta);
  AlgebraElement gamma_ab = distinguished_grouplike(cfg, ab);
  return par::max_over(n, [&](int t) {
    AlgebraElement x(ab);
    x.terms[mono_from_flat(cfg, t)] = 1;
    TensorElement dx = coproduct(cfg, x, alpha, beta);
    AlgebraElement lhs(alpha);
    for (const auto& [m, v] : dx.terms) {
      AlgebraElement second(beta);
      second.terms[m[1]] = 1;
      Scalar lam = right_integral(cfg, multiply(cfg, gamma_b, second));
      if (std::abs(lam) < 1e-15) continue;
      lhs.add(m[0], v * lam);
    }
    AlgebraElement rhs = unit(alpha) * right_integral(cfg, multiply(cfg, gamma_ab, x));
    return (lhs - rhs).max_abs();
  });
}

Scalar twist_integral(const RootConfig& cfg) { return right_integral(cfg, twist_zero(cfg)); }

Scalar twist_inverse_integral(const RootConfig& cfg) {
  return right_integral(cfg, twist_zero_inverse(cfg));
}

ModifiedIntegralData modified_integral_data(const RootConfig& cfg, const GDegree& alpha) {
  ModifiedIntegralData d;
  d.degree = alpha;
  d.dec = simple_decomposition(cfg, alpha);
  const int bs = cfg.ell_prime;
  d.z_deg = AlgebraElement(alpha);
  for (size_t i = 0; i < d.dec.idempotents.size(); ++i) {
    Scalar mu = symmetrized_integral(cfg, d.dec.idempotents[i]);
    Scalar di = mu / Scalar(bs);
    d.mod_dims.push_back(di);
    d.z_deg += d.dec.idempotents[i] * (di / Scalar(bs));
  }
  d.z_deg.prune();
  return d;
}

const ModifiedIntegralData& IntegralCache::at(const GDegree& alpha) {
  auto it = data_.find(alpha);
  if (it == data_.end()) it = data_.emplace(alpha, modified_integral_data(cfg_, alpha)).first;
  return it->second;
}

bool IntegralCache::degree_semisimple(const GDegree& alpha) {
  auto it = semisimple_.find(alpha);
  if (it == semisimple_.end()) {
    bool ok = true;
    try {
      at(alpha);
    } catch (const NotSemisimple&) {
      ok = false;
    } catch (const RelationViolation&) {
      ok = false;
    }
    it = semisimple_.emplace(alpha, ok).first;
  }
  return it->second;
}

std::vector<Scalar> modified_dimensions(const RootConfig&, const ModifiedIntegralData& d) {
  return d.mod_dims;
}

std::vector<Scalar> modified_dimensions_solve(const RootConfig& cfg, const GDegree& alpha,
                                              unsigned seed) {
  // sample mu(x_r) = sum_i d_i tr(rho_i(x_r)) and solve in least squares;
  // uses only the integral and the module actions, not the idempotents
  SimpleDecomposition dec = simple_decomposition(cfg, alpha);
  const int nb = (int)dec.blocks.size();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_i(0, cfg.ell_prime - 1);
  std::uniform_int_distribution<int> pick_k(0, cfg.ell - 1);
  std::uniform_real_distribution<double> coeff(-1, 1);
  const int samples = 4 * nb;
  Mat A(samples, nb);
  std::vector<Scalar> rhs((size_t)samples);
  for (int r = 0; r < samples; ++r) {
    AlgebraElement x(alpha);
    for (int t = 0; t < 5; ++t)
      x.add(Mono{Rational(0), pick_i(rng), pick_i(rng), pick_k(rng)},
            Scalar(coeff(rng), coeff(rng)));
    rhs[(size_t)r] = symmetrized_integral(cfg, x);
    for (int i = 0; i < nb; ++i) A(r, i) = dec.blocks[(size_t)i].act(cfg, x).trace();
  }
  Mat AH(nb, samples);
  for (int r = 0; r < samples; ++r)
    for (int c = 0; c < nb; ++c) AH(c, r) = std::conj(A(r, c));
  Mat M = AH * A;
  std::vector<Scalar> b((size_t)nb, Scalar(0));
  for (int c = 0; c < nb; ++c)
    for (int r = 0; r < samples; ++r) b[(size_t)c] += AH(c, r) * rhs[(size_t)r];
  std::vector<Scalar> d;
  try {
    d = lu_solve(M, b);
  } catch (const NotInvertible&) {
    throw IllConditioned("modified dimension sample system is singular");
  }
  for (int r = 0; r < samples; ++r) {
    Scalar s = 0;
    for (int i = 0; i < nb; ++i) s += A(r, i) * d[(size_t)i];
    if (std::abs(s - rhs[(size_t)r]) > cfg.tol * std::max(1.0, std::abs(rhs[(size_t)r])) * 100)
      throw IllConditioned("modified dimension solve residual too large");
  }
  return d;
}

static void check_central(const RootConfig& cfg, const AlgebraElement& z) {
  double scale = std::max(1.0, z.max_abs());
  for (const AlgebraElement& gen : {gen_E(z.degree), gen_F(z.degree), gen_K(cfg, z.degree)}) {
    AlgebraElement diff = multiply(cfg, z, gen) - multiply(cfg, gen, z);
    if (diff.max_abs() > cfg.tol * scale * 10)
      throw NotCentral("element is not central (residual " + std::to_string(diff.max_abs()) + ")");
  }
}

Scalar modified_integral(const RootConfig& cfg, const ModifiedIntegralData& d,
                         const AlgebraElement& z) {
  check_central(cfg, z);
  return symmetrized_integral(cfg, multiply(cfg, d.z_deg, z));
}

Scalar m_trace(const RootConfig& cfg, const ModifiedIntegralData& d, const WeightModule& v,
               const Mat& f) {
  if (!(v.degree == d.degree)) throw DegreeMismatch("m_trace: module degree != data degree");
  double scale = std::max(1.0, f.max_abs());
  for (const Mat& g : {v.E, v.F, v.K(cfg)}) {
    Mat diff = f * g - g * f;
    if (diff.max_abs() > cfg.tol * scale * std::max(1.0, g.max_abs()) * 10)
      throw NotIntertwiner("m_trace argument does not commute with the action");
  }
  for (int r = 0; r < v.dim; ++r)
    for (int c = 0; c < v.dim; ++c)
      if (!(v.weights[(size_t)r] == v.weights[(size_t)c]) && std::abs(f(r, c)) > cfg.tol * scale)
        throw NotIntertwiner("m_trace argument is not H-equivariant");
  Scalar t = 0;
  for (size_t i = 0; i < d.dec.idempotents.size(); ++i) {
    Mat zi = v.act(cfg, d.dec.idempotents[i]);
    t += (f * zi).trace() * (d.mod_dims[i] / Scalar(cfg.ell_prime));
  }
  return t;
}

Scalar modified_dimension(const RootConfig& cfg, const ModifiedIntegralData& d,
                          const WeightModule& v) {
  return m_trace(cfg, d, v, Mat::identity(v.dim));
}

Mat partial_trace_right(const RootConfig& cfg, const WeightModule& v, const WeightModule& w,
                        const Mat& f) {
  Mat gw = w.pivot_mat(cfg);
  Mat out(v.dim, v.dim);
  for (int a = 0; a < v.dim; ++a)
    for (int b = 0; b < v.dim; ++b) {
      Scalar s = 0;
      for (int p = 0; p < w.dim; ++p)
        for (int q = 0; q < w.dim; ++q) s += f(a * w.dim + p, b * w.dim + q) * gw(q, p);
      out(a, b) = s;
    }
  return out;
}

std::vector<TensorElement> centralizer_basis_pair(const RootConfig& cfg, const GDegree& alpha,
                                                  const GDegree& beta) {
  const int n = algebra_dim(cfg);
  // commuting with K (x) K forces total weight zero
  std::vector<std::pair<Mono, Mono>> cand;
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) {
      Mono a = mono_from_flat(cfg, s), b = mono_from_flat(cfg, t);
      if (a.weight() + b.weight() == 0) cand.emplace_back(a, b);
    }
  const int m = (int)cand.size();
  const GDegree ab = gdeg_add(alpha, beta);
  std::vector<TensorElement> gens;
  for (const AlgebraElement& g : {gen_E(ab), gen_F(ab)})
    gens.push_back(coproduct(cfg, g, alpha, beta));
  auto pair_flat = [&](const Mono& a, const Mono& b) {
    return (size_t)mono_flat_index(cfg, a) * (size_t)n + (size_t)mono_flat_index(cfg, b);
  };
  Mat A(2 * n * n, m);
  for (int c = 0; c < m; ++c) {
    TensorElement x({alpha, beta});
    x.add({cand[(size_t)c].first, cand[(size_t)c].second}, 1);
    for (size_t gi = 0; gi < gens.size(); ++gi) {
      TensorElement comm = tensor_multiply(cfg, gens[gi], x) - tensor_multiply(cfg, x, gens[gi]);
      for (const auto& [mm, vv] : comm.terms)
        A((int)(gi * (size_t)n * n + pair_flat(mm[0], mm[1])), c) += vv;
    }
  }
  auto basis = nullspace(A, 1e-10);
  std::vector<TensorElement> out;
  for (const auto& vec : basis) {
    TensorElement z({alpha, beta});
    for (int c = 0; c < m; ++c)
      if (std::abs(vec[(size_t)c]) > 1e-13)
        z.add({cand[(size_t)c].first, cand[(size_t)c].second}, vec[(size_t)c]);
    out.push_back(std::move(z));
  }
  return out;
}

}  // namespace ghinv
