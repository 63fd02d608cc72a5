#include "ghinv/qalgebra.hpp"

#include <cmath>
#include <sstream>

#include "ghinv/errors.hpp"
#include "ghinv/kernels.hpp"

namespace ghinv {

void AlgebraElement::prune(double eps) {
  double scale = std::max(1.0, max_abs());
  for (auto it = terms.begin(); it != terms.end();)
    it = std::abs(it->second) <= eps * scale ? terms.erase(it) : std::next(it);
}

bool AlgebraElement::is_zero(double eps) const {
  for (const auto& [m, v] : terms)
    if (std::abs(v) > eps) return false;
  return true;
}

bool AlgebraElement::fractional_free() const {
  for (const auto& [m, v] : terms)
    if (!m.c.is_zero() && std::abs(v) > 1e-12) return false;
  return true;
}

double AlgebraElement::max_abs() const {
  double s = 0;
  for (const auto& [m, v] : terms) s = std::max(s, std::abs(v));
  return s;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
  if (!(degree == o.degree)) throw DegreeMismatch("adding elements of different degree");
  for (const auto& [m, v] : o.terms) add(m, v);
  return *this;
}

AlgebraElement AlgebraElement::operator*(const Scalar& s) const {
  AlgebraElement r = *this;
  for (auto& [m, v] : r.terms) v *= s;
  return r;
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
  AlgebraElement r = *this;
  for (const auto& [m, v] : o.terms) r.add(m, -v);
  return r;
}

void TensorElement::prune(double eps) {
  double scale = std::max(1.0, max_abs());
  for (auto it = terms.begin(); it != terms.end();)
    it = std::abs(it->second) <= eps * scale ? terms.erase(it) : std::next(it);
}

double TensorElement::max_abs() const {
  double s = 0;
  for (const auto& [m, v] : terms) s = std::max(s, std::abs(v));
  return s;
}

TensorElement& TensorElement::operator+=(const TensorElement& o) {
  for (const auto& [m, v] : o.terms) add(m, v);
  return *this;
}

TensorElement TensorElement::operator*(const Scalar& s) const {
  TensorElement r = *this;
  for (auto& [m, v] : r.terms) v *= s;
  return r;
}

TensorElement TensorElement::operator-(const TensorElement& o) const {
  TensorElement r = *this;
  for (const auto& [m, v] : o.terms) r.add(m, -v);
  return r;
}

AlgebraElement unit(const GDegree& deg) {
  AlgebraElement e(deg);
  e.terms[Mono{}] = 1;
  return e;
}

AlgebraElement gen_E(const GDegree& deg) {
  AlgebraElement e(deg);
  e.terms[Mono{Rational(0), 1, 0, 0}] = 1;
  return e;
}

AlgebraElement gen_F(const GDegree& deg) {
  AlgebraElement e(deg);
  e.terms[Mono{Rational(0), 0, 1, 0}] = 1;
  return e;
}

// reduce K^k to range [0,ell) against K^ell = xi^{ell*alpha}
static std::pair<int, Scalar> reduce_k(const RootConfig& cfg, const GDegree& deg, long long k) {
  long long q = k >= 0 ? k / cfg.ell : -(((-k) + cfg.ell - 1) / cfg.ell);
  long long r = k - q * cfg.ell;
  Scalar ph = cfg.xi_pow(Rational(cfg.ell * q) * deg);
  return {(int)r, ph};
}

AlgebraElement gen_K(const RootConfig& cfg, const GDegree& deg, long long power) {
  auto [k, ph] = reduce_k(cfg, deg, power);
  AlgebraElement e(deg);
  e.terms[Mono{Rational(0), 0, 0, k}] = ph;
  return e;
}

AlgebraElement pivot(const RootConfig& cfg, const GDegree& deg) {
  return gen_K(cfg, deg, 2 - 2 * (long long)cfg.ell_prime);
}

TensorElement tensor_unit(const std::vector<GDegree>& degs) {
  TensorElement t(degs);
  t.terms[std::vector<Mono>(degs.size())] = 1;
  return t;
}

TensorElement outer(const RootConfig&, const AlgebraElement& a, const AlgebraElement& b) {
  TensorElement t({a.degree, b.degree});
  for (const auto& [ma, va] : a.terms)
    for (const auto& [mb, vb] : b.terms) t.add({ma, mb}, va * vb);
  return t;
}

// ---- monomial engine ------------------------------------------------------

// x * xi^{c2 H}: commute the Cartan factor to the left.
static void rmul_cartan(const RootConfig& cfg, const GDegree& deg,
                        std::vector<std::pair<Mono, Scalar>>& acc, const Rational& c2) {
  if (c2.is_zero()) return;
  for (auto& [m, v] : acc) {
    // E^i F^j K^k . xi^{c2 H} = xi^{c2 (j-i)} xi^{c2 H} E^i F^j K^k
    v *= cfg.xi_pow(c2 * Rational(m.j - m.i));
    Rational c = m.c + c2;
    long long t = c.floor();
    c = c - Rational(t);
    if (t != 0) {
      // xi^{tH} = K^t passes E^i F^j picking xi^{t(i-j)}
      v *= cfg.xi_pow(Rational(t) * Rational(m.i - m.j));
      auto [k, ph] = reduce_k(cfg, deg, (long long)m.k + t);
      m.k = k;
      v *= ph;
    }
    m.c = c;
  }
}

static void rmul_K(const RootConfig& cfg, const GDegree& deg,
                   std::vector<std::pair<Mono, Scalar>>& acc, long long power) {
  for (auto& [m, v] : acc) {
    auto [k, ph] = reduce_k(cfg, deg, (long long)m.k + power);
    m.k = k;
    v *= ph;
  }
}

// x * E with F^j E = E F^j - F^{j-1}([j]_{xi^-2} K^2 - [j]_{xi^2} K^-2)/(xi - xi^-1)
static void rmul_E(const RootConfig& cfg, const GDegree& deg,
                   std::vector<std::pair<Mono, Scalar>>& acc) {
  const Scalar xi = cfg.xi_pow(1), xiinv = cfg.xi_pow(-1);
  const Scalar denom = xi - xiinv;
  std::vector<std::pair<Mono, Scalar>> out;
  out.reserve(acc.size() * 3);
  for (const auto& [m, v0] : acc) {
    Scalar v = v0 * cfg.xi_pow(m.k);  // move E past K^k
    if (m.i + 1 < cfg.ell_prime) {
      Mono t = m;
      t.i += 1;
      out.emplace_back(t, v);
    }
    if (m.j >= 1) {
      Scalar bra_neg = 0, bra_pos = 0;  // [j]_{xi^-2}, [j]_{xi^2}
      for (int s = 0; s < m.j; ++s) {
        bra_neg += cfg.xi_pow(-2 * (long long)s);
        bra_pos += cfg.xi_pow(2 * (long long)s);
      }
      Mono t = m;
      t.j -= 1;
      auto [k2, ph2] = reduce_k(cfg, deg, (long long)m.k + 2);
      Mono t2 = t;
      t2.k = k2;
      out.emplace_back(t2, -v * bra_neg * ph2 / denom);
      auto [km2, phm2] = reduce_k(cfg, deg, (long long)m.k - 2);
      Mono tm2 = t;
      tm2.k = km2;
      out.emplace_back(tm2, v * bra_pos * phm2 / denom);
    }
  }
  acc = std::move(out);
}

static void rmul_F(const RootConfig& cfg, const GDegree&,
                   std::vector<std::pair<Mono, Scalar>>& acc) {
  std::vector<std::pair<Mono, Scalar>> out;
  out.reserve(acc.size());
  for (const auto& [m, v0] : acc) {
    if (m.j + 1 >= cfg.ell_prime) continue;  // F^{ell'} = 0
    Mono t = m;
    t.j += 1;
    out.emplace_back(t, v0 * cfg.xi_pow(-(long long)m.k));  // move F past K^k
  }
  acc = std::move(out);
}

std::vector<std::pair<Mono, Scalar>> mono_mul(const RootConfig& cfg, const GDegree& deg,
                                              const Mono& a, const Mono& b) {
  std::vector<std::pair<Mono, Scalar>> acc{{a, Scalar(1)}};
  rmul_cartan(cfg, deg, acc, b.c);
  for (int t = 0; t < b.i; ++t) rmul_E(cfg, deg, acc);
  for (int t = 0; t < b.j; ++t) rmul_F(cfg, deg, acc);
  if (b.k) rmul_K(cfg, deg, acc, b.k);
  return acc;
}

AlgebraElement multiply(const RootConfig& cfg, const AlgebraElement& a, const AlgebraElement& b) {
  if (!(a.degree == b.degree)) throw DegreeMismatch("multiply: degree mismatch");
  AlgebraElement r(a.degree);
  for (const auto& [mb, vb] : b.terms)
    for (const auto& [ma, va] : a.terms)
      for (const auto& [m, v] : mono_mul(cfg, a.degree, ma, mb)) r.add(m, va * vb * v);
  r.prune();
  return r;
}

TensorElement tensor_multiply(const RootConfig& cfg, const TensorElement& a,
                              const TensorElement& b) {
  if (a.degrees.size() != b.degrees.size())
    throw DegreeMismatch("tensor_multiply: arity mismatch");
  for (size_t s = 0; s < a.degrees.size(); ++s)
    if (!(a.degrees[s] == b.degrees[s])) throw DegreeMismatch("tensor_multiply: degree mismatch");
  const int n = a.arity();
  TensorElement r(a.degrees);
  for (const auto& [mb, vb] : b.terms)
    for (const auto& [ma, va] : a.terms) {
      // expand slotwise products
      std::vector<std::pair<std::vector<Mono>, Scalar>> partial{{{}, va * vb}};
      for (int s = 0; s < n; ++s) {
        auto prods = mono_mul(cfg, a.degrees[(size_t)s], ma[(size_t)s], mb[(size_t)s]);
        std::vector<std::pair<std::vector<Mono>, Scalar>> next;
        next.reserve(partial.size() * prods.size());
        for (const auto& [key, kv] : partial)
          for (const auto& [m, v] : prods) {
            auto nk = key;
            nk.push_back(m);
            next.emplace_back(std::move(nk), kv * v);
          }
        partial = std::move(next);
      }
      for (auto& [key, kv] : partial) r.add(key, kv);
    }
  r.prune();
  return r;
}

// ---- Hopf maps ------------------------------------------------------------

static TensorElement coproduct_E(const GDegree& a, const GDegree& b) {
  TensorElement t({a, b});
  t.add({Mono{}, Mono{Rational(0), 1, 0, 0}}, 1);                      // 1 (x) E
  t.add({Mono{Rational(0), 1, 0, 0}, Mono{Rational(0), 0, 0, 2}}, 1);  // E (x) K^2
  return t;
}

static TensorElement coproduct_F(const RootConfig& cfg, const GDegree& a, const GDegree& b) {
  TensorElement t({a, b});
  auto [k, ph] = [&] {
    AlgebraElement km2 = gen_K(cfg, a, -2);
    auto it = km2.terms.begin();
    return std::pair<int, Scalar>(it->first.k, it->second);
  }();
  t.add({Mono{Rational(0), 0, 0, k}, Mono{Rational(0), 0, 1, 0}}, ph);  // K^-2 (x) F
  t.add({Mono{Rational(0), 0, 1, 0}, Mono{}}, 1);                       // F (x) 1
  return t;
}

TensorElement coproduct(const RootConfig& cfg, const AlgebraElement& x, const GDegree& alpha,
                        const GDegree& beta) {
  if (!(x.degree == gdeg_add(alpha, beta)))
    throw DegreeMismatch("coproduct: element degree is not alpha+beta");
  TensorElement result({alpha, beta});
  const TensorElement dE = coproduct_E(alpha, beta);
  const TensorElement dF = coproduct_F(cfg, alpha, beta);
  // cache powers as needed
  std::vector<TensorElement> powE{tensor_unit({alpha, beta})};
  std::vector<TensorElement> powF{tensor_unit({alpha, beta})};
  auto getE = [&](int n) -> const TensorElement& {
    while ((int)powE.size() <= n) powE.push_back(tensor_multiply(cfg, powE.back(), dE));
    return powE[(size_t)n];
  };
  auto getF = [&](int n) -> const TensorElement& {
    while ((int)powF.size() <= n) powF.push_back(tensor_multiply(cfg, powF.back(), dF));
    return powF[(size_t)n];
  };
  for (const auto& [m, v] : x.terms) {
    // Delta is multiplicative on xi^{cH} . E^i . F^j . K^k; both Cartan
    // factors are grouplike, xi^{cH} multiplies on the left and K^k on the
    // right of the E/F part.
    TensorElement t = tensor_multiply(cfg, getE(m.i), getF(m.j));
    if (m.k) {
      TensorElement ck = outer(cfg, gen_K(cfg, alpha, m.k), gen_K(cfg, beta, m.k));
      t = tensor_multiply(cfg, t, ck);
    }
    if (!m.c.is_zero()) {
      AlgebraElement fa(alpha), fb(beta);
      fa.terms[Mono{m.c, 0, 0, 0}] = 1;
      fb.terms[Mono{m.c, 0, 0, 0}] = 1;
      t = tensor_multiply(cfg, outer(cfg, fa, fb), t);
    }
    result += t * v;
  }
  result.prune();
  return result;
}

AlgebraElement antipode(const RootConfig& cfg, const AlgebraElement& x) {
  GDegree target = gdeg_neg(x.degree);
  AlgebraElement r(target);
  for (const auto& [m, v] : x.terms) {
    // S(xi^{cH} E^i F^j K^k) = K^{-k} (-K^2 F)^j (-E K^{-2})^i xi^{-cH}
    std::vector<std::pair<Mono, Scalar>> acc{{Mono{}, Scalar(1)}};
    rmul_K(cfg, target, acc, -(long long)m.k);
    for (int t = 0; t < m.j; ++t) {
      rmul_K(cfg, target, acc, 2);
      rmul_F(cfg, target, acc);
    }
    for (int t = 0; t < m.i; ++t) {
      rmul_E(cfg, target, acc);
      rmul_K(cfg, target, acc, -2);
    }
    rmul_cartan(cfg, target, acc, -m.c);
    Scalar sign = ((m.i + m.j) % 2) ? Scalar(-1) : Scalar(1);
    for (const auto& [mm, vv] : acc) r.add(mm, v * vv * sign);
  }
  r.prune();
  return r;
}

AlgebraElement antipode_inv(const RootConfig& cfg, const AlgebraElement& x) {
  // S^{-1} = conj by pivot after S:  S^{-1} = g^{-1} S(.) g ... more directly:
  // S(S^{-1}(x)) = x and S^2 = conj by g, so S^{-1}(x) = g^{-1} S(x) g.
  AlgebraElement s = antipode(cfg, x);
  AlgebraElement g = pivot(cfg, s.degree);
  AlgebraElement ginv = gen_K(cfg, s.degree, 2 * (long long)cfg.ell_prime - 2);
  return multiply(cfg, multiply(cfg, ginv, s), g);
}

Scalar counit(const RootConfig& cfg, const AlgebraElement& x) {
  if (!x.degree.is_zero() && !(x.degree == Rational(0)))
    throw DegreeMismatch("counit is defined on degree 0");
  Scalar s = 0;
  for (const auto& [m, v] : x.terms)
    if (m.i == 0 && m.j == 0) s += v;
  (void)cfg;
  return s;
}

// ---- tensor utilities ------------------------------------------------------

TensorElement tensor_flip(const TensorElement& t) {
  TensorElement r({t.degrees[1], t.degrees[0]});
  for (const auto& [m, v] : t.terms) r.add({m[1], m[0]}, v);
  return r;
}

TensorElement tensor_embed(const TensorElement& t2, int arity, int p0, int p1,
                           const std::vector<GDegree>& degs) {
  TensorElement r(degs);
  for (const auto& [m, v] : t2.terms) {
    std::vector<Mono> key((size_t)arity);
    key[(size_t)p0] = m[0];
    key[(size_t)p1] = m[1];
    r.add(key, v);
  }
  return r;
}

TensorElement tensor_coproduct_slot(const RootConfig& cfg, const TensorElement& t, int slot,
                                    const GDegree& a, const GDegree& b) {
  std::vector<GDegree> degs;
  for (int s = 0; s < t.arity(); ++s) {
    if (s == slot) {
      degs.push_back(a);
      degs.push_back(b);
    } else
      degs.push_back(t.degrees[(size_t)s]);
  }
  TensorElement r(degs);
  for (const auto& [m, v] : t.terms) {
    AlgebraElement x(gdeg_add(a, b));
    x.terms[m[(size_t)slot]] = 1;
    TensorElement dx = coproduct(cfg, x, a, b);
    for (const auto& [dm, dv] : dx.terms) {
      std::vector<Mono> key;
      for (int s = 0; s < t.arity(); ++s) {
        if (s == slot) {
          key.push_back(dm[0]);
          key.push_back(dm[1]);
        } else
          key.push_back(m[(size_t)s]);
      }
      r.add(key, v * dv);
    }
  }
  r.prune();
  return r;
}

TensorElement tensor_antipode_slot(const RootConfig& cfg, const TensorElement& t, int slot) {
  std::vector<GDegree> degs = t.degrees;
  degs[(size_t)slot] = gdeg_neg(degs[(size_t)slot]);
  TensorElement r(degs);
  for (const auto& [m, v] : t.terms) {
    AlgebraElement x(t.degrees[(size_t)slot]);
    x.terms[m[(size_t)slot]] = 1;
    AlgebraElement sx = antipode(cfg, x);
    for (const auto& [sm, sv] : sx.terms) {
      auto key = m;
      key[(size_t)slot] = sm;
      r.add(key, v * sv);
    }
  }
  r.prune();
  return r;
}

AlgebraElement tensor_contract_mul(const RootConfig& cfg, const TensorElement& t) {
  if (t.arity() != 2) throw DegreeMismatch("tensor_contract_mul: arity must be 2");
  if (!(t.degrees[0] == t.degrees[1]))
    throw DegreeMismatch("tensor_contract_mul: slots must share one quotient");
  GDegree target = t.degrees[0];
  AlgebraElement r(target);
  for (const auto& [m, v] : t.terms)
    for (const auto& [mm, vv] : mono_mul(cfg, target, m[0], m[1])) r.add(mm, v * vv);
  r.prune();
  return r;
}

AlgebraElement tensor_slot_counit(const RootConfig& cfg, const TensorElement& t, int slot) {
  if (t.arity() != 2) throw DegreeMismatch("tensor_slot_counit: arity must be 2");
  int other = 1 - slot;
  AlgebraElement r(t.degrees[(size_t)other]);
  for (const auto& [m, v] : t.terms) {
    const Mono& cm = m[(size_t)slot];
    if (cm.i == 0 && cm.j == 0) r.add(m[(size_t)other], v);
  }
  (void)cfg;
  r.prune();
  return r;
}

// ---- R-matrix ----------------------------------------------------------------

std::vector<Scalar> quasi_r_coeffs(const RootConfig& cfg) {
  const Scalar xi = cfg.xi_pow(1), xiinv = cfg.xi_pow(-1);
  std::vector<Scalar> c((size_t)cfg.ell_prime);
  c[0] = 1;
  Scalar fact = 1;  // [j; xi^{-2}]!
  Scalar pw = 1;    // (xi - xi^{-1})^j
  for (int j = 1; j < cfg.ell_prime; ++j) {
    Scalar qbr = 0;  // [j; xi^{-2}]
    for (int t = 0; t < j; ++t) qbr += cfg.xi_pow(-2 * (long long)t);
    fact *= qbr;
    pw *= (xi - xiinv);
    c[(size_t)j] = pw / fact;
  }
  return c;
}

std::vector<Scalar> quasi_r_inv_coeffs(const RootConfig& cfg) {
  auto c = quasi_r_coeffs(cfg);
  std::vector<Scalar> d(c.size());
  d[0] = 1;
  for (size_t n = 1; n < c.size(); ++n) {
    Scalar s = 0;
    for (size_t a = 1; a <= n; ++a) s += c[a] * d[n - a];
    d[n] = -s;
  }
  return d;
}

TensorElement quasi_r_matrix(const RootConfig& cfg, const GDegree& alpha, const GDegree& beta) {
  auto c = quasi_r_coeffs(cfg);
  TensorElement t({alpha, beta});
  for (int j = 0; j < cfg.ell_prime; ++j)
    t.add({Mono{Rational(0), j, 0, 0}, Mono{Rational(0), 0, j, 0}}, c[(size_t)j]);
  return t;
}

CrossingOp r_matrix_quotient(const RootConfig& cfg, int sign, const GDegree& alpha,
                             const GDegree& beta) {
  ExponentPoly q = ExponentPoly::quadratic(0, 1, 2 * (long long)sign);
  Lattice lat({alpha, beta});
  auto [lin, fe] = reduce_quadratic(cfg, q, lat);

  TensorElement hpart({alpha, beta});
  for (int k0 = 0; k0 < cfg.ell; ++k0)
    for (int k1 = 0; k1 < cfg.ell; ++k1) {
      Scalar v = fe.at(k0, k1);
      if (std::abs(v) < 1e-15) continue;
      hpart.add({Mono{Rational(0), 0, 0, k0}, Mono{Rational(0), 0, 0, k1}}, v);
    }

  auto coeffs = sign > 0 ? quasi_r_coeffs(cfg) : quasi_r_inv_coeffs(cfg);
  TensorElement quasi({alpha, beta});
  for (int j = 0; j < cfg.ell_prime; ++j)
    quasi.add({Mono{Rational(0), j, 0, 0}, Mono{Rational(0), 0, j, 0}}, coeffs[(size_t)j]);

  CrossingOp op;
  op.linear = lin;
  // R = H qR and R^{-1} = qR^{-1} H^{-1}
  op.body = sign > 0 ? tensor_multiply(cfg, hpart, quasi) : tensor_multiply(cfg, quasi, hpart);
  op.body.prune();
  return op;
}

AlgebraElement twist_zero(const RootConfig& cfg) {
  const GDegree zero{Rational(0)};
  // m(H_0): one-variable reduction of xi^{2 H^2} on the integer lattice
  ExponentPoly q = ExponentPoly::quadratic(0, 0, 2);
  auto [lin, fe] = reduce_quadratic(cfg, q, Lattice({Rational(0)}));
  AlgebraElement mh(zero);
  for (int k = 0; k < cfg.ell; ++k)
    if (std::abs(fe.at(k)) > 1e-15) mh.add(Mono{Rational(0), 0, 0, k}, fe.at(k));
  // sum_j c_j F^j g E^j K^{2j}
  auto c = quasi_r_coeffs(cfg);
  AlgebraElement w(zero);
  for (int j = 0; j < cfg.ell_prime; ++j) {
    AlgebraElement term = unit(zero);
    for (int t = 0; t < j; ++t) term = multiply(cfg, term, gen_F(zero));
    term = multiply(cfg, term, pivot(cfg, zero));
    for (int t = 0; t < j; ++t) term = multiply(cfg, term, gen_E(zero));
    term = multiply(cfg, term, gen_K(cfg, zero, 2 * (long long)j));
    w += term * c[(size_t)j];
  }
  AlgebraElement theta = multiply(cfg, mh, w);
  theta.prune();
  return theta;
}

AlgebraElement twist_zero_inverse(const RootConfig& cfg) {
  const GDegree zero{Rational(0)};
  AlgebraElement theta = twist_zero(cfg);
  Mat L = left_regular(cfg, theta);
  std::vector<Scalar> rhs = to_vector(cfg, unit(zero));
  std::vector<Scalar> x;
  try {
    x = lu_solve(L, rhs);
  } catch (const NotInvertible&) {
    throw NotInvertible("twist is not invertible in U_0");
  }
  AlgebraElement inv = from_vector(cfg, zero, x);
  inv.prune();
  return inv;
}

// ---- linear algebra views ----------------------------------------------------

int algebra_dim(const RootConfig& cfg) { return cfg.ell_prime * cfg.ell_prime * cfg.ell; }

int mono_flat_index(const RootConfig& cfg, const Mono& m) {
  if (!m.c.is_zero()) throw FractionalCartan("flat index of fractional-Cartan monomial");
  return (m.i * cfg.ell_prime + m.j) * cfg.ell + m.k;
}

Mono mono_from_flat(const RootConfig& cfg, int idx) {
  Mono m;
  m.k = idx % cfg.ell;
  idx /= cfg.ell;
  m.j = idx % cfg.ell_prime;
  m.i = idx / cfg.ell_prime;
  return m;
}

std::vector<Scalar> to_vector(const RootConfig& cfg, const AlgebraElement& x) {
  std::vector<Scalar> v((size_t)algebra_dim(cfg), Scalar(0));
  for (const auto& [m, c] : x.terms) {
    if (!m.c.is_zero()) {
      if (std::abs(c) > 1e-12)
        throw FractionalCartan("element has fractional Cartan part: " + m.c.str());
      continue;
    }
    v[(size_t)mono_flat_index(cfg, m)] += c;
  }
  return v;
}

AlgebraElement from_vector(const RootConfig& cfg, const GDegree& deg,
                           const std::vector<Scalar>& v) {
  AlgebraElement x(deg);
  for (int i = 0; i < algebra_dim(cfg); ++i)
    if (std::abs(v[(size_t)i]) > 1e-15) x.add(mono_from_flat(cfg, i), v[(size_t)i]);
  return x;
}

Mat left_regular(const RootConfig& cfg, const AlgebraElement& x) {
  const int n = algebra_dim(cfg);
  Mat L(n, n);
  par::parallel_for(n, [&](int col) {
    AlgebraElement b(x.degree);
    b.terms[mono_from_flat(cfg, col)] = 1;
    AlgebraElement p = multiply(cfg, x, b);
    for (const auto& [m, v] : p.terms) L(mono_flat_index(cfg, m), col) = v;
  });
  return L;
}

Mat right_regular(const RootConfig& cfg, const AlgebraElement& x) {
  const int n = algebra_dim(cfg);
  Mat R(n, n);
  par::parallel_for(n, [&](int col) {
    AlgebraElement b(x.degree);
    b.terms[mono_from_flat(cfg, col)] = 1;
    AlgebraElement p = multiply(cfg, b, x);
    for (const auto& [m, v] : p.terms) R(mono_flat_index(cfg, m), col) = v;
  });
  return R;
}

AlgebraElement weight_project(const AlgebraElement& x, long long nu) {
  AlgebraElement r(x.degree);
  for (const auto& [m, v] : x.terms)
    if (m.weight() == nu) r.terms[m] = v;
  return r;
}

std::string to_string(const AlgebraElement& x) {
  if (x.terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, v] : x.terms) {
    if (!first) os << " + ";
    first = false;
    if (!m.c.is_zero()) os << "xi^(" << m.c.str() << " H) ";
    if (m.i) os << "E^" << m.i << " ";
    if (m.j) os << "F^" << m.j << " ";
    if (m.k) os << "K^" << m.k << " ";
    os << "* (" << v.real() << (v.imag() < 0 ? "" : "+") << v.imag() << "i)";
  }
  return os.str();
}

}  // namespace ghinv
