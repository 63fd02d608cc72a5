#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ghinv/errors.hpp"
#include "ghinv/integrals.hpp"
#include "helpers.hpp"

using namespace ghinv;
using namespace ghinv::testing;

TEST_CASE("symmetrized integral delta conditions") {
  RootConfig cfg(5);
  GDegree a = gdeg(Rational(1, 3));
  CHECK(std::abs(symmetrized_integral(cfg, unit(a))) < 1e-12);
  AlgebraElement top(a);
  top.terms[Mono{Rational(0), cfg.ell_prime - 1, cfg.ell_prime - 1, 0}] = 1;
  CHECK(std::abs(symmetrized_integral(cfg, top) - eta_normalization(cfg)) < 1e-9);
  AlgebraElement topk(a);
  topk.terms[Mono{Rational(0), cfg.ell_prime - 1, cfg.ell_prime - 1, 1}] = 1;
  CHECK(std::abs(symmetrized_integral(cfg, topk)) < 1e-12);

  AlgebraElement frac(a);
  frac.terms[Mono{Rational(1, 2), 1, 1, 0}] = 1;
  CHECK_THROWS_AS(symmetrized_integral(cfg, frac), FractionalCartan);
}

TEST_CASE("integral of the twist pins the normalization") {
  // lambda(theta) = xi^{-1} with the eta normalization.  The inverse twist
  // integrates against the conjugate Gauss sum: lambda(theta^{-1}) =
  // xi * conj(S)/S with S = sum xi^{2k^2-2k}, so the product is a unit
  // phase conj(S)/S rather than 1.
  for (int l : {3, 5}) {
    RootConfig cfg(l);
    Scalar delta = twist_integral(cfg);
    Scalar delta_bar = twist_inverse_integral(cfg);
    CHECK(std::abs(delta - cfg.xi_pow(-1)) < 1e-9);
    Scalar s = cfg.gauss_sum();
    CHECK(std::abs(delta_bar - cfg.xi_pow(1) * std::conj(s) / s) < 1e-9);
    CHECK(std::abs(std::abs(delta * delta_bar) - 1.0) < 1e-9);
  }
}

TEST_CASE("mu cyclicity, S-invariance and weight-zero support") {
  RootConfig cfg(5);
  std::mt19937_64 rng(31);
  GDegree a = gdeg(Rational(2, 7));
  for (int t = 0; t < 30; ++t) {
    auto x = random_element(cfg, a, rng);
    auto y = random_element(cfg, a, rng);
    Scalar lhs = symmetrized_integral(cfg, multiply(cfg, x, y));
    Scalar rhs = symmetrized_integral(cfg, multiply(cfg, y, x));
    CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(lhs)));
  }
  for (int t = 0; t < 10; ++t) {
    auto x = random_element(cfg, a, rng);
    Scalar lhs = symmetrized_integral(cfg, antipode(cfg, x));  // mu_{-a}(S(x))
    Scalar rhs = symmetrized_integral(cfg, x);
    CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(rhs)));
  }
  // mu vanishes on nonzero-weight projections
  for (int t = 0; t < algebra_dim(cfg); ++t) {
    Mono m = mono_from_flat(cfg, t);
    if (m.weight() == 0) continue;
    AlgebraElement x(a);
    x.terms[m] = 1;
    CHECK(std::abs(symmetrized_integral(cfg, x)) < 1e-12);
  }
}

TEST_CASE("right integral identity and antipode-squared trace relation") {
  RootConfig cfg(3);
  std::mt19937_64 rng(7);
  for (auto [pa, pb] : std::vector<std::pair<Rational, Rational>>{
           {Rational(0), Rational(0)}, {Rational(1, 4), Rational(1, 3)}}) {
    GDegree a = gdeg(pa), b = gdeg(pb), ab = gdeg_add(a, b);
    // (lambda_a (x) Id) Delta_{a,b}(x) = lambda_{a+b}(x) 1_b over the basis
    double worst = 0;
    for (int t = 0; t < algebra_dim(cfg); ++t) {
      AlgebraElement x(ab);
      x.terms[mono_from_flat(cfg, t)] = 1;
      TensorElement dx = coproduct(cfg, x, a, b);
      AlgebraElement lhs(b);
      for (const auto& [m, v] : dx.terms) {
        AlgebraElement first(a);
        first.terms[m[0]] = 1;
        Scalar lam = right_integral(cfg, first);
        if (std::abs(lam) > 1e-15) lhs.add(m[1], v * lam);
      }
      AlgebraElement rhs = unit(b) * right_integral(cfg, x);
      worst = std::max(worst, (lhs - rhs).max_abs());
    }
    CHECK(worst < 1e-9);
  }
  // lambda(x y) = lambda(S_{-a}S_a(y) x)
  GDegree a = gdeg(Rational(1, 4));
  for (int t = 0; t < 20; ++t) {
    auto x = random_element(cfg, a, rng);
    auto y = random_element(cfg, a, rng);
    Scalar lhs = right_integral(cfg, multiply(cfg, x, y));
    Scalar rhs = right_integral(cfg, multiply(cfg, antipode(cfg, antipode(cfg, y)), x));
    CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("cointegral") {
  RootConfig cfg(3);
  auto up = cointegral_solve(cfg);
  // weight zero
  for (const auto& [m, v] : up.terms)
    if (std::abs(v) > 1e-12) CHECK(m.weight() == 0);
  // normalization
  CHECK(std::abs(right_integral(cfg, up) - Scalar(1)) < 1e-9);
  // x Upsilon = Upsilon x = eps(x) Upsilon for random x
  std::mt19937_64 rng(13);
  GDegree zero = gdeg(Rational(0));
  for (int t = 0; t < 5; ++t) {
    auto x = random_element(cfg, zero, rng);
    Scalar eps = counit(cfg, x);
    CHECK(elem_diff(multiply(cfg, x, up), up * eps) < 1e-8 * std::max(1.0, up.max_abs()));
    CHECK(elem_diff(multiply(cfg, up, x), up * eps) < 1e-8 * std::max(1.0, up.max_abs()));
  }
}

TEST_CASE("distinguished grouplike is the squared pivot") {
  RootConfig cfg(3);
  GDegree zero = gdeg(Rational(0));
  // gamma_0 = K^{4 - 4 ell'} reduced
  auto gamma = distinguished_grouplike(cfg, zero);
  auto expect = gen_K(cfg, zero, 4 - 4 * (long long)cfg.ell_prime);
  CHECK(elem_diff(gamma, expect) < 1e-12);
  // left integral identity on a full basis
  CHECK(verify_distinguished(cfg, gdeg(Rational(1, 4)), gdeg(Rational(1, 3))) < 1e-9);
  CHECK(verify_distinguished(cfg, zero, zero) < 1e-9);
  // G-grouplike: Delta_{a,b}(gamma_{a+b}) = gamma_a (x) gamma_b
  GDegree a = gdeg(Rational(1, 5)), b = gdeg(Rational(1, 7));
  auto d = coproduct(cfg, distinguished_grouplike(cfg, gdeg_add(a, b)), a, b);
  auto want = outer(cfg, distinguished_grouplike(cfg, a), distinguished_grouplike(cfg, b));
  CHECK(tensor_diff(d, want) < 1e-9);
}

TEST_CASE("mu through the Fourier sum formula") {
  RootConfig cfg(3);
  GDegree a = gdeg(Rational(1, 4));
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> coeff(-1, 1);
  // x = sum_{i,j,t} c_{ijt} E^i F^j K^t; mu(x) = (eta/ell) sum_k phi_top(alpha+k)
  for (int trial = 0; trial < 3; ++trial) {
    AlgebraElement x(a);
    std::map<int, Scalar> top_phi;  // K-coefficients of the (ell'-1, ell'-1) part
    for (int i = 0; i < cfg.ell_prime; ++i)
      for (int j = 0; j < cfg.ell_prime; ++j)
        for (int t = 0; t < cfg.ell; ++t) {
          Scalar c(coeff(rng), coeff(rng));
          AlgebraElement term = unit(a);
          for (int s = 0; s < i; ++s) term = multiply(cfg, term, gen_E(a));
          for (int s = 0; s < j; ++s) term = multiply(cfg, term, gen_F(a));
          term = multiply(cfg, term, gen_K(cfg, a, t));
          x += term * c;
          if (i == cfg.ell_prime - 1 && j == cfg.ell_prime - 1) top_phi[t] += c;
        }
    Scalar sum = 0;
    for (int k = 0; k < cfg.ell; ++k)
      for (const auto& [t, c] : top_phi) sum += c * cfg.xi_pow(Rational(t) * (a + Rational(k)));
    Scalar want = eta_normalization(cfg) / Scalar(cfg.ell) * sum;
    Scalar got = symmetrized_integral(cfg, x);
    CHECK(std::abs(got - want) < 1e-8 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("modified dimensions") {
  RootConfig cfg(3);
  GDegree a = gdeg(Rational(1, 5));
  auto data = modified_integral_data(cfg, a);
  // d_i = mu(z_i)/n_i by construction; cross-check by the sample solve
  auto solved = modified_dimensions_solve(cfg, a, 5);
  REQUIRE(solved.size() == data.mod_dims.size());
  for (size_t i = 0; i < solved.size(); ++i)
    CHECK(std::abs(solved[i] - data.mod_dims[i]) < 1e-7 * std::max(1.0, std::abs(solved[i])));
  // reconstruction mu(x) = sum_i d_i tr(rho_i(x)) on random x
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    auto x = random_element(cfg, a, rng);
    Scalar want = symmetrized_integral(cfg, x);
    Scalar got = 0;
    for (size_t i = 0; i < data.dec.blocks.size(); ++i)
      got += data.mod_dims[i] * data.dec.blocks[i].act(cfg, x).trace();
    CHECK(std::abs(got - want) < 1e-8 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("modified integral") {
  RootConfig cfg(3);
  GDegree a = gdeg(Rational(1, 5));
  auto data = modified_integral_data(cfg, a);
  // mu'(z_i) = d_i^2
  for (size_t i = 0; i < data.dec.idempotents.size(); ++i) {
    Scalar got = modified_integral(cfg, data, data.dec.idempotents[i]);
    Scalar want = data.mod_dims[i] * data.mod_dims[i];
    CHECK(std::abs(got - want) < 1e-8 * std::max(1.0, std::abs(want)));
  }
  // mu'(1) against the regular-representation trace of L_{z^2}
  Scalar lhs = modified_integral(cfg, data, unit(a));
  Mat L = left_regular(cfg, multiply(cfg, data.z_deg, data.z_deg));
  CHECK(std::abs(lhs - L.trace()) < 1e-8 * std::max(1.0, std::abs(lhs)));
  // non-central input is rejected
  CHECK_THROWS_AS(modified_integral(cfg, data, gen_E(a)), NotCentral);
}

TEST_CASE("bipartite defining relation of the modified integral") {
  RootConfig cfg(3);
  GDegree a = gdeg(Rational(1, 5)), b = gdeg(Rational(1, 8));
  auto da = modified_integral_data(cfg, a);
  auto db = modified_integral_data(cfg, b);
  auto zbasis = centralizer_basis_pair(cfg, a, b);
  REQUIRE(zbasis.size() >= 3);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> coeff(-1, 1);
  AlgebraElement ga_inv = gen_K(cfg, a, 2 * (long long)cfg.ell_prime - 2);
  AlgebraElement gb = pivot(cfg, b);
  for (int trial = 0; trial < 20; ++trial) {
    TensorElement z({a, b});
    for (const auto& zb : zbasis) z += zb * Scalar(coeff(rng), coeff(rng));
    // (mu_a L_{g_a^{-1}} (x) mu'_b)(z) = (mu'_a (x) mu_b L_{g_b})(z)
    Scalar lhs = 0, rhs = 0;
    std::map<Mono, AlgebraElement> by_first, by_second;
    for (const auto& [m, v] : z.terms) {
      auto& accA = by_first.try_emplace(m[0], AlgebraElement(b)).first->second;
      accA.add(m[1], v);
      auto& accB = by_second.try_emplace(m[1], AlgebraElement(a)).first->second;
      accB.add(m[0], v);
    }
    for (const auto& [m0, second] : by_first) {
      AlgebraElement first(a);
      first.terms[m0] = 1;
      Scalar muA = symmetrized_integral(cfg, multiply(cfg, ga_inv, first));
      if (std::abs(muA) < 1e-14) continue;
      lhs += muA * symmetrized_integral(cfg, multiply(cfg, db.z_deg, second));
    }
    for (const auto& [m1, first] : by_second) {
      AlgebraElement second(b);
      second.terms[m1] = 1;
      Scalar muB = symmetrized_integral(cfg, multiply(cfg, gb, second));
      if (std::abs(muB) < 1e-14) continue;
      rhs += muB * symmetrized_integral(cfg, multiply(cfg, da.z_deg, first));
    }
    CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("m-trace") {
  RootConfig cfg(3);
  GDegree a = gdeg(Rational(1, 5));
  auto data = modified_integral_data(cfg, a);
  auto v = typical_module(cfg, Rational(1, 5));
  // t(Id_V) = d(V); V matches the k = 0 block
  Scalar dv = modified_dimension(cfg, data, v);
  CHECK(std::abs(dv - data.mod_dims[0]) < 1e-9 * std::max(1.0, std::abs(dv)));
  // non-intertwiner rejected
  Mat bad(v.dim, v.dim);
  bad(0, 1) = 1;
  CHECK_THROWS_AS(m_trace(cfg, data, v, bad), NotIntertwiner);

  // cyclicity and partial trace on a tensor square at a semisimple degree
  GDegree a2 = gdeg_add(a, a);
  auto data2 = modified_integral_data(cfg, a2);
  auto vv = tensor_module(cfg, v, v);
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> coeff(-1, 1);
  auto random_intertwiner = [&]() {
    Mat f(vv.dim, vv.dim);
    for (const auto& z : data2.dec.idempotents)
      f = f + vv.act(cfg, z) * Scalar(coeff(rng), coeff(rng));
    return f;
  };
  for (int t = 0; t < 5; ++t) {
    Mat f = random_intertwiner(), g = random_intertwiner();
    Scalar lhs = m_trace(cfg, data2, vv, f * g);
    Scalar rhs = m_trace(cfg, data2, vv, g * f);
    CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, std::abs(lhs)));
    // t_{V (x) W}(f) = t_V(ptr_r(f))
    Scalar whole = m_trace(cfg, data2, vv, f);
    Scalar cut = m_trace(cfg, data, v, partial_trace_right(cfg, v, v, f));
    CHECK(std::abs(whole - cut) < 1e-8 * std::max(1.0, std::abs(whole)));
  }
}

TEST_CASE("m-trace reproduces mu on the regular module") {
  // t_{U_a}(R_x) = mu_a(x): right multiplication is an intertwiner of the
  // left regular module; its m-trace via the block data equals the integral.
  RootConfig cfg(3);
  GDegree a = gdeg(Rational(1, 5));
  auto data = modified_integral_data(cfg, a);
  std::mt19937_64 rng(41);
  for (int t = 0; t < 5; ++t) {
    auto x = random_element(cfg, a, rng, 3);
    Mat Rx = right_regular(cfg, x);
    Scalar lhs = 0;
    for (size_t i = 0; i < data.dec.idempotents.size(); ++i) {
      Mat zi = left_regular(cfg, data.dec.idempotents[i]);
      lhs += (Rx * zi).trace() * (data.mod_dims[i] / Scalar(cfg.ell_prime));
    }
    Scalar rhs = symmetrized_integral(cfg, x);
    CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("integral cache") {
  RootConfig cfg(3);
  IntegralCache cache(cfg);
  CHECK(cache.degree_semisimple(gdeg(Rational(1, 5))));
  CHECK_FALSE(cache.degree_semisimple(gdeg(Rational(0))));
  const auto& d = cache.at(gdeg(Rational(1, 5)));
  CHECK(d.mod_dims.size() == (size_t)cfg.ell);
}
