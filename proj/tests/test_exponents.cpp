#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ghinv/errors.hpp"
#include "ghinv/exponents.hpp"
#include "ghinv/kernels.hpp"

using namespace ghinv;

TEST_CASE("polarize worked examples") {
  // q = H0*H1, at = (a, b) -> b*H0 + a*H1
  ExponentPoly q = ExponentPoly::quadratic(0, 1, 1);
  auto l = polarize(q, {Rational(1, 3), Rational(1, 2)});
  CHECK(l.lin.at(0) == Rational(1, 2));
  CHECK(l.lin.at(1) == Rational(1, 3));
  CHECK(l.quad_zero());

  // q = 0 -> 0
  CHECK(polarize(ExponentPoly{}, {Rational(1)}).is_zero());

  // q = 2 H0^2, at = (a) -> 4a H0
  ExponentPoly q2 = ExponentPoly::quadratic(0, 0, 2);
  auto l2 = polarize(q2, {Rational(1, 5)});
  CHECK(l2.lin.at(0) == Rational(4, 5));
}

TEST_CASE("polarize is bilinear in the evaluation point") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long long> coeff(-3, 3);
  std::uniform_int_distribution<long long> num(-6, 6);
  std::uniform_int_distribution<long long> den(1, 8);
  for (int t = 0; t < 50; ++t) {
    ExponentPoly q;
    for (int a = 0; a < 2; ++a)
      for (int b = a; b < 2; ++b) {
        long long c = coeff(rng);
        if (c) q.quad[{a, b}] = c;
      }
    std::vector<Rational> u{Rational(num(rng), den(rng)), Rational(num(rng), den(rng))};
    std::vector<Rational> v{Rational(num(rng), den(rng)), Rational(num(rng), den(rng))};
    std::vector<Rational> s{u[0] + v[0], u[1] + v[1]};
    auto lu = polarize(q, u), lv = polarize(q, v), ls = polarize(q, s);
    auto sum = lu + lv;
    for (int var = 0; var < 2; ++var) {
      Rational a = ls.lin.count(var) ? ls.lin.at(var) : Rational(0);
      Rational b = sum.lin.count(var) ? sum.lin.at(var) : Rational(0);
      CHECK(a == b);
    }
  }
}

TEST_CASE("dft constant and pure mode") {
  RootConfig cfg(5);
  Lattice lat({Rational(1, 3)});
  auto fe = dft(cfg, lat, [&](const std::vector<Rational>&) { return Scalar(2.5, -1); });
  CHECK(std::abs(fe.at(0) - Scalar(2.5, -1)) < 1e-12);
  for (int k = 1; k < 5; ++k) CHECK(std::abs(fe.at(k)) < 1e-12);

  // f(Z) = xi^{3Z} -> a_3 = 1
  auto fe2 =
      dft(cfg, lat, [&](const std::vector<Rational>& p) { return cfg.xi_pow(Rational(3) * p[0]); });
  for (int k = 0; k < 5; ++k)
    CHECK(std::abs(fe2.at(k) - (k == 3 ? Scalar(1) : Scalar(0))) < 1e-12);
}

TEST_CASE("dft detects aperiodic input") {
  RootConfig cfg(3);
  Lattice lat({Rational(0)});
  // xi^{Z^2/2} is not ell-periodic on the integer lattice for ell = 3
  CHECK_THROWS_AS(dft(cfg, lat,
                      [&](const std::vector<Rational>& p) {
                        return cfg.xi_pow(p[0] * p[0] * Rational(1, 2));
                      }),
                  PeriodicityViolation);
}

TEST_CASE("reduce_quadratic reconstructs xi^q on the whole lattice") {
  RootConfig cfg(5);
  SUBCASE("coupling form on a generic lattice") {
    ExponentPoly q = ExponentPoly::quadratic(0, 1, 2);
    Lattice lat({Rational(1, 4), Rational(2, 3)});
    auto [lin, fe] = reduce_quadratic(cfg, q, lat);
    // linear part 2*beta*H0 + 2*alpha*H1 - 2*alpha*beta
    CHECK(lin.lin.at(0) == Rational(4, 3));
    CHECK(lin.lin.at(1) == Rational(1, 2));
    CHECK(lin.const_term == -(Rational(2) * Rational(1, 4) * Rational(2, 3)));
    for (int u = 0; u < 5; ++u)
      for (int v = 0; v < 5; ++v) {
        std::vector<Rational> pt{Rational(1, 4) + Rational(u), Rational(2, 3) + Rational(v)};
        Scalar lhs = cfg.xi_pow(q.eval(pt));
        Scalar rhs = cfg.xi_pow(lin.eval(pt)) * par::dft_reconstruct(cfg, 2, fe.coeffs, pt);
        CHECK(std::abs(lhs - rhs) < 1e-10);
      }
  }
  SUBCASE("q = 0 gives trivial expansion") {
    auto [lin, fe] = reduce_quadratic(cfg, ExponentPoly{}, Lattice({Rational(0)}));
    CHECK(lin.is_zero());
    CHECK(std::abs(fe.at(0) - Scalar(1)) < 1e-12);
  }
  SUBCASE("lattice-base shift by integers leaves the pointwise product invariant") {
    ExponentPoly q = ExponentPoly::quadratic(0, 1, 2);
    Lattice lat1({Rational(1, 3), Rational(1, 2)});
    // shifting the representative by integers must not change xi^l * fourier
    auto [l1, f1] = reduce_quadratic(cfg, q, lat1);
    std::vector<Rational> shifted{Rational(1, 3) + Rational(2), Rational(1, 2) + Rational(1)};
    ExponentPoly l2 = polarize(q, shifted);
    l2.const_term = -q.eval(shifted);
    // integer-coefficient difference in the linear form
    Rational d0 = l2.lin.at(0) - l1.lin.at(0);
    CHECK(d0.is_integer());
    for (int u = 0; u < 5; ++u)
      for (int v = 0; v < 5; ++v) {
        std::vector<Rational> pt{Rational(1, 3) + Rational(u), Rational(1, 2) + Rational(v)};
        Scalar a = cfg.xi_pow(l1.eval(pt)) * par::dft_reconstruct(cfg, 2, f1.coeffs, pt);
        Scalar b = cfg.xi_pow(q.eval(pt));
        CHECK(std::abs(a - b) < 1e-10);
      }
  }
}

TEST_CASE("commute_past") {
  // l = a*H0, weight (2) -> phase 2a, no K power
  ExponentPoly l = ExponentPoly::linear(0, Rational(1, 3));
  auto r = commute_past(l, {2});
  CHECK(r.phase == Rational(2, 3));
  for (auto k : r.induced_k_power) CHECK(k == 0);

  // weight 0 -> nothing
  ExponentPoly q = ExponentPoly::quadratic(0, 0, 2);
  auto r0 = commute_past(q + l, {0});
  CHECK(r0.phase == Rational(0));

  // q = 2 H0^2, weight (1) -> phase 2, induced K power 4
  auto r2 = commute_past(q, {1});
  CHECK(r2.phase == Rational(2));
  REQUIRE(r2.induced_k_power.size() == 1);
  CHECK(r2.induced_k_power[0] == 4);
}
