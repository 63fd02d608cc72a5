#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ghinv/scalars.hpp"

using namespace ghinv;

TEST_CASE("xi_pow basics") {
  RootConfig cfg(5);
  CHECK(std::abs(cfg.xi_pow(0) - Scalar(1, 0)) < 1e-12);
  // c = 1, ell = 5 -> e^{2 pi i/5}
  Scalar z = cfg.xi_pow(1);
  CHECK(z.real() == doctest::Approx(0.3090169943749474).epsilon(1e-12));
  CHECK(z.imag() == doctest::Approx(0.9510565162951535).epsilon(1e-12));

  RootConfig even(6);
  CHECK(std::abs(even.xi_pow(3) - Scalar(-1, 0)) < 1e-12);  // half turn for even ell
}

TEST_CASE("xi_pow is a homomorphism on random rational pairs") {
  RootConfig cfg(7);
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<long long> num(-40, 40);
  std::uniform_int_distribution<long long> den(1, 12);
  for (int t = 0; t < 100; ++t) {
    Rational a(num(rng), den(rng)), b(num(rng), den(rng));
    Scalar lhs = cfg.xi_pow(a) * cfg.xi_pow(b);
    Scalar rhs = cfg.xi_pow(a + b);
    CHECK(std::abs(lhs - rhs) < cfg.tol);
    CHECK(std::abs(std::abs(cfg.xi_pow(a)) - 1.0) < cfg.tol);
  }
  // integer periodicity: xi^{a+ell} = xi^a for integer a
  CHECK(std::abs(cfg.xi_pow(3) - cfg.xi_pow(3 + 7)) < 1e-12);
}

TEST_CASE("gauss sum values and degeneracy") {
  // ell = 3: 1 + xi^0 + xi^4 = 2 + xi
  RootConfig c3(3);
  Scalar expect = Scalar(2, 0) + c3.xi_pow(1);
  CHECK(std::abs(c3.gauss_sum() - expect) < 1e-12);

  for (int l : {3, 5, 7, 9, 4, 6, 10, 12}) {
    RootConfig cfg(l);
    CHECK(std::abs(cfg.gauss_sum()) > cfg.tol);
  }
  for (int l : {8, 16}) {
    RootConfig cfg(l);
    CHECK_THROWS_AS(cfg.gauss_sum(), DegenerateRoot);
  }
}

TEST_CASE("approx_eq") {
  RootConfig cfg(5);
  CHECK(cfg.approx_eq(Scalar(1, 0), Scalar(1 + 1e-12, 0)));
  CHECK_FALSE(cfg.approx_eq(Scalar(0, 0), Scalar(1, 0)));
  CHECK(cfg.approx_eq(cfg.xi_pow(1) * cfg.xi_pow(4), cfg.xi_pow(5)));
}

TEST_CASE("config invariants") {
  CHECK_THROWS_AS(RootConfig(2), DegenerateRoot);
  CHECK(RootConfig(6).ell_prime == 3);
  CHECK(RootConfig(7).ell_prime == 7);
}
