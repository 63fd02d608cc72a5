#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ghinv/kernels.hpp"

using namespace ghinv;

// The OpenMP kernels write independent output slots, so they must agree with
// the serial reference bitwise.
TEST_CASE("dft_table parallel equals serial bitwise") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int l : {3, 5, 7}) {
    RootConfig cfg(l);
    for (int m : {1, 2}) {
      std::vector<Rational> base{Rational(1, 3), Rational(2, 5)};
      base.resize((size_t)m);
      size_t grid = m == 1 ? (size_t)l : (size_t)l * l;
      std::vector<Scalar> f(grid);
      for (auto& x : f) x = Scalar(u(rng), u(rng));
      auto a = par::dft_table_serial(cfg, m, base, f);
      auto b = par::dft_table_omp(cfg, m, base, f);
      REQUIRE(a.size() == b.size());
      for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].real() == b[i].real());
        CHECK(a[i].imag() == b[i].imag());
      }
    }
  }
}

TEST_CASE("parallel_for covers the range once") {
  std::vector<int> hits(1000, 0);
  par::parallel_for(1000, [&](int i) { hits[(size_t)i] += 1; });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("max_over agrees with serial max") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<double> v(257);
  for (auto& x : v) x = u(rng);
  double expect = 0;
  for (double x : v) expect = std::max(expect, x);
  CHECK(par::max_over((int)v.size(), [&](int i) { return v[(size_t)i]; }) == expect);
}

TEST_CASE("toggling parallel mode keeps dft_table output identical") {
  RootConfig cfg(5);
  std::vector<Rational> base{Rational(1, 4), Rational(1, 6)};
  std::vector<Scalar> f(25);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (auto& x : f) x = Scalar(u(rng), u(rng));
  bool before = par::enabled();
  par::set_enabled(true);
  auto a = par::dft_table(cfg, 2, base, f);
  par::set_enabled(false);
  auto b = par::dft_table(cfg, 2, base, f);
  par::set_enabled(before);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}
