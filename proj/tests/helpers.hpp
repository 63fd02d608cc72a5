#pragma once

#include <random>

#include "ghinv/qalgebra.hpp"

namespace ghinv::testing {

inline AlgebraElement random_element(const RootConfig& cfg, const GDegree& deg,
                                     std::mt19937_64& rng, int nterms = 4) {
  std::uniform_int_distribution<int> pick_i(0, cfg.ell_prime - 1);
  std::uniform_int_distribution<int> pick_k(0, cfg.ell - 1);
  std::uniform_real_distribution<double> coeff(-1, 1);
  AlgebraElement x(deg);
  for (int t = 0; t < nterms; ++t) {
    Mono m{Rational(0), pick_i(rng), pick_i(rng), pick_k(rng)};
    x.add(m, Scalar(coeff(rng), coeff(rng)));
  }
  return x;
}

inline AlgebraElement random_homogeneous(const RootConfig& cfg, const GDegree& deg,
                                         std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick_i(0, cfg.ell_prime - 1);
  std::uniform_int_distribution<int> pick_k(0, cfg.ell - 1);
  std::uniform_real_distribution<double> coeff(-1, 1);
  AlgebraElement x(deg);
  Mono m{Rational(0), pick_i(rng), pick_i(rng), pick_k(rng)};
  x.add(m, Scalar(coeff(rng), coeff(rng)));
  return x;
}

inline GDegree random_degree(std::mt19937_64& rng, long long max_den = 8) {
  std::uniform_int_distribution<long long> den(1, max_den);
  long long d = den(rng);
  std::uniform_int_distribution<long long> num(0, d - 1);
  return gdeg(Rational(num(rng), d));
}

inline double tensor_diff(const TensorElement& a, const TensorElement& b) {
  TensorElement d = a - b;
  return d.max_abs();
}

inline double elem_diff(const AlgebraElement& a, const AlgebraElement& b) {
  AlgebraElement d = a - b;
  return d.max_abs();
}

}  // namespace ghinv::testing
