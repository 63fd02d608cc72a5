#pragma once

#include <functional>
#include <vector>

#include "ghinv/rational.hpp"
#include "ghinv/scalars.hpp"

// Data-parallel inner loops, each with a serial reference implementation and
// an OpenMP variant.  Every kernel writes independent output slots (no shared
// reductions), so parallel results are bitwise equal to the serial reference;
// the test suite asserts this and tools/bench.cpp compares their timings.

namespace ghinv::par {

bool enabled();
void set_enabled(bool on);
int thread_count();

/// Parallel for over [0,n) with independent bodies.
void parallel_for(int n, const std::function<void(int)>& body);

/// max over i of fn(i); order-independent, safe to parallelize.
double max_over(int n, const std::function<double(int)>& fn);

/// Discrete Fourier coefficients on the lattice base + [0,ell)^m (m = 1 or 2):
///   a_k = ell^-m * sum_i xi^{-k.(base+i)} f(i)
/// fvals is the f grid in row-major order (last index fastest).
std::vector<Scalar> dft_table_serial(const RootConfig& cfg, int m,
                                     const std::vector<Rational>& base,
                                     const std::vector<Scalar>& fvals);
std::vector<Scalar> dft_table_omp(const RootConfig& cfg, int m,
                                  const std::vector<Rational>& base,
                                  const std::vector<Scalar>& fvals);
std::vector<Scalar> dft_table(const RootConfig& cfg, int m, const std::vector<Rational>& base,
                              const std::vector<Scalar>& fvals);

/// Reconstruction sum_k a_k xi^{k.point} for a coefficient table.
Scalar dft_reconstruct(const RootConfig& cfg, int m, const std::vector<Scalar>& coeffs,
                       const std::vector<Rational>& point);

}  // namespace ghinv::par
