#pragma once

#include <vector>

#include "ghinv/scalars.hpp"

namespace ghinv {

/// Dense complex matrix, row major.  Small sizes only (algebra dimension is
/// ell'^2 * ell <= 125 at desk scale), so plain Gaussian elimination with
/// partial pivoting is all we need.
struct Mat {
  int rows = 0, cols = 0;
  std::vector<Scalar> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a((size_t)r * c, Scalar(0)) {}

  Scalar& operator()(int r, int c) { return a[(size_t)r * cols + c]; }
  const Scalar& operator()(int r, int c) const { return a[(size_t)r * cols + c]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  Mat operator*(const Mat& o) const;
  Mat operator+(const Mat& o) const;
  Mat operator-(const Mat& o) const;
  Mat operator*(const Scalar& s) const;
  Mat transpose() const;
  Mat kron(const Mat& o) const;
  Scalar trace() const;
  double max_abs() const;
  Mat pow(long long e) const;  // e may be negative (inverts first)
};

/// Solve A x = b; throws NotInvertible when the pivot falls below eps.
std::vector<Scalar> lu_solve(Mat A, std::vector<Scalar> b, double eps = 1e-12);
Mat inverse(const Mat& A, double eps = 1e-12);

/// Numerical rank by row echelon with threshold relative to the largest pivot.
int rank(Mat A, double rel_eps = 1e-9);

/// Orthonormal-ish basis of the nullspace of A (columns of the result).
std::vector<std::vector<Scalar>> nullspace(Mat A, double rel_eps = 1e-9);

}  // namespace ghinv
