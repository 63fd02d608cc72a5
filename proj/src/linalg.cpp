#include "ghinv/linalg.hpp"

#include <cmath>

#include "ghinv/errors.hpp"
#include "ghinv/kernels.hpp"

namespace ghinv {

Mat Mat::operator*(const Mat& o) const {
  Mat r(rows, o.cols);
  par::parallel_for(rows, [&](int i) {
    for (int k = 0; k < cols; ++k) {
      Scalar v = (*this)(i, k);
      if (v == Scalar(0)) continue;
      const Scalar* orow = &o.a[(size_t)k * o.cols];
      Scalar* rrow = &r.a[(size_t)i * o.cols];
      for (int j = 0; j < o.cols; ++j) rrow[j] += v * orow[j];
    }
  });
  return r;
}

Mat Mat::operator+(const Mat& o) const {
  Mat r = *this;
  for (size_t i = 0; i < a.size(); ++i) r.a[i] += o.a[i];
  return r;
}

Mat Mat::operator-(const Mat& o) const {
  Mat r = *this;
  for (size_t i = 0; i < a.size(); ++i) r.a[i] -= o.a[i];
  return r;
}

Mat Mat::operator*(const Scalar& s) const {
  Mat r = *this;
  for (auto& x : r.a) x *= s;
  return r;
}

Mat Mat::transpose() const {
  Mat r(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) r(j, i) = (*this)(i, j);
  return r;
}

Mat Mat::kron(const Mat& o) const {
  Mat r(rows * o.rows, cols * o.cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      Scalar v = (*this)(i, j);
      if (v == Scalar(0)) continue;
      for (int p = 0; p < o.rows; ++p)
        for (int q = 0; q < o.cols; ++q) r(i * o.rows + p, j * o.cols + q) = v * o(p, q);
    }
  return r;
}

Scalar Mat::trace() const {
  Scalar t = 0;
  for (int i = 0; i < rows && i < cols; ++i) t += (*this)(i, i);
  return t;
}

double Mat::max_abs() const {
  double m = 0;
  for (const auto& x : a) m = std::max(m, std::abs(x));
  return m;
}

Mat Mat::pow(long long e) const {
  Mat base = e < 0 ? inverse(*this) : *this;
  if (e < 0) e = -e;
  Mat r = Mat::identity(rows);
  while (e) {
    if (e & 1) r = r * base;
    base = base * base;
    e >>= 1;
  }
  return r;
}

std::vector<Scalar> lu_solve(Mat A, std::vector<Scalar> b, double eps) {
  const int n = A.rows;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(A(k, k));
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > best) {
        best = std::abs(A(i, k));
        piv = i;
      }
    if (best < eps) throw NotInvertible("singular matrix in lu_solve");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      Scalar f = A(i, k) / A(k, k);
      if (f == Scalar(0)) continue;
      for (int j = k; j < n; ++j) A(i, j) -= f * A(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<Scalar> x(n);
  for (int i = n - 1; i >= 0; --i) {
    Scalar s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
    x[i] = s / A(i, i);
  }
  return x;
}

Mat inverse(const Mat& A, double eps) {
  const int n = A.rows;
  Mat inv(n, n);
  // column by column; fine at these sizes
  for (int c = 0; c < n; ++c) {
    std::vector<Scalar> e(n, Scalar(0));
    e[c] = 1;
    auto x = lu_solve(A, e, eps);
    for (int r = 0; r < n; ++r) inv(r, c) = x[r];
  }
  return inv;
}

static int echelon(Mat& A, double rel_eps) {
  int r = 0;
  double scale = std::max(A.max_abs(), 1.0);
  for (int c = 0; c < A.cols && r < A.rows; ++c) {
    int piv = -1;
    double best = rel_eps * scale;
    for (int i = r; i < A.rows; ++i)
      if (std::abs(A(i, c)) > best) {
        best = std::abs(A(i, c));
        piv = i;
      }
    if (piv < 0) continue;
    if (piv != r)
      for (int j = 0; j < A.cols; ++j) std::swap(A(r, j), A(piv, j));
    for (int i = 0; i < A.rows; ++i) {
      if (i == r) continue;
      Scalar f = A(i, c) / A(r, c);
      if (f == Scalar(0)) continue;
      for (int j = c; j < A.cols; ++j) A(i, j) -= f * A(r, j);
    }
    ++r;
  }
  return r;
}

int rank(Mat A, double rel_eps) { return echelon(A, rel_eps); }

std::vector<std::vector<Scalar>> nullspace(Mat A, double rel_eps) {
  const int n = A.cols;
  double scale = std::max(A.max_abs(), 1.0);
  int r = echelon(A, rel_eps);
  // locate pivot column of each echelon row
  std::vector<int> pivot_col(r, -1);
  std::vector<bool> is_pivot(n, false);
  int row = 0;
  for (int c = 0; c < n && row < r; ++c) {
    if (std::abs(A(row, c)) > rel_eps * scale) {
      pivot_col[row] = c;
      is_pivot[c] = true;
      ++row;
    }
  }
  std::vector<std::vector<Scalar>> basis;
  for (int c = 0; c < n; ++c) {
    if (is_pivot[c]) continue;
    std::vector<Scalar> v(n, Scalar(0));
    v[c] = 1;
    for (int i = 0; i < r; ++i) v[pivot_col[i]] = -A(i, c) / A(i, pivot_col[i]);
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace ghinv
