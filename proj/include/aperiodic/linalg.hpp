#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace aperiodic {

using VecD = std::vector<double>;

// Small dense matrix, row-major.  The lattices handled here have dimension
// at most 6, so plain Gaussian elimination with partial pivoting is enough.
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  VecD mul(const VecD& x) const {
    if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("Mat::mul: size mismatch");
    VecD y(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  double det() const {
    if (rows_ != cols_) throw std::invalid_argument("Mat::det: not square");
    Mat lu = *this;
    int n = rows_;
    double d = 1.0;
    for (int k = 0; k < n; ++k) {
      int piv = k;
      for (int i = k + 1; i < n; ++i)
        if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
      if (lu(piv, k) == 0.0) return 0.0;
      if (piv != k) {
        for (int j = 0; j < n; ++j) std::swap(lu(piv, j), lu(k, j));
        d = -d;
      }
      d *= lu(k, k);
      for (int i = k + 1; i < n; ++i) {
        double f = lu(i, k) / lu(k, k);
        for (int j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
      }
    }
    return d;
  }

  Mat inverse() const {
    if (rows_ != cols_) throw std::invalid_argument("Mat::inverse: not square");
    int n = rows_;
    Mat aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) aug(i, j) = (*this)(i, j);
      aug(i, n + i) = 1.0;
    }
    for (int k = 0; k < n; ++k) {
      int piv = k;
      for (int i = k + 1; i < n; ++i)
        if (std::abs(aug(i, k)) > std::abs(aug(piv, k))) piv = i;
      if (aug(piv, k) == 0.0) throw std::runtime_error("Mat::inverse: singular matrix");
      if (piv != k)
        for (int j = 0; j < 2 * n; ++j) std::swap(aug(piv, j), aug(k, j));
      double p = aug(k, k);
      for (int j = 0; j < 2 * n; ++j) aug(k, j) /= p;
      for (int i = 0; i < n; ++i) {
        if (i == k) continue;
        double f = aug(i, k);
        if (f == 0.0) continue;
        for (int j = 0; j < 2 * n; ++j) aug(i, j) -= f * aug(k, j);
      }
    }
    Mat inv(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
    return inv;
  }

 private:
  int rows_, cols_;
  std::vector<double> a_;
};

inline double norm2(const VecD& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double dot(const VecD& a, const VecD& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace aperiodic
