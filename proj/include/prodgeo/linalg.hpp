#pragma once

// Small dense linear algebra over a generic scalar (double or Jet).
// Sizes here never exceed ~14, so everything is plain row-major storage.
// Double-only spectral work is delegated to Eigen.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "prodgeo/errors.hpp"
#include "prodgeo/jet.hpp"

namespace prodgeo {

template <class S>
using Vec = std::vector<S>;

template <class S>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, const S& fill = S(0.0))
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols), fill) {}

  static Mat identity(int n) {
    Mat r(n, n);
    for (int i = 0; i < n; ++i) r(i, i) = S(1.0);
    return r;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  S& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * cols_ + j)]; }
  const S& operator()(int i, int j) const {
    return a_[static_cast<std::size_t>(i * cols_ + j)];
  }

  Vec<S> column(int j) const {
    Vec<S> c(static_cast<std::size_t>(rows_));
    for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  Mat transposed() const {
    Mat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  friend Mat operator*(const Mat& a, const Mat& b) {
    Mat r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const S& aik = a(i, k);
        for (int j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }
  friend Mat operator+(const Mat& a, const Mat& b) {
    Mat r = a;
    for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] += b.a_[k];
    return r;
  }
  friend Mat operator-(const Mat& a, const Mat& b) {
    Mat r = a;
    for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] -= b.a_[k];
    return r;
  }
  template <class T>
  friend Mat operator*(const Mat& a, const T& s) {
    Mat r = a;
    for (auto& x : r.a_) x = x * s;
    return r;
  }
  friend Vec<S> operator*(const Mat& a, const Vec<S>& x) {
    Vec<S> r(static_cast<std::size_t>(a.rows_), S(0.0));
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < a.cols_; ++j) r[i] += a(i, j) * x[j];
    return r;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<S> a_;
};

using Matd = Mat<double>;
using Vecd = Vec<double>;

template <class S>
Vec<S> zeros(int n) {
  return Vec<S>(static_cast<std::size_t>(n), S(0.0));
}

template <class S, class T>
void axpy(Vec<S>& y, const T& a, const Vec<S>& x) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

template <class S, class T>
Vec<S> scaled(const Vec<S>& x, const T& a) {
  Vec<S> r = x;
  for (auto& v : r) v = v * a;
  return r;
}

template <class S>
Vec<S> operator+(const Vec<S>& a, const Vec<S>& b) {
  Vec<S> r = a;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] += b[k];
  return r;
}

template <class S>
Vec<S> operator-(const Vec<S>& a, const Vec<S>& b) {
  Vec<S> r = a;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] -= b[k];
  return r;
}

/// Euclidean dot product (for coefficient vectors, not ambient vectors).
template <class S>
S dot(const Vec<S>& a, const Vec<S>& b) {
  S r(0.0);
  for (std::size_t k = 0; k < a.size(); ++k) r += a[k] * b[k];
  return r;
}

inline double norm(const Vecd& a) { return std::sqrt(dot(a, a)); }

inline double max_abs(const Vecd& a) {
  double r = 0.0;
  for (double v : a) r = std::max(r, std::abs(v));
  return r;
}

inline double max_abs(const Matd& a) {
  double r = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r = std::max(r, std::abs(a(i, j)));
  return r;
}

inline double frobenius(const Matd& a) {
  double r = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r += a(i, j) * a(i, j);
  return std::sqrt(r);
}

template <class S>
Vecd values(const Vec<S>& v) {
  Vecd r(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) r[k] = value_of(v[k]);
  return r;
}

template <class S>
Matd values(const Mat<S>& a) {
  Matd r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = value_of(a(i, j));
  return r;
}

inline Vec<Jet> truncated(const Vec<Jet>& v, int order) {
  Vec<Jet> r;
  r.reserve(v.size());
  for (const auto& x : v) r.push_back(x.truncated(order));
  return r;
}

inline Mat<Jet> truncated(const Mat<Jet>& a, int order) {
  Mat<Jet> r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j).truncated(order);
  return r;
}

/// Directional derivative of a jet-valued vector at the base point.
inline Vecd directional(const Vec<Jet>& v, const Vecd& coord_dir) {
  Vecd r(v.size(), 0.0);
  for (std::size_t k = 0; k < v.size(); ++k)
    for (std::size_t i = 0; i < coord_dir.size(); ++i)
      r[k] += coord_dir[i] * v[k].d(static_cast<int>(i));
  return r;
}

inline double directional(const Jet& v, const Vecd& coord_dir) {
  double r = 0.0;
  for (std::size_t i = 0; i < coord_dir.size(); ++i)
    r += coord_dir[i] * v.d(static_cast<int>(i));
  return r;
}

/// Solves A x = b by Gaussian elimination with partial pivoting on the
/// value part. Works for double and Jet.
template <class S>
Vec<S> solve(Mat<S> a, Vec<S> b) {
  const int n = a.rows();
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(value_of(a(r, col))) > std::abs(value_of(a(piv, col)))) piv = r;
    }
    if (value_of(a(piv, col)) == 0.0) throw RankError("solve: singular matrix");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      std::swap(b[col], b[piv]);
    }
    const S inv = recip(a(col, col));
    for (int r = col + 1; r < n; ++r) {
      const S f = a(r, col) * inv;
      for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  Vec<S> x(static_cast<std::size_t>(n), S(0.0));
  for (int i = n - 1; i >= 0; --i) {
    S s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

template <class S>
Mat<S> inverse(const Mat<S>& a) {
  const int n = a.rows();
  Mat<S> r(n, n);
  for (int j = 0; j < n; ++j) {
    Vec<S> e = zeros<S>(n);
    e[j] = S(1.0);
    const Vec<S> x = solve(a, e);
    for (int i = 0; i < n; ++i) r(i, j) = x[i];
  }
  return r;
}

inline Eigen::MatrixXd to_eigen(const Matd& a) {
  Eigen::MatrixXd r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
  return r;
}

inline Matd from_eigen(const Eigen::MatrixXd& a) {
  Matd r(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) r(i, j) = a(i, j);
  return r;
}

struct SymmetricEigen {
  Vecd values;   // ascending
  Matd vectors;  // columns
};

/// Eigen-decomposition of the symmetric part of `a`.
inline SymmetricEigen symmetric_eigen(const Matd& a) {
  Eigen::MatrixXd m = to_eigen(a);
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  SymmetricEigen r;
  r.values.assign(es.eigenvalues().data(),
                  es.eigenvalues().data() + es.eigenvalues().size());
  r.vectors = from_eigen(es.eigenvectors());
  return r;
}

inline Matd commutator(const Matd& a, const Matd& b) { return a * b - b * a; }

}  // namespace prodgeo
