#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <type_traits>
#include <vector>

#include "qio/errors.hpp"

namespace qio {

/// Dense row-major matrix over double or std::complex<double>.
template <typename T>
class BasicMatrix {
 public:
  using value_type = T;

  BasicMatrix() = default;
  BasicMatrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  BasicMatrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionError("ragged matrix initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static BasicMatrix identity(std::size_t n) {
    BasicMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
  static BasicMatrix diagonal(std::span<const T> d) {
    BasicMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  static BasicMatrix column(std::span<const T> v) {
    BasicMatrix m(v.size(), 1);
    std::copy(v.begin(), v.end(), m.data_.begin());
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool is_square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  std::vector<T> col(std::size_t j) const {
    std::vector<T> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
  }

  BasicMatrix transpose() const {
    BasicMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Conjugate transpose (plain transpose for real matrices).
  BasicMatrix adjoint() const {
    BasicMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = conj_value((*this)(i, j));
    return t;
  }

  BasicMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionError("block out of range");
    BasicMatrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  void set_block(std::size_t r0, std::size_t c0, const BasicMatrix& b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw DimensionError("block out of range");
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  /// Submatrix on the given row and column index lists.
  BasicMatrix select(std::span<const std::size_t> ri, std::span<const std::size_t> ci) const {
    BasicMatrix s(ri.size(), ci.size());
    for (std::size_t i = 0; i < ri.size(); ++i)
      for (std::size_t j = 0; j < ci.size(); ++j) s(i, j) = (*this)(ri[i], ci[j]);
    return s;
  }

  BasicMatrix& operator+=(const BasicMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  BasicMatrix& operator-=(const BasicMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  BasicMatrix& operator*=(T s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend BasicMatrix operator+(BasicMatrix a, const BasicMatrix& b) { return a += b; }
  friend BasicMatrix operator-(BasicMatrix a, const BasicMatrix& b) { return a -= b; }
  friend BasicMatrix operator*(BasicMatrix a, T s) { return a *= s; }
  friend BasicMatrix operator*(T s, BasicMatrix a) { return a *= s; }
  friend BasicMatrix operator-(BasicMatrix a) { return a *= T(-1); }

  friend BasicMatrix operator*(const BasicMatrix& a, const BasicMatrix& b) {
    if (a.cols_ != b.rows_) throw DimensionError("matrix product shape mismatch");
    BasicMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      T* crow = c.data_.data() + i * c.cols_;
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T aik = a(i, k);
        if (aik == T{}) continue;
        const T* brow = b.data_.data() + k * b.cols_;
        for (std::size_t j = 0; j < b.cols_; ++j) crow[j] += aik * brow[j];
      }
    }
    return c;
  }

  friend std::vector<T> operator*(const BasicMatrix& a, std::span<const T> x) {
    if (a.cols_ != x.size()) throw DimensionError("matrix-vector shape mismatch");
    std::vector<T> y(a.rows_, T{});
    for (std::size_t i = 0; i < a.rows_; ++i) {
      T acc{};
      const T* arow = a.data_.data() + i * a.cols_;
      for (std::size_t j = 0; j < a.cols_; ++j) acc += arow[j] * x[j];
      y[i] = acc;
    }
    return y;
  }
  friend std::vector<T> operator*(const BasicMatrix& a, const std::vector<T>& x) {
    return a * std::span<const T>(x);
  }

  bool operator==(const BasicMatrix&) const = default;

 private:
  static T conj_value(const T& v) {
    if constexpr (std::is_same_v<T, double>) {
      return v;
    } else {
      return std::conj(v);
    }
  }
  void require_same_shape(const BasicMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Matrix = BasicMatrix<double>;
using ComplexMatrix = BasicMatrix<std::complex<double>>;
using Vector = std::vector<double>;

template <typename T>
double frobenius_norm(const BasicMatrix<T>& a) {
  double s = 0.0;
  for (const auto& v : a.data()) s += std::norm(v);
  return std::sqrt(s);
}

/// Maximum absolute row sum.
template <typename T>
double inf_norm(const BasicMatrix<T>& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (const auto& v : a.row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

/// Maximum absolute column sum.
template <typename T>
double one_norm(const BasicMatrix<T>& a) {
  std::vector<double> sums(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) sums[j] += std::abs(a(i, j));
  return sums.empty() ? 0.0 : *std::max_element(sums.begin(), sums.end());
}

template <typename T>
double max_abs(const BasicMatrix<T>& a) {
  double best = 0.0;
  for (const auto& v : a.data()) best = std::max(best, std::abs(v));
  return best;
}

template <typename T>
bool all_finite(const BasicMatrix<T>& a) {
  for (const auto& v : a.data()) {
    if (!std::isfinite(std::abs(v))) return false;
  }
  return true;
}

inline ComplexMatrix to_complex(const Matrix& a) {
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
  return c;
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace qio
