#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "covest/error.hpp"

namespace covest {

using cplx = std::complex<double>;

/// Row-major dense rectangular matrix. Used for sample batches, eigenvector
/// blocks and Cholesky factors; structured square types live below.
template <class T>
class Dense {
 public:
  Dense() = default;
  Dense(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<T> col(std::size_t j) const {
    std::vector<T> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
  }

  const std::vector<T>& data() const noexcept { return data_; }
  std::vector<T>& data() noexcept { return data_; }

  bool operator==(const Dense&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Matrix = Dense<double>;
using CMatrix = Dense<cplx>;

/// n x p real sample matrix, one sample per row.
using SampleBatch = Matrix;
/// N x M complex sample matrix, one snapshot per row.
using ComplexBatch = CMatrix;

/// Dense symmetric real matrix. Every mutation writes both triangles, so
/// entries(i,j) == entries(j,i) holds bit-exactly.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t p, double fill = 0.0);

  static SymMatrix identity(std::size_t p);
  static SymMatrix ones(std::size_t p);
  static SymMatrix diagonal(std::span<const double> d);
  static SymMatrix diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }
  /// Throws InvalidParam unless rows form an exactly symmetric square array.
  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows);
  /// Throws InvalidParam unless the square matrix is exactly symmetric.
  static SymMatrix from_dense(const Matrix& m);
  /// (m + m^T) / 2.
  static SymMatrix symmetrize(const Matrix& m);

  std::size_t dim() const noexcept { return p_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * p_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    data_[i * p_ + j] = v;
    data_[j * p_ + i] = v;
  }
  const std::vector<double>& data() const noexcept { return data_; }
  Matrix dense() const;

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

  bool operator==(const SymMatrix&) const = default;

 private:
  std::size_t p_ = 0;
  std::vector<double> data_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);

/// Dense Hermitian matrix; the diagonal is stored real.
class HermMatrix {
 public:
  HermMatrix() = default;
  explicit HermMatrix(std::size_t m);

  static HermMatrix identity(std::size_t m);
  static HermMatrix from_real(const SymMatrix& s);
  /// Throws InvalidParam unless rows form an exactly Hermitian square array.
  static HermMatrix from_rows(const std::vector<std::vector<cplx>>& rows);
  static HermMatrix from_dense(const CMatrix& m);

  std::size_t dim() const noexcept { return m_; }
  cplx operator()(std::size_t i, std::size_t j) const { return data_[i * m_ + j]; }
  /// Writes (i,j) and its conjugate at (j,i); on the diagonal only the real part is kept.
  void set(std::size_t i, std::size_t j, cplx v);
  const std::vector<cplx>& data() const noexcept { return data_; }
  CMatrix dense() const;

  HermMatrix& operator+=(const HermMatrix& o);
  HermMatrix& operator-=(const HermMatrix& o);
  HermMatrix& operator*=(double s);

  bool operator==(const HermMatrix&) const = default;

 private:
  std::size_t m_ = 0;
  std::vector<cplx> data_;
};

HermMatrix operator+(HermMatrix a, const HermMatrix& b);
HermMatrix operator-(HermMatrix a, const HermMatrix& b);
HermMatrix operator*(double s, HermMatrix a);

/// Symmetric weight matrix with entries in [0,1].
class Mask {
 public:
  Mask() = default;
  /// Throws OutOfRange if any entry leaves [0,1].
  explicit Mask(SymMatrix weights);

  static Mask ones(std::size_t p);
  static Mask identity(std::size_t p);
  /// Keeps entries with |i-j|+1 <= width.
  static Mask band(std::size_t p, std::size_t width);
  /// Symmetric Toeplitz mask from its first column.
  static Mask toeplitz(std::span<const double> first_col);

  std::size_t dim() const noexcept { return w_.dim(); }
  double operator()(std::size_t i, std::size_t j) const { return w_(i, j); }
  const SymMatrix& weights() const noexcept { return w_; }

 private:
  SymMatrix w_;
};

/// First column of a symmetric Toeplitz matrix: Sigma(i,j) = col[|i-j|].
struct ToeplitzCol {
  std::vector<double> col;

  std::size_t dim() const noexcept { return col.size(); }
  SymMatrix expand() const;
  bool operator==(const ToeplitzCol&) const = default;
};

/// First column of a Hermitian Toeplitz matrix: H(i,j) = col[i-j] for i >= j.
struct CToeplitzCol {
  std::vector<cplx> col;

  std::size_t dim() const noexcept { return col.size(); }
  HermMatrix expand() const;
  bool operator==(const CToeplitzCol&) const = default;
};

}  // namespace covest
