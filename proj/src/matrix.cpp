#include "covest/matrix.hpp"

#include <cmath>
#include <string>

namespace covest {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------- SymMatrix

SymMatrix::SymMatrix(std::size_t p, double fill) : p_(p), data_(p * p, fill) {
  require(p >= 1, ErrorCode::InvalidParam, "matrix dimension must be >= 1");
}

SymMatrix SymMatrix::identity(std::size_t p) {
  SymMatrix s(p);
  for (std::size_t i = 0; i < p; ++i) s.set(i, i, 1.0);
  return s;
}

SymMatrix SymMatrix::ones(std::size_t p) { return SymMatrix(p, 1.0); }

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix s(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) s.set(i, i, d[i]);
  return s;
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t p = rows.size();
  SymMatrix s(p);
  for (std::size_t i = 0; i < p; ++i) {
    require(rows[i].size() == p, ErrorCode::InvalidParam, "rows must form a square array");
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      require(rows[i][j] == rows[j][i], ErrorCode::InvalidParam,
              "matrix is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      s.set(i, j, rows[i][j]);
    }
  }
  return s;
}

SymMatrix SymMatrix::from_dense(const Matrix& m) {
  require(m.rows() == m.cols(), ErrorCode::DimMismatch, "matrix must be square");
  SymMatrix s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i; j < m.cols(); ++j) {
      require(m(i, j) == m(j, i), ErrorCode::InvalidParam, "matrix is not symmetric");
      s.set(i, j, m(i, j));
    }
  }
  return s;
}

SymMatrix SymMatrix::symmetrize(const Matrix& m) {
  require(m.rows() == m.cols(), ErrorCode::DimMismatch, "matrix must be square");
  SymMatrix s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s.set(i, i, m(i, i));
    for (std::size_t j = i + 1; j < m.cols(); ++j) s.set(i, j, 0.5 * m(i, j) + 0.5 * m(j, i));
  }
  return s;
}

Matrix SymMatrix::dense() const {
  Matrix m(p_, p_);
  m.data() = data_;
  return m;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  require(o.p_ == p_, ErrorCode::DimMismatch, "dimension mismatch in +");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  require(o.p_ == p_, ErrorCode::DimMismatch, "dimension mismatch in -");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

// --------------------------------------------------------------- HermMatrix

HermMatrix::HermMatrix(std::size_t m) : m_(m), data_(m * m) {
  require(m >= 1, ErrorCode::InvalidParam, "matrix dimension must be >= 1");
}

HermMatrix HermMatrix::identity(std::size_t m) {
  HermMatrix h(m);
  for (std::size_t i = 0; i < m; ++i) h.set(i, i, 1.0);
  return h;
}

HermMatrix HermMatrix::from_real(const SymMatrix& s) {
  HermMatrix h(s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i) {
    for (std::size_t j = i; j < s.dim(); ++j) h.set(i, j, s(i, j));
  }
  return h;
}

HermMatrix HermMatrix::from_rows(const std::vector<std::vector<cplx>>& rows) {
  const std::size_t m = rows.size();
  HermMatrix h(m);
  for (const auto& r : rows) {
    require(r.size() == m, ErrorCode::InvalidParam, "rows must form a square array");
  }
  for (std::size_t i = 0; i < m; ++i) {
    require(rows[i][i].imag() == 0.0, ErrorCode::InvalidParam, "Hermitian diagonal must be real");
    for (std::size_t j = i; j < m; ++j) {
      require(rows[i][j] == std::conj(rows[j][i]), ErrorCode::InvalidParam, "matrix is not Hermitian");
      h.set(i, j, rows[i][j]);
    }
  }
  return h;
}

HermMatrix HermMatrix::from_dense(const CMatrix& m) {
  require(m.rows() == m.cols(), ErrorCode::DimMismatch, "matrix must be square");
  std::vector<std::vector<cplx>> rows(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) rows[i].assign(m.row(i).begin(), m.row(i).end());
  return from_rows(rows);
}

void HermMatrix::set(std::size_t i, std::size_t j, cplx v) {
  if (i == j) {
    data_[i * m_ + i] = cplx(v.real(), 0.0);
    return;
  }
  data_[i * m_ + j] = v;
  data_[j * m_ + i] = std::conj(v);
}

CMatrix HermMatrix::dense() const {
  CMatrix c(m_, m_);
  c.data() = data_;
  return c;
}

HermMatrix& HermMatrix::operator+=(const HermMatrix& o) {
  require(o.m_ == m_, ErrorCode::DimMismatch, "dimension mismatch in +");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

HermMatrix& HermMatrix::operator-=(const HermMatrix& o) {
  require(o.m_ == m_, ErrorCode::DimMismatch, "dimension mismatch in -");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

HermMatrix& HermMatrix::operator*=(double s) {
  for (cplx& v : data_) v *= s;
  return *this;
}

HermMatrix operator+(HermMatrix a, const HermMatrix& b) { return a += b; }
HermMatrix operator-(HermMatrix a, const HermMatrix& b) { return a -= b; }
HermMatrix operator*(double s, HermMatrix a) { return a *= s; }

// --------------------------------------------------------------------- Mask

Mask::Mask(SymMatrix weights) : w_(std::move(weights)) {
  for (double v : w_.data()) {
    require(v >= 0.0 && v <= 1.0, ErrorCode::OutOfRange, "mask entries must lie in [0,1]");
  }
}

Mask Mask::ones(std::size_t p) { return Mask(SymMatrix::ones(p)); }

Mask Mask::identity(std::size_t p) { return Mask(SymMatrix::identity(p)); }

Mask Mask::band(std::size_t p, std::size_t width) {
  require(width >= 1 && width <= p, ErrorCode::InvalidParam, "band width must lie in [1,p]");
  SymMatrix w(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p && j - i + 1 <= width; ++j) w.set(i, j, 1.0);
  }
  return Mask(std::move(w));
}

Mask Mask::toeplitz(std::span<const double> first_col) {
  return Mask(ToeplitzCol{{first_col.begin(), first_col.end()}}.expand());
}

// ------------------------------------------------------------------ Toeplitz

SymMatrix ToeplitzCol::expand() const {
  const std::size_t p = col.size();
  SymMatrix s(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) s.set(i, j, col[j - i]);
  }
  return s;
}

HermMatrix CToeplitzCol::expand() const {
  const std::size_t m = col.size();
  HermMatrix h(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = j; i < m; ++i) h.set(i, j, col[i - j]);
  }
  return h;
}

}  // namespace covest
