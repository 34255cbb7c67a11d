#pragma once

#include <cstddef>
#include <vector>

#include "covest/matrix.hpp"

namespace covest {

/// Numerical constants shared by the dense kernels.
struct NumericConfig {
  static constexpr double eig_reconstruction_tol = 1e-10;
  static constexpr double herm_pairing_tol = 1e-8;
  static constexpr double cholesky_ridge = 1e-12;
  /// Jacobi gives up after sweep_factor * p^2 sweeps.
  static constexpr std::size_t jacobi_sweep_factor = 100;
};

/// Eigenvalues sorted descending; eigenvectors are the columns of `vectors`.
struct EigDecomp {
  std::vector<double> values;
  Matrix vectors;
};

struct HermEigDecomp {
  std::vector<double> values;
  CMatrix vectors;
};

/// Cyclic Jacobi. Equal eigenvalues keep their original diagonal order.
EigDecomp eig_sym(const SymMatrix& a);

/// Hermitian eigenproblem through the real embedding [[Re, -Im], [Im, Re]].
HermEigDecomp eig_herm(const HermMatrix& a);

struct Norms {
  double op = 0.0;
  double frob = 0.0;
  double nuclear = 0.0;
  double max = 0.0;
  double col12 = 0.0;
  double trace = 0.0;
};

Norms norms(const SymMatrix& a);
Norms norms(const HermMatrix& a);

double frobenius_norm(const SymMatrix& a);
double frobenius_norm(const HermMatrix& a);
/// Largest absolute eigenvalue.
double operator_norm(const SymMatrix& a);
double max_norm(const SymMatrix& a);

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clamped to 0).
SymMatrix psd_project(const SymMatrix& a);

/// Diagonal averages: col[r] = mean of a(i, j) over i - j = r.
ToeplitzCol toeplitz_project(const SymMatrix& a);
/// Lower co-diagonal averages; col[0] is real.
CToeplitzCol toeplitz_project(const HermMatrix& a);

SymMatrix hadamard(const SymMatrix& a, const Mask& m);
SymMatrix hadamard(const SymMatrix& a, const SymMatrix& b);

/// Lower-triangular L with L L^T = A. Zero pivots of a semidefinite A give zero
/// columns; if that fails a ridge of cholesky_ridge * trace(A) / p is added once.
Matrix cholesky(const SymMatrix& a);
CMatrix cholesky(const HermMatrix& a);

/// Least-squares solution of min ||A x - b||_2 by Householder QR (rows >= cols).
/// Columns that are numerically dependent on earlier ones get a zero coefficient.
std::vector<double> least_squares(const Matrix& a, const std::vector<double>& b);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);
/// A^T x.
std::vector<double> matvec_t(const Matrix& a, const std::vector<double>& x);
double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);

/// Matrix square Z Z of a symmetric Z.
SymMatrix square(const SymMatrix& z);

/// V diag(values) V^T.
SymMatrix reconstruct(const EigDecomp& e);

void check_finite(const SymMatrix& a);
void check_finite(const HermMatrix& a);

}  // namespace covest
