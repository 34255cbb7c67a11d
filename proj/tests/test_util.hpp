#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "covest/matrix.hpp"
#include "covest/rng.hpp"

namespace testutil {

inline Eigen::MatrixXd to_eigen(const covest::SymMatrix& a) {
  Eigen::MatrixXd m(a.dim(), a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) m(i, j) = a(i, j);
  }
  return m;
}

inline Eigen::MatrixXcd to_eigen(const covest::HermMatrix& a) {
  Eigen::MatrixXcd m(a.dim(), a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) m(i, j) = a(i, j);
  }
  return m;
}

inline covest::SymMatrix from_eigen(const Eigen::MatrixXd& m) {
  covest::SymMatrix a(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) a.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  }
  return a;
}

/// Eigenvalues from Eigen's solver, sorted descending.
inline std::vector<double> ref_eigenvalues(const covest::SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a));
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + a.dim());
  std::sort(v.rbegin(), v.rend());
  return v;
}

inline std::vector<double> ref_eigenvalues(const covest::HermMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(a));
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + a.dim());
  std::sort(v.rbegin(), v.rend());
  return v;
}

inline covest::SymMatrix random_sym(std::size_t p, covest::RngStream& rng) {
  covest::SymMatrix a(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) a.set(i, j, rng.normal());
  }
  return a;
}

inline covest::HermMatrix random_herm(std::size_t m, covest::RngStream& rng) {
  covest::HermMatrix a(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) a.set(i, j, {rng.normal(), i == j ? 0.0 : rng.normal()});
  }
  return a;
}

inline double max_abs_diff(const covest::SymMatrix& a, const covest::SymMatrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

inline double max_abs_diff(const covest::HermMatrix& a, const covest::HermMatrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

}  // namespace testutil
