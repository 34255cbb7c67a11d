#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>

#include "covest/matrix.hpp"

namespace covest {

// ---------------------------------------------------------------- tuning

struct FixedTau {
  double tau = 0.0;
};

/// tau = mprime * sqrt(log(p) / n).
struct BickelRule {
  double mprime = 1.0;
};

/// tau = sqrt(2c / (1 - alpha)) * max(C K^2, sqrt(C) K) * sqrt(log(p) / (n p)).
/// alpha also fixes the band width floor(alpha p) of the Toeplitz estimator.
struct ToeplitzRule {
  double C = 1.0;
  double K = 1.0;
  double c = 2.0;
  double alpha = 0.5;
};

using ThresholdRule = std::variant<FixedTau, BickelRule, ToeplitzRule>;

/// Resolves a rule to a threshold for n samples in dimension p.
double resolve_tau(const ThresholdRule& rule, std::size_t n, std::size_t p);

/// Parameters of the classes U(q, s, M) and U^Toep(q, s, M).
struct SparsityClassParams {
  double q = 0.0;
  double s = 1.0;
  double bound = 1.0;

  void validate() const;
  /// Sigma_ii <= bound and sum_j |Sigma_ij|^q <= s for every row.
  bool contains(const SymMatrix& sigma) const;
  /// Toeplitz variant: every entry <= bound and sum_r |sigma_r|^q <= s.
  bool contains_toeplitz(const ToeplitzCol& sigma) const;
};

// ------------------------------------------------------------- estimators

/// (1/n) sum_k x_k x_k^T. No mean is subtracted unless `center` is set.
SymMatrix sample_cov(const SampleBatch& batch, bool center = false);

SymMatrix masked_cov(const SampleBatch& batch, const Mask& mask);

/// Hard threshold: keeps entries with |a_ij| >= tau.
SymMatrix threshold(const SymMatrix& a, double tau);
ToeplitzCol threshold(const ToeplitzCol& t, double tau);

SymMatrix thresholded_cov(const SampleBatch& batch, const ThresholdRule& rule);

/// Keeps entries with |i-j| + 1 <= width.
SymMatrix band(const SymMatrix& a, std::size_t width);
ToeplitzCol band(const ToeplitzCol& t, std::size_t width);

/// Diagonal averages of the sample covariance.
ToeplitzCol toeplitz_cov(const SampleBatch& batch);

/// floor(alpha p); throws InvalidParam when it is 0.
std::size_t toeplitz_band_width(double alpha, std::size_t p);

/// T_tau(B_{floor(alpha p)}(toeplitz_cov(batch))) with tau from the rule.
SymMatrix toeplitz_thresholded_cov(const SampleBatch& batch, const ToeplitzRule& rule);

/// argmin_{S PSD} ||S - sample||_F^2 + lambda ||S||_*, in closed form:
/// eigenvalues soft-thresholded at lambda / 2 and clamped at 0.
SymMatrix lasso_lowrank(const SymMatrix& sample, double lambda);
SymMatrix lasso_lowrank_cov(const SampleBatch& batch, double lambda);

/// C sqrt(tr(S) ||S||) sqrt(log(2p) / n) on the sample covariance S.
double lounici_lambda(const SymMatrix& sample, std::size_t n, double C);
double lounici_lambda(const SampleBatch& batch, double C);

/// ||A||_* / ||A||.
double effective_rank(const SymMatrix& a);

struct MaskNorms {
  double l1star = 0.0;
  double l2star = 0.0;
};

/// Weighted norms of a Toeplitz mask column: sum_r m_r / (p - r) and
/// (sum_r m_r^2 / (p - r))^(1/2) with 0-based r.
MaskNorms mask_weighted_norms(const ToeplitzCol& m);

// ---------------------------------------------------------------- bounds

enum class BoundKind { Gauss, Chen, Koltchinskii, Kabanava };

std::optional<BoundKind> bound_kind_from_string(const std::string& s);

struct BoundParams {
  double n = 1.0;
  double t = 0.0;
  /// Multiplies the whole right-hand side; absolute constants default to 1.
  double constant = 1.0;
  /// Required for Chen.
  std::optional<Mask> mask;
  /// Required for Kabanava.
  std::optional<ToeplitzCol> mask_col;
};

/// Right-hand side of the named error bound, constant-free unless
/// `params.constant` overrides it.
double bound_eval(BoundKind kind, const SymMatrix& sigma, const BoundParams& params);

}  // namespace covest
