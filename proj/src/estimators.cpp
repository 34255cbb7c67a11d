#include "covest/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "covest/linalg.hpp"

namespace covest {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_toeplitz_rule(const ToeplitzRule& r) {
  require(r.C > 0 && r.K > 0, ErrorCode::InvalidParam, "ToeplitzRule needs C > 0 and K > 0");
  require(r.c > 1, ErrorCode::InvalidParam, "ToeplitzRule needs c > 1");
  require(r.alpha > 0 && r.alpha < 1, ErrorCode::InvalidParam, "ToeplitzRule needs alpha in (0,1)");
}

}  // namespace

double resolve_tau(const ThresholdRule& rule, std::size_t n, std::size_t p) {
  require(n >= 1 && p >= 1, ErrorCode::InvalidParam, "resolve_tau needs n, p >= 1");
  const double logp = std::log(static_cast<double>(p));
  const auto nn = static_cast<double>(n);
  const auto pp = static_cast<double>(p);
  return std::visit(overloaded{
                        [&](const FixedTau& r) {
                          require(r.tau >= 0, ErrorCode::InvalidParam, "tau must be >= 0");
                          return r.tau;
                        },
                        [&](const BickelRule& r) {
                          require(r.mprime > 0, ErrorCode::InvalidParam, "mprime must be > 0");
                          return r.mprime * std::sqrt(logp / nn);
                        },
                        [&](const ToeplitzRule& r) {
                          check_toeplitz_rule(r);
                          const double kfac = std::max(r.C * r.K * r.K, std::sqrt(r.C) * r.K);
                          return std::sqrt(2.0 * r.c / (1.0 - r.alpha)) * kfac * std::sqrt(logp / (nn * pp));
                        },
                    },
                    rule);
}

void SparsityClassParams::validate() const {
  require(q >= 0 && q < 1, ErrorCode::InvalidParam, "sparsity class needs q in [0,1)");
  require(s > 0, ErrorCode::InvalidParam, "sparsity class needs s > 0");
  require(bound > 0, ErrorCode::InvalidParam, "sparsity class needs bound > 0");
}

namespace {

double q_power(double x, double q) {
  x = std::abs(x);
  if (q == 0.0) return x != 0.0 ? 1.0 : 0.0;
  return std::pow(x, q);
}

}  // namespace

bool SparsityClassParams::contains(const SymMatrix& sigma) const {
  validate();
  for (std::size_t i = 0; i < sigma.dim(); ++i) {
    if (sigma(i, i) > bound) return false;
    double row = 0.0;
    for (std::size_t j = 0; j < sigma.dim(); ++j) row += q_power(sigma(i, j), q);
    if (row > s) return false;
  }
  return true;
}

bool SparsityClassParams::contains_toeplitz(const ToeplitzCol& sigma) const {
  validate();
  double sum = 0.0;
  for (double v : sigma.col) {
    if (v > bound) return false;
    sum += q_power(v, q);
  }
  return sum <= s;
}

SymMatrix sample_cov(const SampleBatch& batch, bool center) {
  const std::size_t n = batch.rows();
  const std::size_t p = batch.cols();
  require(n >= 1 && p >= 1, ErrorCode::EmptyBatch, "sample_cov needs at least one sample");
  std::vector<double> mean(p, 0.0);
  if (center) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < p; ++i) mean[i] += batch(k, i);
    }
    for (double& m : mean) m /= static_cast<double>(n);
  }
  std::vector<double> acc(p * p, 0.0);
  std::vector<double> x(p);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < p; ++i) x[i] = batch(k, i) - mean[i];
    for (std::size_t i = 0; i < p; ++i) {
      const double xi = x[i];
      for (std::size_t j = i; j < p; ++j) acc[i * p + j] += xi * x[j];
    }
  }
  SymMatrix s(p);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) s.set(i, j, acc[i * p + j] * inv);
  }
  return s;
}

SymMatrix masked_cov(const SampleBatch& batch, const Mask& mask) {
  require(mask.dim() == batch.cols(), ErrorCode::DimMismatch, "mask dimension differs from sample dimension");
  return hadamard(sample_cov(batch), mask);
}

SymMatrix threshold(const SymMatrix& a, double tau) {
  require(tau >= 0, ErrorCode::InvalidParam, "tau must be >= 0");
  SymMatrix out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = i; j < a.dim(); ++j) {
      if (std::abs(a(i, j)) >= tau) out.set(i, j, a(i, j));
    }
  }
  return out;
}

ToeplitzCol threshold(const ToeplitzCol& t, double tau) {
  require(tau >= 0, ErrorCode::InvalidParam, "tau must be >= 0");
  ToeplitzCol out = t;
  for (double& v : out.col) {
    if (!(std::abs(v) >= tau)) v = 0.0;
  }
  return out;
}

SymMatrix thresholded_cov(const SampleBatch& batch, const ThresholdRule& rule) {
  const double tau = resolve_tau(rule, batch.rows(), batch.cols());
  return threshold(sample_cov(batch), tau);
}

SymMatrix band(const SymMatrix& a, std::size_t width) {
  require(width >= 1 && width <= a.dim(), ErrorCode::InvalidParam, "band width must lie in [1,p]");
  SymMatrix out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = i; j < a.dim() && j - i + 1 <= width; ++j) out.set(i, j, a(i, j));
  }
  return out;
}

ToeplitzCol band(const ToeplitzCol& t, std::size_t width) {
  require(width >= 1 && width <= t.dim(), ErrorCode::InvalidParam, "band width must lie in [1,p]");
  ToeplitzCol out = t;
  for (std::size_t r = width; r < out.col.size(); ++r) out.col[r] = 0.0;
  return out;
}

ToeplitzCol toeplitz_cov(const SampleBatch& batch) { return toeplitz_project(sample_cov(batch)); }

std::size_t toeplitz_band_width(double alpha, std::size_t p) {
  require(alpha > 0 && alpha < 1, ErrorCode::InvalidParam, "alpha must lie in (0,1)");
  const auto w = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(p)));
  require(w >= 1, ErrorCode::InvalidParam, "floor(alpha p) must be >= 1");
  return w;
}

SymMatrix toeplitz_thresholded_cov(const SampleBatch& batch, const ToeplitzRule& rule) {
  const double tau = resolve_tau(rule, batch.rows(), batch.cols());
  const std::size_t width = toeplitz_band_width(rule.alpha, batch.cols());
  return threshold(band(toeplitz_cov(batch), width), tau).expand();
}

SymMatrix lasso_lowrank(const SymMatrix& sample, double lambda) {
  require(lambda >= 0, ErrorCode::InvalidParam, "lambda must be >= 0");
  EigDecomp e = eig_sym(sample);
  for (double& v : e.values) v = std::max(v - 0.5 * lambda, 0.0);
  return reconstruct(e);
}

SymMatrix lasso_lowrank_cov(const SampleBatch& batch, double lambda) {
  return lasso_lowrank(sample_cov(batch), lambda);
}

double lounici_lambda(const SymMatrix& sample, std::size_t n, double C) {
  require(C >= 0, ErrorCode::InvalidParam, "C must be >= 0");
  require(n >= 1, ErrorCode::InvalidParam, "n must be >= 1");
  const Norms nm = norms(sample);
  const double p = static_cast<double>(sample.dim());
  return C * std::sqrt(std::max(nm.trace, 0.0) * nm.op) * std::sqrt(std::log(2.0 * p) / static_cast<double>(n));
}

double lounici_lambda(const SampleBatch& batch, double C) {
  return lounici_lambda(sample_cov(batch), batch.rows(), C);
}

double effective_rank(const SymMatrix& a) {
  const Norms nm = norms(a);
  require(nm.op > 0, ErrorCode::ZeroMatrix, "effective rank of the zero matrix is undefined");
  return nm.nuclear / nm.op;
}

MaskNorms mask_weighted_norms(const ToeplitzCol& m) {
  const std::size_t p = m.dim();
  MaskNorms out;
  double l2 = 0.0;
  for (std::size_t r = 0; r < p; ++r) {
    require(m.col[r] >= 0 && m.col[r] <= 1, ErrorCode::OutOfRange, "mask entries must lie in [0,1]");
    const double w = 1.0 / static_cast<double>(p - r);
    out.l1star += m.col[r] * w;
    l2 += m.col[r] * m.col[r] * w;
  }
  out.l2star = std::sqrt(l2);
  return out;
}

std::optional<BoundKind> bound_kind_from_string(const std::string& s) {
  if (s == "gauss") return BoundKind::Gauss;
  if (s == "chen") return BoundKind::Chen;
  if (s == "koltchinskii") return BoundKind::Koltchinskii;
  if (s == "kabanava") return BoundKind::Kabanava;
  return std::nullopt;
}

double bound_eval(BoundKind kind, const SymMatrix& sigma, const BoundParams& params) {
  require(params.n > 0, ErrorCode::InvalidParam, "bound needs n > 0");
  require(params.t >= 0, ErrorCode::InvalidParam, "bound needs t >= 0");
  const double n = params.n;
  const double t = params.t;
  const auto p = static_cast<double>(sigma.dim());
  const Norms s = norms(sigma);
  const double op = s.op;

  double rhs = 0.0;
  switch (kind) {
    case BoundKind::Gauss: {
      const double r = (p + t) / n;
      rhs = op * (std::sqrt(r) + r);
      break;
    }
    case BoundKind::Koltchinskii: {
      require(op > 0, ErrorCode::ZeroMatrix, "koltchinskii bound needs a nonzero Sigma");
      const double er = s.nuclear / op;
      rhs = op * (std::sqrt(er / n) + er / n + std::sqrt(t / n) + t / n);
      break;
    }
    case BoundKind::Chen: {
      require(params.mask.has_value(), ErrorCode::InvalidParam, "chen bound needs a mask");
      require(sigma.dim() >= 3, ErrorCode::InvalidParam, "chen bound needs p >= 3");
      require(params.mask->dim() == sigma.dim(), ErrorCode::DimMismatch, "mask dimension mismatch");
      require(op > 0, ErrorCode::ZeroMatrix, "chen bound needs a nonzero Sigma");
      const Norms m = norms(params.mask->weights());
      const double ratio = s.max / op;
      const double logp = std::log(p);
      rhs = op * (std::sqrt(ratio * m.col12 * m.col12 * logp / n) + ratio * m.op * logp * std::log(n * p) / n);
      break;
    }
    case BoundKind::Kabanava: {
      require(params.mask_col.has_value(), ErrorCode::InvalidParam, "kabanava bound needs a Toeplitz mask column");
      require(params.mask_col->dim() == sigma.dim(), ErrorCode::DimMismatch, "mask dimension mismatch");
      const MaskNorms w = mask_weighted_norms(*params.mask_col);
      const double logp = std::log(p);
      rhs = op * (std::sqrt(w.l2star * w.l2star * logp / n) + w.l1star * logp / n);
      break;
    }
  }
  return params.constant * rhs;
}

}  // namespace covest
