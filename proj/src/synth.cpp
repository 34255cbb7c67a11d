#include "covest/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "covest/linalg.hpp"

namespace covest {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_psd(const SymMatrix& s, const std::string& what) {
  const auto e = eig_sym(s);
  const double scale = std::max(1.0, std::abs(e.values.front()));
  require(e.values.back() >= -1e-10 * scale, ErrorCode::InvalidParam, what + " is not positive semi-definite");
}

SymMatrix const_corr(double c, std::size_t p) {
  if (p > 1) {
    const double lower = -1.0 / static_cast<double>(p - 1);
    require(c > lower && c < 1.0, ErrorCode::InvalidParam, "const_corr needs c in (-1/(p-1), 1)");
  }
  SymMatrix s(p, c);
  for (std::size_t i = 0; i < p; ++i) s.set(i, i, 1.0);
  return s;
}

SymMatrix banded_toeplitz(const BandedToeplitz& m, std::size_t p) {
  require(m.bandwidth >= 1, ErrorCode::InvalidParam, "banded_toeplitz bandwidth must be >= 1");
  require(!m.col.empty(), ErrorCode::InvalidParam, "banded_toeplitz needs a first column");
  ToeplitzCol t{std::vector<double>(p, 0.0)};
  for (std::size_t r = 0; r < std::min({p, m.bandwidth, m.col.size()}); ++r) t.col[r] = m.col[r];
  SymMatrix s = t.expand();
  require_psd(s, "banded_toeplitz truth");
  return s;
}

SymMatrix sparse_random(const SparseRandom& m, std::size_t p, RngStream& rng) {
  require(m.q >= 0.0 && m.q < 1.0, ErrorCode::InvalidParam, "sparse_random needs q in [0,1)");
  require(m.s >= 1.0, ErrorCode::InvalidParam, "sparse_random needs s >= 1");
  require(m.bound > 0.0, ErrorCode::InvalidParam, "sparse_random needs bound > 0");

  SymMatrix off(p);
  std::vector<std::vector<bool>> support(p, std::vector<bool>(p, false));
  // Random graph with degree at most floor(s) - 1, so every row of the q = 0
  // class stays within budget after symmetrization.
  const auto per_row = std::min<std::size_t>(static_cast<std::size_t>(std::floor(m.s)) - 1, p - 1);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
  }
  for (std::size_t k = pairs.size(); k > 1; --k) std::swap(pairs[k - 1], pairs[rng.index(k)]);
  std::vector<std::size_t> degree(p, 0);
  for (const auto& [i, j] : pairs) {
    if (degree[i] >= per_row || degree[j] >= per_row) continue;
    ++degree[i];
    ++degree[j];
    const double mag = rng.uniform(0.5, 1.0);
    off.set(i, j, rng.uniform() < 0.5 ? -mag : mag);
    support[i][j] = support[j][i] = true;
  }
  if (m.q > 0.0) {
    const double tail = std::pow(0.5 / static_cast<double>(p), 1.0 / m.q);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) {
        if (!support[i][j]) off.set(i, j, rng.uniform(-tail, tail));
      }
    }
  }
  const double lmin = p > 1 ? eig_sym(off).values.back() : 0.0;
  const double diag = 1.0 + std::abs(std::min(lmin, 0.0));
  for (std::size_t i = 0; i < p; ++i) off.set(i, i, diag);
  // Rescale so the diagonal equals the class bound.
  off *= m.bound / diag;
  for (std::size_t i = 0; i < p; ++i) off.set(i, i, m.bound);
  return off;
}

SymMatrix low_rank_plus_ridge(const LowRankPlusRidge& m, std::size_t p, RngStream& rng) {
  require(m.rank >= 1 && m.rank <= p, ErrorCode::InvalidParam, "low_rank rank must lie in [1,p]");
  require(m.ridge >= 0.0, ErrorCode::InvalidParam, "low_rank ridge must be >= 0");
  Matrix g(p, m.rank);
  for (double& x : g.data()) x = rng.normal();
  SymMatrix s(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < m.rank; ++k) acc += g(i, k) * g(j, k);
      s.set(i, j, acc / static_cast<double>(m.rank) + (i == j ? m.ridge : 0.0));
    }
  }
  return s;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

}  // namespace

std::string describe(const CovModel& model) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const ConstCorr& m) { os << "const_corr(c=" << m.c << ")"; },
                 [&](const BandedToeplitz& m) {
                   os << "banded_toeplitz(col=" << join(m.col) << " bandwidth=" << m.bandwidth << ")";
                 },
                 [&](const SparseRandom& m) {
                   os << "sparse_random(q=" << m.q << " s=" << m.s << " bound=" << m.bound << ")";
                 },
                 [&](const LowRankPlusRidge& m) {
                   os << "low_rank(rank=" << m.rank << " ridge=" << m.ridge << ")";
                 },
                 [&](const Explicit& m) { os << "explicit(p=" << m.matrix.dim() << ")"; },
             },
             model);
  return os.str();
}

SymMatrix realize(const CovModel& model, std::size_t p, RngStream& rng) {
  require(p >= 1, ErrorCode::InvalidParam, "dimension must be >= 1");
  return std::visit(overloaded{
                        [&](const ConstCorr& m) { return const_corr(m.c, p); },
                        [&](const BandedToeplitz& m) { return banded_toeplitz(m, p); },
                        [&](const SparseRandom& m) { return sparse_random(m, p, rng); },
                        [&](const LowRankPlusRidge& m) { return low_rank_plus_ridge(m, p, rng); },
                        [&](const Explicit& m) {
                          require(m.matrix.dim() == p, ErrorCode::DimMismatch, "explicit truth has wrong dimension");
                          require_psd(m.matrix, "explicit truth");
                          return m.matrix;
                        },
                    },
                    model);
}

SymMatrix diag_conjugate(const SymMatrix& a, const std::vector<double>& d) {
  require(d.size() == a.dim(), ErrorCode::DimMismatch, "diagonal scaling has wrong length");
  SymMatrix out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = i; j < a.dim(); ++j) out.set(i, j, d[i] * a(i, j) * d[j]);
  }
  return out;
}

SampleBatch sample_gaussian(const SymMatrix& sigma, std::size_t n, RngStream& rng) {
  const std::size_t p = sigma.dim();
  const Matrix l = cholesky(sigma);
  SampleBatch batch(n, p);
  std::vector<double> z(p);
  for (std::size_t k = 0; k < n; ++k) {
    for (double& v : z) v = rng.normal();
    auto row = batch.row(k);
    for (std::size_t i = 0; i < p; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += l(i, j) * z[j];
      row[i] = s;
    }
  }
  return batch;
}

ComplexBatch sample_complex_gaussian(const HermMatrix& sigma, std::size_t n, RngStream& rng) {
  const std::size_t m = sigma.dim();
  const CMatrix l = cholesky(sigma);
  ComplexBatch batch(n, m);
  std::vector<cplx> g(m);
  const double half = std::sqrt(0.5);
  for (std::size_t k = 0; k < n; ++k) {
    for (cplx& v : g) {
      const double re = rng.normal();
      const double im = rng.normal();
      v = cplx(half * re, half * im);
    }
    auto row = batch.row(k);
    for (std::size_t i = 0; i < m; ++i) {
      cplx s{};
      for (std::size_t j = 0; j <= i; ++j) s += l(i, j) * g[j];
      row[i] = s;
    }
  }
  return batch;
}

}  // namespace covest
