#include <cmath>
#include <numeric>

#include "covest/estimators.hpp"
#include "covest/linalg.hpp"
#include "covest/synth.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace covest;
using doctest::Approx;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidParam;
}

SampleBatch batch_of(std::initializer_list<std::initializer_list<double>> rows) {
  SampleBatch b(rows.size(), rows.begin()->size());
  std::size_t k = 0;
  for (const auto& r : rows) {
    std::size_t i = 0;
    for (double v : r) b(k, i++) = v;
    ++k;
  }
  return b;
}

// Projected gradient on ||S - A||_F^2 + lambda tr(S) over the PSD cone, with
// Eigen doing the projections.
Eigen::MatrixXd lasso_oracle(const Eigen::MatrixXd& a, double lambda) {
  const Eigen::Index p = a.rows();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
  const double step = 0.1;
  for (int it = 0; it < 400; ++it) {
    Eigen::MatrixXd g = 2.0 * (s - a) + lambda * Eigen::MatrixXd::Identity(p, p);
    Eigen::MatrixXd y = s - step * g;
    y = 0.5 * (y + y.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(y);
    Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0);
    s = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
  }
  return s;
}

}  // namespace

TEST_CASE("sample_cov examples") {
  CHECK(sample_cov(batch_of({{1, 2}})) == SymMatrix::from_rows({{1, 2}, {2, 4}}));
  CHECK(sample_cov(batch_of({{1, 2}, {-1, -2}})) == SymMatrix::from_rows({{1, 2}, {2, 4}}));
  CHECK(code_of([] { sample_cov(SampleBatch(0, 3)); }) == ErrorCode::EmptyBatch);

  RngStream rng(1, 0);
  const SymMatrix truth = realize(ConstCorr{0.9}, 2, rng);
  const SymMatrix s = sample_cov(sample_gaussian(truth, 1000000, rng));
  CHECK(testutil::max_abs_diff(s, truth) < 5e-3);

  // Centering removes a constant offset.
  const SymMatrix c = sample_cov(batch_of({{1, 5}, {3, 5}}), true);
  CHECK(c == SymMatrix::from_rows({{1, 0}, {0, 0}}));
}

TEST_CASE("sample_cov is PSD") {
  RngStream rng(2, 0);
  for (int t = 0; t < 20; ++t) {
    SampleBatch b(3 + t % 4, 6);
    for (double& v : b.data()) v = rng.normal();
    CHECK(eig_sym(sample_cov(b)).values.back() >= -1e-12);
  }
}

TEST_CASE("masked_cov examples") {
  RngStream rng(3, 0);
  SampleBatch b(7, 3);
  for (double& v : b.data()) v = rng.normal();
  const SymMatrix s = sample_cov(b);
  CHECK(masked_cov(b, Mask::ones(3)) == s);
  const SymMatrix d = masked_cov(b, Mask::identity(3));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(d(i, j) == (i == j ? s(i, i) : 0.0));
  }
  const SymMatrix band1 = masked_cov(b, Mask::band(3, 1));
  CHECK(band1(0, 1) == 0.0);
  CHECK(band1(0, 2) == 0.0);
  CHECK(code_of([&] { masked_cov(b, Mask::ones(4)); }) == ErrorCode::DimMismatch);
}

TEST_CASE("threshold examples and idempotence") {
  const SymMatrix a = SymMatrix::from_rows({{1, 0.2}, {0.2, 1}});
  CHECK(threshold(a, 0.0) == a);
  CHECK(threshold(a, 1.5) == SymMatrix(2));
  CHECK(threshold(a, 0.5) == SymMatrix::identity(2));
  CHECK(threshold(a, 0.2) == a);  // ties are kept
  CHECK(code_of([&] { threshold(a, -1.0); }) == ErrorCode::InvalidParam);

  RngStream rng(4, 0);
  for (int t = 0; t < 20; ++t) {
    const SymMatrix r = testutil::random_sym(6, rng);
    const double tau = rng.uniform(0.0, 1.5);
    CHECK(threshold(threshold(r, tau), tau) == threshold(r, tau));
    const ToeplitzCol c = toeplitz_project(r);
    CHECK(threshold(threshold(c, tau), tau) == threshold(c, tau));
  }
}

TEST_CASE("threshold rules resolve") {
  CHECK(resolve_tau(FixedTau{0.3}, 10, 5) == 0.3);
  CHECK(resolve_tau(BickelRule{2.0}, 100, 50) == Approx(2.0 * std::sqrt(std::log(50.0) / 100)));
  const double tau = resolve_tau(ToeplitzRule{1, 1, 2, 0.5}, 50, 100);
  CHECK(tau == Approx(std::sqrt(8.0) * std::sqrt(std::log(100.0) / 5000)));
  CHECK(tau == Approx(0.0858).epsilon(1e-3));
  // max(C K^2, sqrt(C) K) picks the larger branch.
  CHECK(resolve_tau(ToeplitzRule{4, 1, 2, 0.5}, 50, 100) == Approx(4 * tau));
  CHECK(resolve_tau(ToeplitzRule{0.25, 1, 2, 0.5}, 50, 100) == Approx(0.5 * tau));
  CHECK(code_of([] { resolve_tau(ToeplitzRule{1, 1, 1, 0.5}, 5, 5); }) == ErrorCode::InvalidParam);
  CHECK(code_of([] { resolve_tau(ToeplitzRule{1, 1, 2, 1.0}, 5, 5); }) == ErrorCode::InvalidParam);
  CHECK(code_of([] { resolve_tau(BickelRule{0.0}, 5, 5); }) == ErrorCode::InvalidParam);
}

TEST_CASE("thresholded_cov examples") {
  RngStream rng(5, 0);
  SampleBatch b(40, 5);
  for (double& v : b.data()) v = rng.normal();
  CHECK(thresholded_cov(b, FixedTau{0.0}) == sample_cov(b));
  const SymMatrix big = thresholded_cov(b, BickelRule{1e6});
  CHECK(big == SymMatrix(5));
  // A moderately large M' keeps only the dominant diagonal.
  const SymMatrix diag = thresholded_cov(b, BickelRule{3.0});
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(diag(i, i) != 0.0);
    for (std::size_t j = 0; j < 5; ++j) {
      if (i != j) CHECK(diag(i, j) == 0.0);
    }
  }
}

TEST_CASE("sparse support recovery with M' = 2 max diag" * doctest::may_fail()) {
  // At n = 2000, p = 50 the threshold sits 2 sqrt(log 50) = 3.96 null standard
  // deviations out, so about 9% of trials carry a false positive. Reported, not
  // enforced.
  const std::size_t p = 50;
  int recovered = 0;
  for (int t = 0; t < 100; ++t) {
    RngStream rng(2024, t);
    const SymMatrix truth = realize(SparseRandom{0.0, 3.0, 1.0}, p, rng);
    double md = 0.0;
    for (std::size_t i = 0; i < p; ++i) md = std::max(md, truth(i, i));
    const SymMatrix est = thresholded_cov(sample_gaussian(truth, 2000, rng), BickelRule{2 * md});
    bool same = true;
    for (std::size_t i = 0; i < p && same; ++i) {
      for (std::size_t j = 0; j < p; ++j) same = same && ((truth(i, j) != 0) == (est(i, j) != 0));
    }
    recovered += same;
  }
  MESSAGE("exact support recovery in " << recovered << "/100 trials");
  CHECK(recovered >= 95);
}

TEST_CASE("sparse generator stays in its class") {
  for (int t = 0; t < 20; ++t) {
    RngStream rng(6, t);
    const SymMatrix s = realize(SparseRandom{0.0, 3.0, 1.5}, 30, rng);
    CHECK(SparsityClassParams{0.0, 3.0, 1.5}.contains(s));
    CHECK_FALSE(SparsityClassParams{0.0, 1.0, 1.5}.contains(s));
  }
  CHECK(SparsityClassParams{0.5, 2.0, 1.0}.contains(SymMatrix::identity(3)));
  CHECK_FALSE(SparsityClassParams{0.0, 2.0, 0.5}.contains(SymMatrix::identity(3)));
  CHECK(SparsityClassParams{0.0, 2.0, 1.0}.contains_toeplitz(ToeplitzCol{{1.0, 0.5, 0.0}}));
  CHECK_FALSE(SparsityClassParams{0.0, 1.0, 1.0}.contains_toeplitz(ToeplitzCol{{1.0, 0.5, 0.0}}));
  CHECK(code_of([] { SparsityClassParams{1.0, 2.0, 1.0}.validate(); }) == ErrorCode::InvalidParam);
}

TEST_CASE("band examples and idempotence") {
  RngStream rng(7, 0);
  const SymMatrix a = testutil::random_sym(4, rng);
  CHECK(band(a, 4) == a);
  const SymMatrix d = band(a, 1);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) CHECK(d(i, j) == (i == j ? a(i, i) : 0.0));
  }
  const SymMatrix tri = band(a, 2);
  CHECK(tri(0, 1) == a(0, 1));
  CHECK(tri(0, 2) == 0.0);
  CHECK(tri(1, 3) == 0.0);
  CHECK(band(tri, 2) == tri);
  CHECK(code_of([&] { band(a, 0); }) == ErrorCode::InvalidParam);
  CHECK(code_of([&] { band(a, 5); }) == ErrorCode::InvalidParam);
  const ToeplitzCol c{{1, 2, 3, 4}};
  CHECK(band(c, 2).col == std::vector<double>{1, 2, 0, 0});
  CHECK(band(band(c, 3), 3) == band(c, 3));
}

TEST_CASE("toeplitz_cov examples") {
  CHECK(toeplitz_cov(batch_of({{2}, {4}})).col == std::vector<double>{10.0});
  CHECK(toeplitz_cov(batch_of({{1, 1}, {-1, -1}})).col == std::vector<double>{1, 1});

  RngStream rng(8, 0);
  const ToeplitzCol truth{{1.0, 0.5, 0.25, 0.0, 0.0}};
  const ToeplitzCol est = toeplitz_cov(sample_gaussian(truth.expand(), 1000000, rng));
  for (std::size_t r = 0; r < 5; ++r) CHECK(std::abs(est.col[r] - truth.col[r]) < 5e-3);

  SampleBatch b(9, 6);
  for (double& v : b.data()) v = rng.normal();
  const SymMatrix e = toeplitz_cov(b).expand();
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      if (i > 0 && j > 0) CHECK(e(i, j) == e(i - 1, j - 1));
    }
  }
}

TEST_CASE("toeplitz_thresholded_cov") {
  CHECK(toeplitz_band_width(0.5, 100) == 50);
  CHECK(toeplitz_band_width(0.3, 10) == 3);
  CHECK(code_of([] { toeplitz_band_width(0.05, 10); }) == ErrorCode::InvalidParam);

  RngStream rng(9, 0);
  const SymMatrix est = toeplitz_thresholded_cov(sample_gaussian(SymMatrix::identity(20), 20000, rng), ToeplitzRule{});
  CHECK(testutil::max_abs_diff(est, SymMatrix::identity(20)) < 0.05);
  for (std::size_t i = 1; i < 20; ++i) CHECK(est(i, 0) == 0.0);

  // Entries beyond floor(alpha p) vanish even when large.
  SampleBatch b(3, 6);
  for (double& v : b.data()) v = 1.0;
  const SymMatrix all = toeplitz_thresholded_cov(b, ToeplitzRule{1, 1, 2, 0.5});
  CHECK(all(2, 0) == 1.0);
  CHECK(all(3, 0) == 0.0);
}

TEST_CASE("lasso_lowrank examples") {
  RngStream rng(10, 0);
  SampleBatch b(3, 5);
  for (double& v : b.data()) v = rng.normal();
  const SymMatrix s = sample_cov(b);
  CHECK(testutil::max_abs_diff(lasso_lowrank_cov(b, 0.0), psd_project(s)) < 1e-12);
  CHECK(testutil::max_abs_diff(lasso_lowrank_cov(b, 2 * norms(s).op), SymMatrix(5)) == 0.0);
  CHECK(testutil::max_abs_diff(lasso_lowrank(SymMatrix::diagonal({3, 1}), 2.0), SymMatrix::diagonal({2, 0})) < 1e-14);
  CHECK(code_of([&] { lasso_lowrank(s, -1.0); }) == ErrorCode::InvalidParam);
}

TEST_CASE("lasso closed form matches projected gradient") {
  RngStream rng(11, 0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t p = 1 + t % 8;
    const SymMatrix a = testutil::random_sym(p, rng);
    const double lambda = rng.uniform(0.0, 3.0);
    const SymMatrix got = lasso_lowrank(a, lambda);
    const SymMatrix ref = testutil::from_eigen(lasso_oracle(testutil::to_eigen(a), lambda));
    CHECK(frobenius_norm(got - ref) <= 1e-8);
  }
}

TEST_CASE("lasso nuclear norm is non-increasing in lambda") {
  RngStream rng(12, 0);
  for (int t = 0; t < 10; ++t) {
    const SymMatrix a = testutil::random_sym(6, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (double lam = 0.0; lam <= 6.0; lam += 0.25) {
      const double nuc = norms(lasso_lowrank(a, lam)).nuclear;
      CHECK(nuc <= prev + 1e-12);
      prev = nuc;
    }
  }
}

TEST_CASE("lounici lambda") {
  CHECK(lounici_lambda(SymMatrix::identity(2), 8, 1.0) == Approx(std::sqrt(2.0) * std::sqrt(std::log(4.0) / 8)));
  CHECK(lounici_lambda(SymMatrix::identity(2), 8, 1.0) == Approx(0.5887).epsilon(1e-4));
  CHECK(lounici_lambda(SymMatrix::identity(2), 8, 0.0) == 0.0);
  const SymMatrix s = SymMatrix::from_rows({{2, 1}, {1, 3}});
  CHECK(lounici_lambda(s, 10, 2.0) == Approx(2 * lounici_lambda(s, 10, 1.0)));
  const SampleBatch b = batch_of({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
  CHECK(lounici_lambda(b, 1.0) == Approx(lounici_lambda(sample_cov(b), 4, 1.0)));
}

TEST_CASE("effective rank") {
  CHECK(effective_rank(SymMatrix::identity(7)) == Approx(7.0));
  SymMatrix r1(3);
  const double x[3] = {1, -2, 0.5};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i; j < 3; ++j) r1.set(i, j, x[i] * x[j]);
  }
  CHECK(effective_rank(r1) == Approx(1.0));
  CHECK(effective_rank(SymMatrix::diagonal({4, 2, 2})) == Approx(2.0));
  CHECK(code_of([] { effective_rank(SymMatrix(3)); }) == ErrorCode::ZeroMatrix);
  RngStream rng(13, 0);
  for (int t = 0; t < 10; ++t) {
    const SymMatrix a = realize(LowRankPlusRidge{2, 0.1}, 6, rng);
    const double c = rng.uniform(0.1, 10.0);
    CHECK(effective_rank(c * a) == Approx(effective_rank(a)).epsilon(1e-10));
  }
}

TEST_CASE("mask weighted norms") {
  for (std::size_t p : {1, 4, 9}) {
    ToeplitzCol e1{std::vector<double>(p, 0.0)};
    e1.col[0] = 1.0;
    const MaskNorms n = mask_weighted_norms(e1);
    CHECK(n.l1star == Approx(1.0 / p));
    CHECK(n.l2star == Approx(1.0 / std::sqrt(static_cast<double>(p))));
  }
  const MaskNorms z = mask_weighted_norms(ToeplitzCol{{0, 0, 0}});
  CHECK(z.l1star == 0.0);
  CHECK(z.l2star == 0.0);
  const MaskNorms o = mask_weighted_norms(ToeplitzCol{{1, 1, 1}});
  CHECK(o.l1star == Approx(11.0 / 6.0));
  CHECK(o.l2star == Approx(std::sqrt(11.0 / 6.0)));
  CHECK(code_of([] { mask_weighted_norms(ToeplitzCol{{1.5}}); }) == ErrorCode::OutOfRange);
}

TEST_CASE("bound evaluators") {
  BoundParams bp;
  bp.n = 10;
  CHECK(bound_eval(BoundKind::Gauss, SymMatrix::identity(10), bp) == Approx(2.0));
  bp.constant = 3.0;
  CHECK(bound_eval(BoundKind::Gauss, SymMatrix::identity(10), bp) == Approx(6.0));

  // Koltchinskii with effective rank 1 vanishes as n grows.
  BoundParams kp;
  double prev = std::numeric_limits<double>::infinity();
  for (double n : {1e2, 1e4, 1e6, 1e8}) {
    kp.n = n;
    const double v = bound_eval(BoundKind::Koltchinskii, SymMatrix::diagonal({1, 0, 0}), kp);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-3);

  // Kabanava with m = e1: the squared first term is ||Sigma||^2 log p / (p n).
  auto first_sq = [](std::size_t p) {
    ToeplitzCol m{std::vector<double>(p, 0.0)};
    m.col[0] = 1.0;
    BoundParams b;
    b.n = 1e12;  // second term negligible
    b.mask_col = m;
    const double v = bound_eval(BoundKind::Kabanava, SymMatrix::identity(p), b);
    return v * v / std::log(static_cast<double>(p));
  };
  CHECK(first_sq(16) / first_sq(8) == Approx(0.5).epsilon(1e-6));
  CHECK(first_sq(64) / first_sq(32) == Approx(0.5).epsilon(1e-6));

  BoundParams cp;
  cp.n = 100;
  cp.mask = Mask::ones(4);
  const SymMatrix s = SymMatrix::identity(4);
  // ratio = 1, col12(ones) = 2, ||ones|| = 4.
  const double expect = std::sqrt(4 * std::log(4.0) / 100) + 4 * std::log(4.0) * std::log(400.0) / 100;
  CHECK(bound_eval(BoundKind::Chen, s, cp) == Approx(expect));
  CHECK(code_of([&] { bound_eval(BoundKind::Chen, s, BoundParams{}); }) == ErrorCode::InvalidParam);
  cp.mask = Mask::ones(2);
  CHECK(code_of([&] { bound_eval(BoundKind::Chen, SymMatrix::identity(2), cp); }) == ErrorCode::InvalidParam);
  CHECK(bound_kind_from_string("kabanava") == BoundKind::Kabanava);
  CHECK_FALSE(bound_kind_from_string("nope").has_value());
}
