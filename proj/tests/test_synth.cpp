#include <cmath>

#include "covest/estimators.hpp"
#include "covest/linalg.hpp"
#include "covest/rng.hpp"
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

}  // namespace

TEST_CASE("philox known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  RngStream c(42, 8);
  RngStream d(43, 7);
  int same_c = 0;
  int same_d = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    same_c += x == c.next_u64();
    same_d += x == d.next_u64();
  }
  CHECK(same_c == 0);
  CHECK(same_d == 0);
}

TEST_CASE("uniform and normal moments") {
  RngStream rng(1, 0);
  const int n = 200000;
  double su = 0.0;
  double umin = 1.0;
  double umax = 0.0;
  double sn = 0.0;
  double sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    su += u;
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(umin > 0.0);
  CHECK(umax < 1.0);
  // Four standard errors.
  CHECK(std::abs(su / n - 0.5) < 4 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sn / n) < 4 * std::sqrt(1.0 / n));
  CHECK(std::abs(sn2 / n - 1.0) < 4 * std::sqrt(2.0 / n));

  std::vector<int> hist(5, 0);
  for (int i = 0; i < 50000; ++i) ++hist[rng.index(5)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 4 * std::sqrt(50000 * 0.2 * 0.8));
}

TEST_CASE("realize examples") {
  RngStream rng(0, 0);
  CHECK(realize(ConstCorr{0.0}, 3, rng) == SymMatrix::identity(3));
  const SymMatrix c = realize(ConstCorr{0.5}, 20, rng);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = 0; j < 20; ++j) CHECK(c(i, j) == (i == j ? 1.0 : 0.5));
  }
  const SymMatrix t = realize(BandedToeplitz{{1.0, 0.4}, 2}, 4, rng);
  CHECK(t == ToeplitzCol{{1.0, 0.4, 0.0, 0.0}}.expand());

  CHECK(code_of([&] { realize(ConstCorr{1.0}, 3, rng); }) == ErrorCode::InvalidParam);
  CHECK(code_of([&] { realize(ConstCorr{-0.5}, 3, rng); }) == ErrorCode::InvalidParam);
  CHECK(code_of([&] { realize(SparseRandom{1.0, 3, 1}, 5, rng); }) == ErrorCode::InvalidParam);
  CHECK(code_of([&] { realize(LowRankPlusRidge{0, 1}, 5, rng); }) == ErrorCode::InvalidParam);
  CHECK(code_of([&] { realize(Explicit{SymMatrix::diagonal({1, -1})}, 2, rng); }) == ErrorCode::InvalidParam);
  CHECK(code_of([&] { realize(BandedToeplitz{{1.0, 0.9}, 2}, 10, rng); }) == ErrorCode::InvalidParam);
}

TEST_CASE("every model realizes a PSD matrix") {
  RngStream rng(9, 0);
  const std::vector<CovModel> models = {
      ConstCorr{0.3}, ConstCorr{-0.05}, BandedToeplitz{{2.0, 0.5, 0.2}, 3}, SparseRandom{0.0, 3.0, 1.0},
      SparseRandom{0.5, 4.0, 2.0}, LowRankPlusRidge{2, 0.1}, Explicit{SymMatrix::identity(6)}};
  for (const auto& m : models) {
    for (std::size_t p : {std::size_t{6}}) {
      const SymMatrix s = realize(m, p, rng);
      const SymMatrix proj = psd_project(s);
      CHECK_MESSAGE(testutil::max_abs_diff(proj, s) <= 1e-10 * std::max(1.0, max_norm(s)), describe(m));
    }
  }
  for (std::size_t p = 2; p <= 10; ++p) {
    const SymMatrix s = realize(SparseRandom{0.0, 3.0, 1.0}, p, rng);
    CHECK(eig_sym(s).values.back() >= -1e-10);
    // Support graph: degree at most floor(s) - 1 = 2, and maximal, so no two
    // unlinked rows both have room for another edge.
    std::vector<std::size_t> deg(p, 0);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) deg[i] += s(i, j) != 0.0 && i != j;
      CHECK(deg[i] <= 2);
    }
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) CHECK((s(i, j) != 0.0 || deg[i] == 2 || deg[j] == 2));
    }
  }
}

TEST_CASE("realize is reproducible per stream") {
  RngStream a(5, 3);
  RngStream b(5, 3);
  CHECK(realize(SparseRandom{}, 8, a) == realize(SparseRandom{}, 8, b));
  CHECK(sample_gaussian(SymMatrix::identity(3), 10, a) == sample_gaussian(SymMatrix::identity(3), 10, b));
}

TEST_CASE("sample_gaussian examples") {
  RngStream rng(2, 0);
  const SampleBatch z = sample_gaussian(SymMatrix(3), 5, rng);
  for (double v : z.data()) CHECK(v == 0.0);

  const SymMatrix id = sample_cov(sample_gaussian(SymMatrix::identity(2), 1000000, rng));
  CHECK(std::abs(id(0, 0) - 1) < 5e-3);
  CHECK(std::abs(id(1, 1) - 1) < 5e-3);
  CHECK(std::abs(id(0, 1)) < 5e-3);

  const SymMatrix cc = sample_cov(sample_gaussian(SymMatrix::from_rows({{1, 0.9}, {0.9, 1}}), 1000000, rng));
  CHECK(std::abs(cc(0, 1) - 0.9) < 5e-3);
}

TEST_CASE("sample covariance converges within four standard errors") {
  RngStream rng(3, 0);
  const SymMatrix sigma = SymMatrix::from_rows({{2.0, 0.6, -0.3}, {0.6, 1.0, 0.2}, {-0.3, 0.2, 0.5}});
  const std::size_t n = 1000000;
  const SymMatrix s = sample_cov(sample_gaussian(sigma, n, rng));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      // Var(x_i x_j) = S_ii S_jj + S_ij^2 for a centered Gaussian.
      const double se = std::sqrt((sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) / n);
      CHECK(std::abs(s(i, j) - sigma(i, j)) < 4 * se);
    }
  }
}

TEST_CASE("complex gaussian sampling") {
  RngStream rng(4, 0);
  const std::size_t n = 200000;
  const double n0 = 3.0;
  HermMatrix sigma = HermMatrix::identity(2);
  sigma *= n0;
  const ComplexBatch y = sample_complex_gaussian(sigma, n, rng);
  double re2 = 0.0;
  double im2 = 0.0;
  cplx cross{};
  for (std::size_t k = 0; k < n; ++k) {
    re2 += y(k, 0).real() * y(k, 0).real();
    im2 += y(k, 0).imag() * y(k, 0).imag();
    cross += y(k, 0) * y(k, 0);
  }
  const double se = std::sqrt(2.0 * (n0 / 2) * (n0 / 2) / n);
  CHECK(std::abs(re2 / n - n0 / 2) < 4 * se);
  CHECK(std::abs(im2 / n - n0 / 2) < 4 * se);
  // Circular symmetry: E[y^2] = 0.
  CHECK(std::abs(cross / static_cast<double>(n)) < 4 * n0 / std::sqrt(static_cast<double>(n)));

  const ComplexBatch z = sample_complex_gaussian(HermMatrix(3), 4, rng);
  for (const cplx& v : z.data()) CHECK(v == cplx{});

  const ComplexBatch d = sample_complex_gaussian(HermMatrix::from_real(SymMatrix::diagonal({2, 0})), 50, rng);
  for (std::size_t k = 0; k < 50; ++k) CHECK(d(k, 1) == cplx{});
}

TEST_CASE("diag_conjugate") {
  const SymMatrix a = SymMatrix::ones(2);
  const SymMatrix b = diag_conjugate(a, {2.0, 3.0});
  CHECK(b == SymMatrix::from_rows({{4, 6}, {6, 9}}));
  CHECK(code_of([&] { diag_conjugate(a, {1.0}); }) == ErrorCode::DimMismatch);
}
