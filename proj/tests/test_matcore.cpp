#include <cmath>
#include <limits>
#include <sstream>

#include "covest/linalg.hpp"
#include "covest/matrix.hpp"
#include "covest/rng.hpp"
#include "covest/textio.hpp"
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

double orthonormality_error(const Matrix& v) {
  double worst = 0.0;
  for (std::size_t a = 0; a < v.cols(); ++a) {
    for (std::size_t b = 0; b < v.cols(); ++b) {
      double s = 0.0;
      for (std::size_t r = 0; r < v.rows(); ++r) s += v(r, a) * v(r, b);
      worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("symmetric types enforce their invariants") {
  CHECK(code_of([] { SymMatrix(0); }) == ErrorCode::InvalidParam);
  CHECK(code_of([] { SymMatrix::from_rows({{1, 2}, {3, 1}}); }) == ErrorCode::InvalidParam);
  SymMatrix a(3);
  a.set(0, 2, 5.0);
  CHECK(a(2, 0) == 5.0);
  CHECK(code_of([] { Mask(SymMatrix::from_rows({{1, 2}, {2, 1}})); }) == ErrorCode::OutOfRange);

  HermMatrix h(2);
  h.set(0, 1, {1.0, 2.0});
  CHECK(h(1, 0) == cplx(1.0, -2.0));
  h.set(1, 1, {3.0, 4.0});
  CHECK(h(1, 1) == cplx(3.0, 0.0));
  CHECK(code_of([] { HermMatrix::from_rows({{{1, 1}, {0, 0}}, {{0, 0}, {1, 0}}}); }) == ErrorCode::InvalidParam);
}

TEST_CASE("mask factories") {
  const Mask b = Mask::band(4, 2);
  CHECK(b(0, 1) == 1.0);
  CHECK(b(0, 2) == 0.0);
  CHECK(b(3, 3) == 1.0);
  const std::vector<double> col{1.0, 0.5, 0.0};
  const Mask t = Mask::toeplitz(col);
  CHECK(t(2, 1) == 0.5);
  CHECK(t(0, 2) == 0.0);
}

TEST_CASE("eig_sym examples") {
  SUBCASE("identity") {
    const EigDecomp e = eig_sym(SymMatrix::identity(3));
    for (double v : e.values) CHECK(v == Approx(1.0));
    CHECK(orthonormality_error(e.vectors) <= 1e-10);
  }
  SUBCASE("diagonal") {
    const EigDecomp e = eig_sym(SymMatrix::diagonal({3, 1, 2}));
    CHECK(e.values == std::vector<double>{3, 2, 1});
    CHECK(std::abs(e.vectors(0, 0)) == 1.0);
    CHECK(std::abs(e.vectors(2, 1)) == 1.0);
    CHECK(std::abs(e.vectors(1, 2)) == 1.0);
  }
  SUBCASE("swap matrix") {
    const EigDecomp e = eig_sym(SymMatrix::from_rows({{0, 1}, {1, 0}}));
    CHECK(e.values[0] == Approx(1.0));
    CHECK(e.values[1] == Approx(-1.0));
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(e.vectors(0, 0)) == Approx(s));
    CHECK(e.vectors(0, 0) * e.vectors(1, 0) == Approx(0.5));
    CHECK(e.vectors(0, 1) * e.vectors(1, 1) == Approx(-0.5));
  }
  SUBCASE("non-finite input") {
    SymMatrix a(2);
    a.set(0, 1, std::numeric_limits<double>::quiet_NaN());
    CHECK(code_of([&] { eig_sym(a); }) == ErrorCode::NonFinite);
  }
}

TEST_CASE("eig_sym matches an independent solver on random matrices") {
  RngStream rng(11, 0);
  for (std::size_t p = 1; p <= 20; ++p) {
    const SymMatrix a = testutil::random_sym(p, rng);
    const EigDecomp e = eig_sym(a);
    const auto ref = testutil::ref_eigenvalues(a);
    for (std::size_t i = 0; i < p; ++i) CHECK(e.values[i] == Approx(ref[i]).epsilon(1e-10).scale(10));
    for (std::size_t i = 1; i < p; ++i) CHECK(e.values[i - 1] >= e.values[i]);
    CHECK(frobenius_norm(reconstruct(e) - a) <= 1e-9 * frobenius_norm(a));
    CHECK(orthonormality_error(e.vectors) <= 1e-10);
  }
}

TEST_CASE("eig_sym is deterministic") {
  RngStream rng(3, 1);
  const SymMatrix a = testutil::random_sym(9, rng);
  const EigDecomp e1 = eig_sym(a);
  const EigDecomp e2 = eig_sym(a);
  CHECK(e1.values == e2.values);
  CHECK(e1.vectors == e2.vectors);
}

TEST_CASE("eig_herm examples") {
  CHECK(eig_herm(HermMatrix::identity(2)).values[0] == Approx(1.0));
  CHECK(eig_herm(HermMatrix::identity(2)).values[1] == Approx(1.0));
  const HermMatrix h = HermMatrix::from_rows({{{2, 0}, {0, 1}}, {{0, -1}, {2, 0}}});
  const auto e = eig_herm(h);
  REQUIRE(e.values.size() == 2);
  CHECK(e.values[0] == Approx(3.0));
  CHECK(e.values[1] == Approx(1.0));
  const auto d = eig_herm(HermMatrix::from_real(SymMatrix::diagonal({5, 0}))).values;
  CHECK(d[0] == Approx(5.0));
  CHECK(std::abs(d[1]) < 1e-12);
}

TEST_CASE("eig_herm matches an independent solver, including repeated eigenvalues") {
  RngStream rng(5, 0);
  for (std::size_t m = 1; m <= 10; ++m) {
    const HermMatrix a = testutil::random_herm(m, rng);
    const auto e = eig_herm(a);
    const auto ref = testutil::ref_eigenvalues(a);
    REQUIRE(e.values.size() == m);
    for (std::size_t i = 0; i < m; ++i) CHECK(e.values[i] == Approx(ref[i]).epsilon(1e-9).scale(10));
    // A V = V diag(values) and V^H V = I.
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t i = 0; i < m; ++i) {
        cplx s{};
        for (std::size_t j = 0; j < m; ++j) s += a(i, j) * e.vectors(j, k);
        CHECK(std::abs(s - e.values[k] * e.vectors(i, k)) < 1e-9 * (1 + std::abs(e.values[k])));
      }
      for (std::size_t l = 0; l < m; ++l) {
        cplx ip{};
        for (std::size_t i = 0; i < m; ++i) ip += std::conj(e.vectors(i, k)) * e.vectors(i, l);
        CHECK(std::abs(ip - (k == l ? 1.0 : 0.0)) < 1e-10);
      }
    }
  }
  // Rank-one Toeplitz matrix with a highly degenerate zero eigenvalue.
  const std::size_t m = 8;
  HermMatrix r1(m);
  std::vector<cplx> a(m);
  for (std::size_t i = 0; i < m; ++i) a[i] = std::polar(1.0, 0.7 * static_cast<double>(i));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) r1.set(i, j, a[i] * std::conj(a[j]));
  }
  const auto e = eig_herm(r1);
  CHECK(e.values[0] == Approx(8.0));
  for (std::size_t k = 1; k < m; ++k) CHECK(std::abs(e.values[k]) < 1e-9);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l < m; ++l) {
      cplx ip{};
      for (std::size_t i = 0; i < m; ++i) ip += std::conj(e.vectors(i, k)) * e.vectors(i, l);
      CHECK(std::abs(ip - (k == l ? 1.0 : 0.0)) < 1e-9);
    }
  }
}

TEST_CASE("norms examples") {
  const Norms i4 = norms(SymMatrix::identity(4));
  CHECK(i4.op == Approx(1.0));
  CHECK(i4.frob == Approx(2.0));
  CHECK(i4.nuclear == Approx(4.0));
  CHECK(i4.max == 1.0);
  CHECK(i4.col12 == Approx(1.0));
  CHECK(i4.trace == 4.0);

  const Norms sw = norms(SymMatrix::from_rows({{0, 1}, {1, 0}}));
  CHECK(sw.op == Approx(1.0));
  CHECK(sw.nuclear == Approx(2.0));
  CHECK(sw.frob == Approx(std::sqrt(2.0)));

  const Norms t = norms(SymMatrix::from_rows({{2, 1}, {1, 2}}));
  CHECK(t.op == Approx(3.0));
  CHECK(t.nuclear == Approx(4.0));
  CHECK(t.frob == Approx(std::sqrt(10.0)));
  CHECK(t.col12 == Approx(std::sqrt(5.0)));
}

TEST_CASE("norm inequalities hold on random matrices") {
  RngStream rng(8, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const SymMatrix a = testutil::random_sym(1 + trial % 12, rng);
    const Norms n = norms(a);
    CHECK(n.nuclear >= n.op * (1 - 1e-12));
    CHECK(n.frob <= n.nuclear * (1 + 1e-12));
    CHECK(n.op <= n.frob * (1 + 1e-12));
    CHECK(n.max <= n.op * (1 + 1e-12));
  }
  const Norms h = norms(HermMatrix::from_rows({{{2, 0}, {0, 1}}, {{0, -1}, {2, 0}}}));
  CHECK(h.op == Approx(3.0));
  CHECK(h.nuclear == Approx(4.0));
  CHECK(h.trace == Approx(4.0));
}

TEST_CASE("psd_project examples") {
  const SymMatrix psd = SymMatrix::from_rows({{2, 1}, {1, 2}});
  CHECK(testutil::max_abs_diff(psd_project(psd), psd) <= 1e-10);
  CHECK(testutil::max_abs_diff(psd_project(SymMatrix::diagonal({1, -2})), SymMatrix::diagonal({1, 0})) <= 1e-12);
  const SymMatrix half = SymMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}});
  CHECK(testutil::max_abs_diff(psd_project(SymMatrix::from_rows({{0, 1}, {1, 0}})), half) <= 1e-12);
}

TEST_CASE("psd_project is idempotent and 1-Lipschitz") {
  RngStream rng(21, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t p = 2 + trial % 9;
    const SymMatrix a = testutil::random_sym(p, rng);
    const SymMatrix b = testutil::random_sym(p, rng);
    const SymMatrix pa = psd_project(a);
    CHECK(testutil::max_abs_diff(psd_project(pa), pa) <= 1e-10);
    CHECK(eig_sym(pa).values.back() >= -1e-10);
    CHECK(frobenius_norm(pa - psd_project(b)) <= frobenius_norm(a - b) * (1 + 1e-12));
  }
}

TEST_CASE("toeplitz_project examples and brute force") {
  const ToeplitzCol t{{1.0, 0.3, -0.2, 0.1}};
  CHECK(toeplitz_project(t.expand()) == t);
  CHECK(toeplitz_project(SymMatrix::from_rows({{1, 2, 4}, {2, 1, 2}, {4, 2, 1}})).col == std::vector<double>{1, 2, 4});
  const ToeplitzCol c = toeplitz_project(SymMatrix::from_rows({{1, 2, 3}, {2, 5, 2}, {3, 2, 9}}));
  CHECK(c.col[0] == Approx(5.0));
  CHECK(c.col[1] == Approx(2.0));
  CHECK(c.col[2] == Approx(3.0));

  RngStream rng(4, 4);
  for (std::size_t p = 1; p <= 12; ++p) {
    const SymMatrix a = testutil::random_sym(p, rng);
    const ToeplitzCol got = toeplitz_project(a);
    for (std::size_t r = 0; r < p; ++r) {
      double s = 0.0;
      for (std::size_t i = r; i < p; ++i) s += a(i, i - r);
      CHECK(got.col[r] == s / static_cast<double>(p - r));
    }
    const HermMatrix h = testutil::random_herm(p, rng);
    const CToeplitzCol hc = toeplitz_project(h);
    CHECK(hc.col[0].imag() == 0.0);
    for (std::size_t r = 0; r < p; ++r) {
      cplx s{};
      for (std::size_t i = r; i < p; ++i) s += h(i, i - r);
      CHECK(std::abs(hc.col[r] - s / static_cast<double>(p - r)) <= 1e-15 * (1 + std::abs(s)));
    }
  }
}

TEST_CASE("hadamard examples") {
  const SymMatrix a = SymMatrix::from_rows({{1, 2}, {2, 3}});
  CHECK(hadamard(a, Mask::ones(2)) == a);
  CHECK(hadamard(a, Mask::identity(2)) == SymMatrix::diagonal({1, 3}));
  const Mask m(SymMatrix::from_rows({{1, 0.5}, {0.5, 1}}));
  CHECK(hadamard(a, m) == SymMatrix::from_rows({{1, 1}, {1, 3}}));
  CHECK(code_of([&] { hadamard(a, Mask::ones(3)); }) == ErrorCode::DimMismatch);
}

TEST_CASE("cholesky examples and semidefinite inputs") {
  const Matrix li = cholesky(SymMatrix::identity(3));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(li(i, j) == (i == j ? 1.0 : 0.0));
  }
  const Matrix d = cholesky(SymMatrix::diagonal({4, 9}));
  CHECK(d(0, 0) == 2.0);
  CHECK(d(1, 1) == 3.0);
  const Matrix l = cholesky(SymMatrix::from_rows({{4, 2}, {2, 5}}));
  CHECK(l(0, 0) == Approx(2.0));
  CHECK(l(1, 0) == Approx(1.0));
  CHECK(l(1, 1) == Approx(2.0));
  CHECK(l(0, 1) == 0.0);

  // Singular PSD: L L^T reproduces A.
  const SymMatrix ones = SymMatrix::ones(4);
  const Matrix lo = cholesky(ones);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 4; ++k) s += lo(i, k) * lo(j, k);
      CHECK(s == Approx(1.0).epsilon(1e-9));
    }
  }
  CHECK(cholesky(SymMatrix(3)) == Matrix(3, 3));
  CHECK(code_of([] { cholesky(SymMatrix::diagonal({1, -1})); }) == ErrorCode::NotPSD);

  const HermMatrix h = HermMatrix::from_rows({{{2, 0}, {0, 1}}, {{0, -1}, {2, 0}}});
  const CMatrix lh = cholesky(h);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      cplx s{};
      for (std::size_t k = 0; k < 2; ++k) s += lh(i, k) * std::conj(lh(j, k));
      CHECK(std::abs(s - h(i, j)) < 1e-12);
    }
  }
}

TEST_CASE("least squares zeroes dependent columns") {
  Matrix a(4, 3);
  const double cols[4][3] = {{1, 2, 0}, {1, 2, 1}, {1, 2, 2}, {1, 2, 3}};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 3; ++j) a(i, j) = cols[i][j];
  }
  const auto x = least_squares(a, {1, 2, 3, 4});
  CHECK(x[0] == Approx(1.0));
  CHECK(x[1] == 0.0);
  CHECK(x[2] == Approx(1.0));
}

TEST_CASE("text format round trips bit-exactly") {
  RngStream rng(1, 2);
  const SymMatrix a = testutil::random_sym(5, rng);
  CHECK(textio::parse_sym(textio::to_text(a)) == a);
  const HermMatrix h = testutil::random_herm(4, rng);
  CHECK(textio::parse_herm(textio::to_text(h)) == h);
  const ToeplitzCol t{{0.1, 1.0 / 3.0, -2e-300}};
  CHECK(textio::parse_toep(textio::to_text(t)) == t);
  SampleBatch b(3, 2);
  for (double& v : b.data()) v = rng.normal();
  CHECK(textio::parse_batch(textio::to_text(b)) == b);

  CHECK(textio::to_text(SymMatrix::identity(2)) == "sym 2\n1 0\n0 1\n");
  CHECK(code_of([] { textio::parse_sym("sym 2\n1 2\n3 1\n"); }) == ErrorCode::InvalidParam);
  CHECK(code_of([] { textio::parse_sym("sym 2\n1 x\n0 1\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { textio::parse_sym("sym 2\n1 0\n0\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { textio::parse_sym("toep 2\n1 0\n"); }) == ErrorCode::ParseError);
}
