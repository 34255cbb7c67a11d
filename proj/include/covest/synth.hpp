#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "covest/matrix.hpp"
#include "covest/rng.hpp"

namespace covest {

/// Unit diagonal, every off-diagonal entry equal to c.
struct ConstCorr {
  double c = 0.0;
};

/// Symmetric Toeplitz truth from a (possibly short) first column, zero beyond
/// `bandwidth` diagonals.
struct BandedToeplitz {
  std::vector<double> col;
  std::size_t bandwidth = 1;
};

/// Random member of the sparse class U(q, s, bound): a random support graph of
/// degree at most floor(s) - 1 with magnitudes in [1/2, 1] and random signs, plus
/// a small dense tail when q > 0. The diagonal 1 + |lambda_min| of the
/// off-diagonal part makes it PSD; the whole matrix is then scaled so the
/// diagonal equals `bound`.
struct SparseRandom {
  double q = 0.0;
  double s = 3.0;
  double bound = 1.0;
};

/// G G^T / rank + ridge I with G a p x rank standard Gaussian matrix.
struct LowRankPlusRidge {
  std::size_t rank = 1;
  double ridge = 0.0;
};

struct Explicit {
  SymMatrix matrix;
};

using CovModel = std::variant<ConstCorr, BandedToeplitz, SparseRandom, LowRankPlusRidge, Explicit>;

/// Human-readable description, e.g. "const_corr(c=0.5)".
std::string describe(const CovModel& model);

SymMatrix realize(const CovModel& model, std::size_t p, RngStream& rng);

/// D A D with D = diag(d).
SymMatrix diag_conjugate(const SymMatrix& a, const std::vector<double>& d);

/// n i.i.d. rows from N(0, sigma) as L z with L the Cholesky factor.
SampleBatch sample_gaussian(const SymMatrix& sigma, std::size_t n, RngStream& rng);

/// n i.i.d. circularly-symmetric complex Gaussian rows from CN(0, sigma).
ComplexBatch sample_complex_gaussian(const HermMatrix& sigma, std::size_t n, RngStream& rng);

}  // namespace covest
