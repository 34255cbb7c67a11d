#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "covest/linalg.hpp"
#include "covest/matrix.hpp"
#include "covest/rng.hpp"

namespace covest {

/// Uniform linear array with M antennas and spacing d / wavelength.
struct UlaConfig {
  std::size_t M = 32;
  double spacing_ratio = 0.5;

  void validate() const;
};

/// a(xi)_m = exp(j 2 pi spacing_ratio m xi), m = 0..M-1.
std::vector<cplx> array_response(double xi, const UlaConfig& cfg);

// ------------------------------------------------------------------ ASF

struct AsfSpike {
  double xi = 0.0;
  double weight = 0.0;
};

/// Indicator of [center - width/2, center + width/2].
struct AsfRect {
  double center = 0.0;
  double width = 0.1;
};

struct AsfGaussian {
  double mean = 0.0;
  double std = 0.03;
};

/// Angular spread function: spikes of total weight alpha plus a continuous
/// part (1 - alpha) / Z * (sum of rects + sum of Gaussian densities) on [-1, 1].
struct AsfSpec {
  std::vector<AsfSpike> spikes;
  std::vector<AsfRect> rects;
  std::vector<AsfGaussian> gaussians;
  double alpha = 0.5;

  void validate() const;
  /// Integral of the unnormalized continuous part over [-1, 1].
  double normalizer() const;
  /// Exact mass of the normalized continuous part on [a, b] within [-1, 1].
  double continuous_mass(double a, double b) const;
  /// Normalized continuous density at xi (0 outside [-1, 1]).
  double continuous_density(double xi) const;
};

struct AsfRecipe {
  double alpha = 0.5;
  std::size_t spikes = 2;
  std::size_t rects = 2;
  std::size_t gaussians = 2;
};

/// Spikes at Unif[-1,1] with weight alpha / r each; rect centers alternate
/// between Unif[-1,0] and Unif[0,1] with widths Unif[0.1,0.3]; Gaussian means
/// Unif[-0.7,0.7] and deviations Unif[0.03,0.04]. alpha = 1 drops the
/// continuous part.
AsfSpec random_asf(RngStream& rng, const AsfRecipe& recipe = {});

/// Number of quadrature cells on [-1, 1] used for an array of M antennas.
std::size_t quadrature_cells(std::size_t M);

/// Cell midpoints and exact continuous masses of the quadrature grid.
struct AsfGrid {
  std::vector<double> xi;
  std::vector<double> mass;
};
AsfGrid asf_grid(const AsfSpec& asf, std::size_t cells);

/// Integral of gamma a a^H: spikes exactly, the continuous part as exact cell
/// masses placed at cell midpoints.
HermMatrix true_covariance(const AsfSpec& asf, const UlaConfig& cfg);

// ------------------------------------------------------------ simulation

struct PilotSamples {
  /// N x M, one received pilot y(s) per row.
  ComplexBatch y;
  double n0 = 0.0;
};

/// y(s) = h(s) + z(s) with h(s) = sum_i sqrt(mass_i) g_i a(xi_i) over spikes and
/// grid cells, g_i ~ CN(0,1), z ~ CN(0, N0 I), N0 = trace(Sigma_h) / M / 10^(snr/10).
/// An infinite snr_db gives N0 = 0 and no noise.
PilotSamples simulate_pilots(const AsfSpec& asf, const UlaConfig& cfg, std::size_t N, double snr_db,
                             RngStream& rng);

/// (1/N) sum_s y(s) y(s)^H.
HermMatrix sample_cov(const ComplexBatch& y);

// ----------------------------------------------------------------- MUSIC

/// Largest k <= min(cap, M/4, N-1) with lambda_k >= rho lambda_{k+1}, else 0.
struct AutoOrder {
  double rho = 3.0;
  std::size_t cap = 8;
};

using MusicOrder = std::variant<std::size_t, AutoOrder>;

struct MusicResult {
  /// Estimated locations in ascending order.
  std::vector<double> xi;
  std::size_t order = 0;
};

/// Order selection on descending eigenvalues of the sample covariance.
std::size_t music_auto_order(const std::vector<double>& eigenvalues, std::size_t M, std::size_t N,
                             const AutoOrder& rule);

/// Pseudospectrum 1 / ||E_noise^H a(xi)||^2 on xi_g = -1 + 2g/G, g < G
/// (G = 32 M unless grid_size is given); returns the strongest local maxima.
MusicResult music_spikes(const ComplexBatch& y, const UlaConfig& cfg, const MusicOrder& order,
                         std::size_t grid_size = 0);

// ------------------------------------------------------------ dictionary

enum class DictKind { Dirac, Gaussian, Laplacian, Rect };

std::optional<DictKind> dict_kind_from_string(const std::string& s);
std::string to_string(DictKind k);

/// Atom first columns (one per column of `atoms`, M rows): G grid atoms
/// centered at xi_i = -1 + 2i/G followed by one Dirac atom per spike.
struct Dictionary {
  DictKind kind = DictKind::Dirac;
  std::size_t grid_size = 0;
  std::vector<double> locations;
  CMatrix atoms;

  std::size_t size() const noexcept { return atoms.cols(); }
};

/// Continuous kernels have scale 2/G (std for gaussian and laplacian, width for
/// rect) and unit mass on [-1, 1]. Atoms are PSD-checked when M <= 16.
Dictionary build_dictionary(DictKind kind, std::size_t G, const UlaConfig& cfg,
                            const std::vector<double>& spikes = {});

// ------------------------------------------------------------------ NNLS

struct NnlsProblem {
  CMatrix s_tilde;
  std::vector<cplx> sigma;
  /// sqrt(M), sqrt(2(M-1)), ..., sqrt(2).
  std::vector<double> w;
};

std::vector<double> nnls_weights(std::size_t M);
NnlsProblem make_nnls_problem(const Dictionary& dict, std::vector<cplx> sigma);

/// Lower co-diagonal averages of Sigma_y_hat - N0 I.
std::vector<cplx> toeplitz_denoise(const ComplexBatch& y, double n0);

struct NnlsResult {
  std::vector<double> u;
  /// ||W (S u - sigma)||^2.
  double residual = 0.0;
  std::size_t iterations = 0;
  /// False when the iteration cap was hit; u is then the last iterate.
  bool converged = true;
  /// Objective after each outer iteration, starting with u = 0.
  std::vector<double> objective;
  /// ||A||_F ||b|| of the lifted real problem; tolerances scale with it.
  double scale = 1.0;
};

/// Lawson-Hanson active set on the real problem stacking W Re and W Im.
NnlsResult nnls_solve(const NnlsProblem& prob);

/// Gradient A^T (A u - b) of the lifted objective (half its true gradient).
std::vector<double> nnls_gradient(const NnlsProblem& prob, const std::vector<double>& u);

/// sum_i u_i S_i expanded from atom first columns.
HermMatrix assemble_estimate(const Dictionary& dict, const std::vector<double>& u);

// --------------------------------------------------------------- metrics

/// ||truth - est||_F / ||truth||_F.
double metric_enf(const HermMatrix& truth, const HermMatrix& est);

/// 1 - <truth, U_est U_est^H> / <truth, U U^H> over the d dominant eigenvectors.
double metric_epe(const HermMatrix& truth, const HermMatrix& est, std::size_t d);
/// Several d at once, reusing a decomposition of the truth.
std::vector<double> metric_epe(const HermMatrix& truth, const HermEigDecomp& truth_eig, const HermMatrix& est,
                               const std::vector<std::size_t>& ds);

// -------------------------------------------------------------- pipeline

struct PipelineConfig {
  UlaConfig ula;
  DictKind kind = DictKind::Dirac;
  /// 0 means 2 M.
  std::size_t dict_size = 0;
  MusicOrder order = AutoOrder{};
  /// 0 means 32 M.
  std::size_t music_grid = 0;
};

struct PipelineResult {
  HermMatrix nnls;
  /// Sigma_y_hat - N0 I.
  HermMatrix sample;
  MusicResult music;
  NnlsResult fit;
};

PipelineResult estimate_channel(const PilotSamples& pilots, const PipelineConfig& cfg);

}  // namespace covest
