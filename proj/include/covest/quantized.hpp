#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "covest/matrix.hpp"
#include "covest/rng.hpp"

namespace covest {

/// n x p matrix of one-bit samples, every entry exactly +1 or -1.
class BitBatch {
 public:
  BitBatch() = default;
  /// Throws InvalidParam if an entry is not +-1.
  explicit BitBatch(Dense<std::int8_t> bits);

  std::size_t rows() const noexcept { return bits_.rows(); }
  std::size_t cols() const noexcept { return bits_.cols(); }
  int operator()(std::size_t k, std::size_t i) const { return bits_(k, i); }
  const Dense<std::int8_t>& bits() const noexcept { return bits_; }

  bool operator==(const BitBatch&) const = default;

 private:
  Dense<std::int8_t> bits_;
};

/// Two bits per entry, sign(x + tau) and sign(x + tau_bar), with independent
/// dithers uniform on [-lambda, lambda].
struct DitheredBatch {
  BitBatch bits_a;
  BitBatch bits_b;
  double lambda = 1.0;

  void validate() const;
  bool operator==(const DitheredBatch&) const = default;
};

/// Shared sign kernel: +1 for x >= 0 (including -0.0), -1 otherwise.
inline std::int8_t sign_bit(double x) { return x >= 0.0 ? 1 : -1; }

BitBatch quantize_sign(const SampleBatch& batch);

/// Draws tau^k then tau_bar^k (p uniforms each) per sample; dithers are not kept.
DitheredBatch quantize_dithered(const SampleBatch& batch, double lambda, RngStream& rng);

/// (1/n) sum_k s_k s_k^T, the empirical counterpart of (2/pi) arcsin(Sigma).
SymMatrix bit_gram(const BitBatch& bits);

/// sin((pi/2) * bit_gram(bits)); unit diagonal, entries in [-1, 1].
SymMatrix sign_estimator(const BitBatch& bits);

/// (2/pi) arcsin(Sigma) entrywise; Sigma must have unit diagonal and |entries| <= 1.
SymMatrix arcsin_law(const SymMatrix& sigma);
/// sin((pi/2) Gamma) entrywise.
SymMatrix inverse_arcsin_law(const SymMatrix& gamma);

/// Symmetrized (lambda^2 / n) sum_k a_k b_k^T. Not PSD in general.
SymMatrix dithered_estimator(const DitheredBatch& d);

/// lambda = sqrt(c_lambda * log(n) * sigma_inf) where sigma_inf bounds max |Sigma_ij|.
double dither_level_rule(double sigma_inf, double n, double c_lambda);

/// sigma(Z)^2 = (2/pi) Z^2 o arcsin(Sigma) - (4/pi^2) (Z o arcsin(Sigma))^2 with
/// matrix squares.
SymMatrix sign_variance_proxy(const SymMatrix& z, const SymMatrix& sigma);

/// Quantities controlling the sign estimator; bound terms are constant-free.
struct SignDiagnostics {
  /// cos(arcsin(Sigma)).
  SymMatrix a;
  /// || sigma(M o A) ||.
  double sigma_ma_norm = 0.0;
  /// Upper bound on || M o (est - Sigma) || at (n, t).
  double thm_upper = 0.0;
  /// Lower-bound terms: || sigma(M o A) || / sqrt(n),
  /// || M o Sigma o (1 - Gamma^2) || / n, || sigma(M o Sigma)^2 o Gamma ||^(1/2) / n.
  double lower_term1 = 0.0;
  double lower_term2 = 0.0;
  double lower_term3 = 0.0;
};

SignDiagnostics sign_diagnostics(const SymMatrix& sigma, const Mask& mask, double n, double t);

/// PSD projection of a quantized estimate.
SymMatrix psd_projected(const SymMatrix& est);

namespace textio {
void write(std::ostream& os, const BitBatch& b);
void write(std::ostream& os, const DitheredBatch& d);
BitBatch parse_bits(const std::string& text);
DitheredBatch parse_dbits(const std::string& text);
}  // namespace textio

}  // namespace covest
