#include "covest/quantized.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "covest/linalg.hpp"
#include "covest/textio.hpp"

namespace covest {

namespace {

constexpr double kPi = std::numbers::pi;

void check_correlation(const SymMatrix& sigma) {
  for (std::size_t i = 0; i < sigma.dim(); ++i) {
    require(sigma(i, i) == 1.0, ErrorCode::OutOfRange, "Sigma must have a unit diagonal");
    for (std::size_t j = i + 1; j < sigma.dim(); ++j) {
      require(std::abs(sigma(i, j)) <= 1.0, ErrorCode::OutOfRange, "correlation entries must lie in [-1,1]");
    }
  }
}

SymMatrix entrywise(const SymMatrix& a, double (*f)(double)) {
  SymMatrix out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = i; j < a.dim(); ++j) out.set(i, j, f(a(i, j)));
  }
  return out;
}

double op_norm_of_sqrt(const SymMatrix& sq) {
  const auto v = eig_sym(sq).values;
  return std::sqrt(std::max(v.front(), 0.0));
}

}  // namespace

BitBatch::BitBatch(Dense<std::int8_t> bits) : bits_(std::move(bits)) {
  for (std::int8_t b : bits_.data()) require(b == 1 || b == -1, ErrorCode::InvalidParam, "bits must be +1 or -1");
}

void DitheredBatch::validate() const {
  require(lambda > 0, ErrorCode::InvalidParam, "dither level must be > 0");
  require(bits_a.rows() == bits_b.rows() && bits_a.cols() == bits_b.cols(), ErrorCode::DimMismatch,
          "dithered bit blocks differ in shape");
}

BitBatch quantize_sign(const SampleBatch& batch) {
  Dense<std::int8_t> bits(batch.rows(), batch.cols());
  for (std::size_t k = 0; k < batch.rows(); ++k) {
    for (std::size_t i = 0; i < batch.cols(); ++i) {
      const double x = batch(k, i);
      require(std::isfinite(x), ErrorCode::NonFinite, "sample has non-finite entries");
      bits(k, i) = sign_bit(x);
    }
  }
  return BitBatch(std::move(bits));
}

DitheredBatch quantize_dithered(const SampleBatch& batch, double lambda, RngStream& rng) {
  require(lambda > 0 && std::isfinite(lambda), ErrorCode::InvalidParam, "dither level must be > 0");
  const std::size_t n = batch.rows();
  const std::size_t p = batch.cols();
  Dense<std::int8_t> a(n, p);
  Dense<std::int8_t> b(n, p);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < p; ++i) {
      require(std::isfinite(batch(k, i)), ErrorCode::NonFinite, "sample has non-finite entries");
      a(k, i) = sign_bit(batch(k, i) + rng.uniform(-lambda, lambda));
    }
    for (std::size_t i = 0; i < p; ++i) b(k, i) = sign_bit(batch(k, i) + rng.uniform(-lambda, lambda));
  }
  return {BitBatch(std::move(a)), BitBatch(std::move(b)), lambda};
}

SymMatrix bit_gram(const BitBatch& bits) {
  const std::size_t n = bits.rows();
  const std::size_t p = bits.cols();
  require(n >= 1 && p >= 1, ErrorCode::EmptyBatch, "bit batch is empty");
  std::vector<long> count(p * p, 0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < p; ++i) {
      const int si = bits(k, i);
      for (std::size_t j = i; j < p; ++j) count[i * p + j] += si * bits(k, j);
    }
  }
  SymMatrix g(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      g.set(i, j, static_cast<double>(count[i * p + j]) / static_cast<double>(n));
    }
  }
  return g;
}

SymMatrix sign_estimator(const BitBatch& bits) { return inverse_arcsin_law(bit_gram(bits)); }

SymMatrix arcsin_law(const SymMatrix& sigma) {
  check_correlation(sigma);
  return entrywise(sigma, [](double x) { return 2.0 / kPi * std::asin(x); });
}

SymMatrix inverse_arcsin_law(const SymMatrix& gamma) {
  return entrywise(gamma, [](double x) { return std::sin(0.5 * kPi * x); });
}

SymMatrix dithered_estimator(const DitheredBatch& d) {
  d.validate();
  const std::size_t n = d.bits_a.rows();
  const std::size_t p = d.bits_a.cols();
  require(n >= 1 && p >= 1, ErrorCode::EmptyBatch, "dithered batch is empty");
  std::vector<long> count(p * p, 0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < p; ++i) {
      const int ai = d.bits_a(k, i);
      for (std::size_t j = 0; j < p; ++j) count[i * p + j] += ai * d.bits_b(k, j);
    }
  }
  // Integer counts make the symmetrization exact.
  const double scale = d.lambda * d.lambda / (2.0 * static_cast<double>(n));
  SymMatrix out(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      out.set(i, j, scale * static_cast<double>(count[i * p + j] + count[j * p + i]));
    }
  }
  return out;
}

double dither_level_rule(double sigma_inf, double n, double c_lambda) {
  require(c_lambda > 0, ErrorCode::InvalidParam, "c_lambda must be > 0");
  require(n > 1, ErrorCode::InvalidParam, "dither rule needs n > 1");
  require(sigma_inf > 0, ErrorCode::InvalidParam, "sigma_inf must be > 0");
  return std::sqrt(c_lambda * std::log(n) * sigma_inf);
}

SymMatrix sign_variance_proxy(const SymMatrix& z, const SymMatrix& sigma) {
  require(z.dim() == sigma.dim(), ErrorCode::DimMismatch, "Z and Sigma differ in dimension");
  const SymMatrix as = entrywise(sigma, [](double x) { return std::asin(x); });
  SymMatrix first = hadamard(square(z), as);
  first *= 2.0 / kPi;
  SymMatrix second = square(hadamard(z, as));
  second *= 4.0 / (kPi * kPi);
  return first - second;
}

SignDiagnostics sign_diagnostics(const SymMatrix& sigma, const Mask& mask, double n, double t) {
  check_correlation(sigma);
  require(mask.dim() == sigma.dim(), ErrorCode::DimMismatch, "mask dimension mismatch");
  require(n > 0 && t >= 0, ErrorCode::InvalidParam, "diagnostics need n > 0 and t >= 0");

  SignDiagnostics d;
  d.a = entrywise(sigma, [](double x) { return std::sqrt(std::max(0.0, 1.0 - x * x)); });
  const SymMatrix gamma = arcsin_law(sigma);
  const SymMatrix ma = hadamard(d.a, mask);
  const SymMatrix ms = hadamard(sigma, mask);

  d.sigma_ma_norm = op_norm_of_sqrt(sign_variance_proxy(ma, sigma));

  const double logp = std::log(static_cast<double>(sigma.dim()));
  const double r = (logp + t) / n;
  d.thm_upper = d.sigma_ma_norm * std::sqrt(r) + std::max(operator_norm(ma), operator_norm(ms)) * r;

  SymMatrix one_minus(sigma.dim());
  for (std::size_t i = 0; i < sigma.dim(); ++i) {
    for (std::size_t j = i; j < sigma.dim(); ++j) one_minus.set(i, j, 1.0 - gamma(i, j) * gamma(i, j));
  }
  d.lower_term1 = d.sigma_ma_norm / std::sqrt(n);
  d.lower_term2 = operator_norm(hadamard(ms, one_minus)) / n;
  d.lower_term3 = std::sqrt(operator_norm(hadamard(sign_variance_proxy(ms, sigma), gamma))) / n;
  return d;
}

SymMatrix psd_projected(const SymMatrix& est) { return psd_project(est); }

namespace textio {

namespace {

void write_block(std::ostream& os, const BitBatch& b) {
  for (std::size_t k = 0; k < b.rows(); ++k) {
    for (std::size_t i = 0; i < b.cols(); ++i) os << (i ? " " : "") << (b(k, i) > 0 ? "+1" : "-1");
    os << '\n';
  }
}

BitBatch read_block(std::istream& is, std::size_t n, std::size_t p) {
  Dense<std::int8_t> bits(n, p);
  for (auto& v : bits.data()) {
    std::string tok;
    require(static_cast<bool>(is >> tok), ErrorCode::ParseError, "unexpected end of bit block");
    const double x = parse_double(tok);
    require(x == 1.0 || x == -1.0, ErrorCode::ParseError, "bit entries must be +1 or -1");
    v = static_cast<std::int8_t>(x);
  }
  return BitBatch(std::move(bits));
}

std::size_t read_size(std::istream& is) {
  std::string tok;
  require(static_cast<bool>(is >> tok), ErrorCode::ParseError, "missing size in header");
  const double v = parse_double(tok);
  require(v >= 0 && v == std::floor(v), ErrorCode::ParseError, "bad size '" + tok + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

void write(std::ostream& os, const BitBatch& b) {
  os << "bits " << b.rows() << ' ' << b.cols() << '\n';
  write_block(os, b);
}

void write(std::ostream& os, const DitheredBatch& d) {
  os << "dbits " << d.bits_a.rows() << ' ' << d.bits_a.cols() << ' ' << format_double(d.lambda) << '\n';
  write_block(os, d.bits_a);
  write_block(os, d.bits_b);
}

BitBatch parse_bits(const std::string& text) {
  std::istringstream is(text);
  std::string head;
  is >> head;
  require(head == "bits", ErrorCode::ParseError, "expected 'bits' header");
  const std::size_t n = read_size(is);
  const std::size_t p = read_size(is);
  return read_block(is, n, p);
}

DitheredBatch parse_dbits(const std::string& text) {
  std::istringstream is(text);
  std::string head;
  is >> head;
  require(head == "dbits", ErrorCode::ParseError, "expected 'dbits' header");
  const std::size_t n = read_size(is);
  const std::size_t p = read_size(is);
  std::string lam;
  require(static_cast<bool>(is >> lam), ErrorCode::ParseError, "missing lambda");
  DitheredBatch d{read_block(is, n, p), read_block(is, n, p), parse_double(lam)};
  d.validate();
  return d;
}

}  // namespace textio

}  // namespace covest
