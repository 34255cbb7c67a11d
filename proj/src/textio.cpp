#include "covest/textio.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace covest::textio {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& token) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  require(end != token.c_str() && *end == '\0' && errno != ERANGE, ErrorCode::ParseError,
          "not a number: '" + token + "'");
  return v;
}

cplx parse_complex(const std::string& token) {
  const auto comma = token.find(',');
  if (comma == std::string::npos) return {parse_double(token), 0.0};
  return {parse_double(token.substr(0, comma)), parse_double(token.substr(comma + 1))};
}

namespace {

std::string format_complex(cplx z) { return format_double(z.real()) + "," + format_double(z.imag()); }

std::size_t parse_size(const std::string& token) {
  const double v = parse_double(token);
  require(v >= 0 && v == static_cast<double>(static_cast<std::size_t>(v)), ErrorCode::ParseError,
          "not a size: '" + token + "'");
  return static_cast<std::size_t>(v);
}

std::string next_token(std::istream& is, const char* what) {
  std::string tok;
  require(static_cast<bool>(is >> tok), ErrorCode::ParseError, std::string("unexpected end of input reading ") + what);
  return tok;
}

}  // namespace

void write(std::ostream& os, const SymMatrix& a) {
  os << "sym " << a.dim() << '\n';
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) os << (j ? " " : "") << format_double(a(i, j));
    os << '\n';
  }
}

void write(std::ostream& os, const HermMatrix& a) {
  os << "herm " << a.dim() << '\n';
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) os << (j ? " " : "") << format_complex(a(i, j));
    os << '\n';
  }
}

void write(std::ostream& os, const ToeplitzCol& t) {
  os << "toep " << t.dim() << '\n';
  for (std::size_t i = 0; i < t.dim(); ++i) os << (i ? " " : "") << format_double(t.col[i]);
  os << '\n';
}

void write(std::ostream& os, const SampleBatch& b) {
  os << "batch " << b.rows() << ' ' << b.cols() << '\n';
  for (std::size_t i = 0; i < b.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) os << (j ? " " : "") << format_double(b(i, j));
    os << '\n';
  }
}

AnyMatrix read(std::istream& is) {
  const std::string kind = next_token(is, "header");
  if (kind == "sym") {
    const std::size_t p = parse_size(next_token(is, "dimension"));
    std::vector<std::vector<double>> rows(p, std::vector<double>(p));
    for (auto& r : rows) {
      for (double& v : r) v = parse_double(next_token(is, "entry"));
    }
    return SymMatrix::from_rows(rows);
  }
  if (kind == "herm") {
    const std::size_t m = parse_size(next_token(is, "dimension"));
    std::vector<std::vector<cplx>> rows(m, std::vector<cplx>(m));
    for (auto& r : rows) {
      for (cplx& v : r) v = parse_complex(next_token(is, "entry"));
    }
    return HermMatrix::from_rows(rows);
  }
  if (kind == "toep") {
    const std::size_t p = parse_size(next_token(is, "dimension"));
    ToeplitzCol t{std::vector<double>(p)};
    for (double& v : t.col) v = parse_double(next_token(is, "entry"));
    return t;
  }
  if (kind == "batch") {
    const std::size_t n = parse_size(next_token(is, "rows"));
    const std::size_t p = parse_size(next_token(is, "cols"));
    SampleBatch b(n, p);
    for (double& v : b.data()) v = parse_double(next_token(is, "entry"));
    return b;
  }
  throw Error(ErrorCode::ParseError, "unknown matrix header '" + kind + "'");
}

template <class T>
std::string to_text(const T& x) {
  std::ostringstream os;
  write(os, x);
  return os.str();
}

template std::string to_text(const SymMatrix&);
template std::string to_text(const HermMatrix&);
template std::string to_text(const ToeplitzCol&);
template std::string to_text(const SampleBatch&);

namespace {

template <class T>
T parse_as(const std::string& text, const char* what) {
  std::istringstream is(text);
  AnyMatrix any = read(is);
  auto* p = std::get_if<T>(&any);
  require(p != nullptr, ErrorCode::ParseError, std::string("expected a ") + what);
  return std::move(*p);
}

}  // namespace

SymMatrix parse_sym(const std::string& text) { return parse_as<SymMatrix>(text, "sym matrix"); }
HermMatrix parse_herm(const std::string& text) { return parse_as<HermMatrix>(text, "herm matrix"); }
ToeplitzCol parse_toep(const std::string& text) { return parse_as<ToeplitzCol>(text, "toep column"); }
SampleBatch parse_batch(const std::string& text) { return parse_as<SampleBatch>(text, "batch"); }

}  // namespace covest::textio
