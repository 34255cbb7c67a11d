#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "covest/matrix.hpp"

namespace covest::textio {

// Plain-text matrix format: a header line ("sym p", "herm p", "toep p",
// "batch n p") followed by whitespace-separated row-major values. Complex
// values are written "re,im". Reals are printed with 17 significant digits so
// a write/read cycle is bit-exact.

std::string format_double(double x);

void write(std::ostream& os, const SymMatrix& a);
void write(std::ostream& os, const HermMatrix& a);
void write(std::ostream& os, const ToeplitzCol& t);
void write(std::ostream& os, const SampleBatch& b);

using AnyMatrix = std::variant<SymMatrix, HermMatrix, ToeplitzCol, SampleBatch>;

/// Parses any of the four formats; throws ParseError on malformed input.
AnyMatrix read(std::istream& is);

template <class T>
std::string to_text(const T& x);

SymMatrix parse_sym(const std::string& text);
HermMatrix parse_herm(const std::string& text);
ToeplitzCol parse_toep(const std::string& text);
SampleBatch parse_batch(const std::string& text);

double parse_double(const std::string& token);
cplx parse_complex(const std::string& token);

}  // namespace covest::textio
