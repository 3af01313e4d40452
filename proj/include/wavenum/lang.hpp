#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wavenum/expsum.hpp"
#include "wavenum/wavefield.hpp"

namespace wavenum::lang {

// Half-open byte range into the input text.
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& message, SourceSpan span, std::vector<std::string> expected);
  SourceSpan span;
  std::vector<std::string> expected;
};

struct SchemaError : std::runtime_error {
  SchemaError(const std::string& message, std::string path);
  // JSON pointer-ish location of the offending value, e.g. "terms[2].r".
  std::string path;
};

// Grammar (ASCII, whitespace insignificant between tokens):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := 'w' '(' num ',' num ')'
//           | 'inv' '(' expr ')'
//           | 'const' '(' num ',' num ')'
//           | '(' expr ')'
//   num    := '-'? (integer | integer '/' positive-integer | decimal)
// Integer and p/q literals stay exact rationals; decimals are floats.
// Generator parameters are in turns. '-' desugars to adding a w(0,1/2)
// multiple; '/' to multiplying by inv.
wave::WaveExpr parse_wave(std::string_view text);

// Canonical text: minimal parentheses, no spaces, floats printed shortest
// round-trip with a forced '.' or exponent so they stay distinguishable from
// exact integer literals. parse_wave(print_wave(e)) is structurally equal
// to e.
std::string print_wave(const wave::WaveExpr& e);

// {"terms":[{"r": number >= 0, "theta": radians} ...]}; a term may carry
// {"coeff":{"re":..,"im":..}} instead of "r", folded in via normalize_term.
// Order is preserved.
std::vector<expsum::ExpTerm> parse_terms(std::string_view json_text);

}  // namespace wavenum::lang
