#include "wavenum/lang.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include <json.hpp>

#include "wavenum/rational.hpp"

namespace wavenum::lang {

ParseError::ParseError(const std::string& message, SourceSpan span_,
                       std::vector<std::string> expected_)
    : std::runtime_error(message), span(span_), expected(std::move(expected_)) {}

SchemaError::SchemaError(const std::string& message, std::string path_)
    : std::runtime_error(path_ + ": " + message), path(std::move(path_)) {}

namespace {

enum class Tok { LParen, RParen, Comma, Plus, Minus, Star, Slash, KwW, KwInv, KwConst, Number, End };

struct Token {
  Tok kind = Tok::End;
  SourceSpan span;
  double value = 0.0;                      // Number
  std::optional<exact::Rational> exact;    // Number with a rational literal
};

Token tok(Tok kind, std::size_t start, std::size_t end) {
  Token t;
  t.kind = kind;
  t.span = {start, end};
  return t;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return c >= 'a' && c <= 'z'; }

[[noreturn]] void lex_fail(const std::string& message, std::size_t start, std::size_t end,
                           std::vector<std::string> expected) {
  throw ParseError(message, SourceSpan{start, end}, std::move(expected));
}

std::int64_t parse_int(std::string_view text, std::size_t start, std::size_t end) {
  std::int64_t out = 0;
  auto res = std::from_chars(text.data() + start, text.data() + end, out);
  if (res.ec != std::errc{} || res.ptr != text.data() + end)
    lex_fail("integer literal out of range", start, end, {"number"});
  return out;
}

Token lex_number(std::string_view text, std::size_t& i) {
  std::size_t start = i;
  if (text[i] == '-') ++i;
  while (i < text.size() && is_digit(text[i])) ++i;
  std::size_t int_end = i;

  if (i + 1 < text.size() && text[i] == '/' && is_digit(text[i + 1])) {
    ++i;
    std::size_t den_start = i;
    while (i < text.size() && is_digit(text[i])) ++i;
    std::int64_t num = parse_int(text, start, int_end);
    std::int64_t den = parse_int(text, den_start, i);
    if (den == 0)
      lex_fail("denominator must be a positive integer", start, i, {"number"});
    Token t = tok(Tok::Number, start, i);
    t.exact = exact::make_rational(num, den);
    t.value = exact::to_double(*t.exact);
    return t;
  }

  bool is_float = false;
  if (i < text.size() && text[i] == '.') {
    is_float = true;
    ++i;
    if (i >= text.size() || !is_digit(text[i]))
      lex_fail("digit expected after decimal point", start, i, {"number"});
    while (i < text.size() && is_digit(text[i])) ++i;
  }
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    is_float = true;
    ++i;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
    if (i >= text.size() || !is_digit(text[i]))
      lex_fail("digit expected in exponent", start, i, {"number"});
    while (i < text.size() && is_digit(text[i])) ++i;
  }

  Token t = tok(Tok::Number, start, i);
  if (is_float) {
    auto res = std::from_chars(text.data() + start, text.data() + i, t.value);
    if (res.ec != std::errc{} || res.ptr != text.data() + i)
      lex_fail("number out of range", start, i, {"number"});
  } else {
    t.exact = exact::rational_from_int(parse_int(text, start, i));
    t.value = exact::to_double(*t.exact);
  }
  return t;
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    switch (c) {
      case '(':
        out.push_back(tok(Tok::LParen, i, i + 1));
        ++i;
        continue;
      case ')':
        out.push_back(tok(Tok::RParen, i, i + 1));
        ++i;
        continue;
      case ',':
        out.push_back(tok(Tok::Comma, i, i + 1));
        ++i;
        continue;
      case '+':
        out.push_back(tok(Tok::Plus, i, i + 1));
        ++i;
        continue;
      case '*':
        out.push_back(tok(Tok::Star, i, i + 1));
        ++i;
        continue;
      case '/':
        out.push_back(tok(Tok::Slash, i, i + 1));
        ++i;
        continue;
      case '-':
        if (i + 1 < text.size() && is_digit(text[i + 1])) {
          out.push_back(lex_number(text, i));
        } else {
          out.push_back(tok(Tok::Minus, i, i + 1));
          ++i;
        }
        continue;
      default:
        break;
    }
    if (is_digit(c)) {
      out.push_back(lex_number(text, i));
      continue;
    }
    if (is_alpha(c)) {
      std::size_t start = i;
      while (i < text.size() && is_alpha(text[i])) ++i;
      std::string_view word = text.substr(start, i - start);
      Tok kind;
      if (word == "w")
        kind = Tok::KwW;
      else if (word == "inv")
        kind = Tok::KwInv;
      else if (word == "const")
        kind = Tok::KwConst;
      else
        lex_fail("unknown name '" + std::string(word) + "'", start, i,
                 {"'w'", "'inv'", "'const'"});
      out.push_back(tok(kind, start, i));
      continue;
    }
    lex_fail("unexpected character '" + std::string(1, c) + "'", i, i + 1, {"valid token"});
  }
  out.push_back(tok(Tok::End, text.size(), text.size()));
  return out;
}

const char* token_name(Tok t) {
  switch (t) {
    case Tok::LParen:
      return "'('";
    case Tok::RParen:
      return "')'";
    case Tok::Comma:
      return "','";
    case Tok::Plus:
      return "'+'";
    case Tok::Minus:
      return "'-'";
    case Tok::Star:
      return "'*'";
    case Tok::Slash:
      return "'/'";
    case Tok::KwW:
      return "'w'";
    case Tok::KwInv:
      return "'inv'";
    case Tok::KwConst:
      return "'const'";
    case Tok::Number:
      return "number";
    case Tok::End:
      return "end of input";
  }
  return "?";
}

class Parser {
 public:
  explicit Parser(std::span<const Token> tokens) : toks_(tokens) {}

  wave::WaveExpr run() {
    wave::WaveExpr e = parse_expr();
    if (peek().kind != Tok::End)
      fail(peek(), "unexpected trailing input", {"'+'", "'-'", "'*'", "'/'", "end of input"});
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }

  [[noreturn]] void fail(const Token& at, const std::string& message,
                         std::vector<std::string> expected) {
    throw ParseError(message, at.span, std::move(expected));
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind)
      fail(peek(), std::string("expected ") + token_name(kind), {token_name(kind)});
    return advance();
  }

  wave::WaveExpr parse_expr() {
    wave::WaveExpr e = parse_term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      bool minus = advance().kind == Tok::Minus;
      wave::WaveExpr rhs = parse_term();
      e = wave::add(e, minus ? wave::neg(rhs) : rhs);
    }
    return e;
  }

  wave::WaveExpr parse_term() {
    wave::WaveExpr e = parse_factor();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      bool slash = advance().kind == Tok::Slash;
      wave::WaveExpr rhs = parse_factor();
      e = slash ? wave::div(e, rhs) : wave::mul(e, rhs);
    }
    return e;
  }

  Token parse_num() {
    if (peek().kind != Tok::Number) fail(peek(), "expected number", {"number"});
    return advance();
  }

  static wave::GenArg as_gen_arg(const Token& t) {
    if (t.exact) return *t.exact;
    return t.value;
  }

  wave::WaveExpr parse_factor() {
    switch (peek().kind) {
      case Tok::KwW: {
        advance();
        expect(Tok::LParen);
        Token f = parse_num();
        expect(Tok::Comma);
        Token theta = parse_num();
        expect(Tok::RParen);
        return wave::gen(as_gen_arg(f), as_gen_arg(theta));
      }
      case Tok::KwInv: {
        advance();
        expect(Tok::LParen);
        wave::WaveExpr e = parse_expr();
        expect(Tok::RParen);
        return wave::inv(e);
      }
      case Tok::KwConst: {
        advance();
        expect(Tok::LParen);
        Token re = parse_num();
        expect(Tok::Comma);
        Token im = parse_num();
        expect(Tok::RParen);
        return wave::constant(std::complex<double>{re.value, im.value});
      }
      case Tok::LParen: {
        advance();
        wave::WaveExpr e = parse_expr();
        expect(Tok::RParen);
        return e;
      }
      default:
        fail(peek(), "expected factor", {"factor"});
    }
  }

  std::span<const Token> toks_;
  std::size_t pos_ = 0;
};

void print_num(std::string& out, double v, const std::optional<exact::Rational>& tag) {
  if (tag) {
    out += exact::to_string(*tag);
    return;
  }
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string_view s(buf, static_cast<std::size_t>(res.ptr - buf));
  out.append(s);
  // Keep floats visibly floats so reparsing does not promote them to exact
  // rationals.
  if (s.find('.') == std::string_view::npos && s.find('e') == std::string_view::npos)
    out += ".0";
}

bool child_needs_parens(wave::NodeKind child, wave::NodeKind parent, bool right_side) {
  using wave::NodeKind;
  if (child == NodeKind::Add) return parent == NodeKind::Mul || (parent == NodeKind::Add && right_side);
  if (child == NodeKind::Mul) return parent == NodeKind::Mul && right_side;
  return false;
}

void print_node(const wave::Node& n, std::string& out);

void print_child(const wave::Node& child, wave::NodeKind parent, bool right_side,
                 std::string& out) {
  bool parens = child_needs_parens(child.kind, parent, right_side);
  if (parens) out += '(';
  print_node(child, out);
  if (parens) out += ')';
}

void print_node(const wave::Node& n, std::string& out) {
  switch (n.kind) {
    case wave::NodeKind::Gen:
      out += "w(";
      print_num(out, n.f, n.f_exact);
      out += ',';
      print_num(out, n.theta, n.theta_exact);
      out += ')';
      return;
    case wave::NodeKind::Const:
      out += "const(";
      print_num(out, n.c.real(), std::nullopt);
      out += ',';
      print_num(out, n.c.imag(), std::nullopt);
      out += ')';
      return;
    case wave::NodeKind::Inv:
      out += "inv(";
      print_node(*n.lhs, out);
      out += ')';
      return;
    case wave::NodeKind::Mul:
      print_child(*n.lhs, n.kind, false, out);
      out += '*';
      print_child(*n.rhs, n.kind, true, out);
      return;
    case wave::NodeKind::Add:
      print_child(*n.lhs, n.kind, false, out);
      out += '+';
      print_child(*n.rhs, n.kind, true, out);
      return;
  }
}

}  // namespace

wave::WaveExpr parse_wave(std::string_view text) {
  std::vector<Token> tokens = lex(text);
  return Parser(tokens).run();
}

std::string print_wave(const wave::WaveExpr& e) {
  std::string out;
  print_node(e.node(), out);
  return out;
}

namespace {

using nlohmann::json;

double require_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError("must be a number", path);
  return v.get<double>();
}

expsum::ExpTerm parse_one_term(const json& t, const std::string& base) {
  if (!t.is_object()) throw SchemaError("term must be an object", base);
  for (const auto& item : t.items()) {
    if (item.key() != "r" && item.key() != "coeff" && item.key() != "theta")
      throw SchemaError("unknown key", base + "." + item.key());
  }
  if (!t.contains("theta")) throw SchemaError("missing \"theta\"", base + ".theta");
  double theta = require_number(t["theta"], base + ".theta");

  bool has_r = t.contains("r");
  bool has_coeff = t.contains("coeff");
  if (has_r && has_coeff)
    throw SchemaError("term has both \"r\" and \"coeff\"", base);
  if (!has_r && !has_coeff)
    throw SchemaError("term needs \"r\" or \"coeff\"", base);

  if (has_r) {
    double r = require_number(t["r"], base + ".r");
    if (r < 0.0)
      throw SchemaError("amplitude must be nonnegative; use \"coeff\" for signed coefficients",
                        base + ".r");
    return {r, theta};
  }

  const json& c = t["coeff"];
  if (!c.is_object()) throw SchemaError("must be an object", base + ".coeff");
  for (const auto& item : c.items()) {
    if (item.key() != "re" && item.key() != "im")
      throw SchemaError("unknown key", base + ".coeff." + item.key());
  }
  if (!c.contains("re")) throw SchemaError("missing \"re\"", base + ".coeff.re");
  if (!c.contains("im")) throw SchemaError("missing \"im\"", base + ".coeff.im");
  double re = require_number(c["re"], base + ".coeff.re");
  double im = require_number(c["im"], base + ".coeff.im");
  expsum::NormalizedTerm n = expsum::normalize_term({re, im}, theta);
  return {n.r, n.theta + n.phase_shift};
}

}  // namespace

std::vector<expsum::ExpTerm> parse_terms(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& ex) {
    throw SchemaError(std::string("invalid JSON: ") + ex.what(), "$");
  }
  if (!doc.is_object()) throw SchemaError("top level must be an object", "$");
  for (const auto& item : doc.items()) {
    if (item.key() != "terms") throw SchemaError("unknown key", item.key());
  }
  if (!doc.contains("terms")) throw SchemaError("missing \"terms\"", "terms");
  const json& terms = doc["terms"];
  if (!terms.is_array()) throw SchemaError("must be an array", "terms");

  std::vector<expsum::ExpTerm> out;
  out.reserve(terms.size());
  for (std::size_t k = 0; k < terms.size(); ++k)
    out.push_back(parse_one_term(terms[k], "terms[" + std::to_string(k) + "]"));
  return out;
}

}  // namespace wavenum::lang
