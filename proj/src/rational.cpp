#include "wavenum/rational.hpp"

#include <cstdlib>
#include <limits>

namespace wavenum::exact {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw OverflowError("rational: addition overflow");
  return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw OverflowError("rational: multiplication overflow");
  return out;
}

std::int64_t checked_neg(std::int64_t a) {
  if (a == std::numeric_limits<std::int64_t>::min()) throw OverflowError("rational: negation overflow");
  return -a;
}

}  // namespace

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DivisionByZero();
  if (den < 0) {
    num = checked_neg(num);
    den = checked_neg(den);
  }
  if (num == 0) return Rational{0, 1};
  const std::int64_t g = std::gcd(num < 0 ? checked_neg(num) : num, den);
  return Rational{num / g, den / g};
}

Rational rat_add(const Rational& a, const Rational& b) {
  return make_rational(checked_add(checked_mul(a.num, b.den), checked_mul(b.num, a.den)),
                       checked_mul(a.den, b.den));
}

Rational rat_sub(const Rational& a, const Rational& b) { return rat_add(a, rat_neg(b)); }

Rational rat_mul(const Rational& a, const Rational& b) {
  return make_rational(checked_mul(a.num, b.num), checked_mul(a.den, b.den));
}

Rational rat_neg(const Rational& a) { return Rational{checked_neg(a.num), a.den}; }

Rational rat_inv(const Rational& a) {
  if (a.num == 0) throw DivisionByZero();
  return make_rational(a.den, a.num);
}

Rational rat_abs(const Rational& a) {
  return a.num < 0 ? Rational{checked_neg(a.num), a.den} : a;
}

Rational rat_lcm(const Rational& a, const Rational& b) {
  if (!rat_is_positive(a) || !rat_is_positive(b)) throw NonPositive();
  const std::int64_t pg = std::gcd(a.num, b.num);
  const std::int64_t num = checked_mul(a.num / pg, b.num);  // lcm of numerators
  const std::int64_t den = std::gcd(a.den, b.den);
  return make_rational(num, den);
}

double to_double(const Rational& a) {
  return static_cast<double>(a.num) / static_cast<double>(a.den);
}

std::string to_string(const Rational& a) {
  if (a.den == 1) return std::to_string(a.num);
  return std::to_string(a.num) + "/" + std::to_string(a.den);
}

bool rat_less(const Rational& a, const Rational& b) {
  // den > 0 on both sides, so cross-multiplication keeps the order.
  return checked_mul(a.num, b.den) < checked_mul(b.num, a.den);
}

}  // namespace wavenum::exact
