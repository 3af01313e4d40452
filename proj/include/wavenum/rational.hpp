#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wavenum::exact {

struct DivisionByZero : std::domain_error {
  DivisionByZero() : std::domain_error("rational: division by zero") {}
};

struct OverflowError : std::overflow_error {
  explicit OverflowError(const char* what) : std::overflow_error(what) {}
};

struct NonPositive : std::domain_error {
  NonPositive() : std::domain_error("rational: argument must be positive") {}
};

// Exact p/q with int64 components. Invariants: den > 0, gcd(|num|, den) = 1,
// zero is 0/1. Overflow raises OverflowError instead of wrapping.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  friend bool operator==(const Rational&, const Rational&) = default;
};

Rational make_rational(std::int64_t num, std::int64_t den);

inline Rational rational_from_int(std::int64_t n) { return Rational{n, 1}; }

Rational rat_add(const Rational& a, const Rational& b);
Rational rat_sub(const Rational& a, const Rational& b);
Rational rat_mul(const Rational& a, const Rational& b);
Rational rat_neg(const Rational& a);
Rational rat_inv(const Rational& a);  // DivisionByZero on 0
Rational rat_abs(const Rational& a);

// Smallest positive rational that is an integer multiple of both arguments.
// For reduced p1/q1, p2/q2 this is lcm(p1,p2)/gcd(q1,q2). Both must be > 0.
Rational rat_lcm(const Rational& a, const Rational& b);

inline bool rat_is_zero(const Rational& a) { return a.num == 0; }
inline bool rat_is_positive(const Rational& a) { return a.num > 0; }

double to_double(const Rational& a);

// "p/q", or just "p" when the denominator is 1.
std::string to_string(const Rational& a);

bool rat_less(const Rational& a, const Rational& b);

}  // namespace wavenum::exact
