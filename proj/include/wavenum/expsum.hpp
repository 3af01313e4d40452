#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace wavenum::expsum {

using Complex = std::complex<double>;

struct ZeroAmplitude : std::domain_error {
  explicit ZeroAmplitude(const char* what) : std::domain_error(what) {}
};

struct NearCancellation : std::domain_error {
  explicit NearCancellation(const char* what) : std::domain_error(what) {}
};

struct IndexOutOfRange : std::out_of_range {
  explicit IndexOutOfRange(const char* what) : std::out_of_range(what) {}
};

// One summand r*e^{i*theta}. r >= 0, both fields finite.
struct ExpTerm {
  double r = 0.0;
  double theta = 0.0;
};

// S_n factored as A*e^{i*phi} with phi the accumulated phase sum.
struct CanonicalForm {
  Complex A{0.0, 0.0};
  double phi = 0.0;
};

// S_n factored as A*e^{i*sigma} with the binary-weighted phase average
// sigma_n = (sigma_{n-1} + theta_n)/2, sigma_1 = theta_1.
struct SigmaForm {
  Complex A{0.0, 0.0};
  double sigma = 0.0;
};

// Result of folding a complex coefficient's phase into the term:
// c*e^{i*theta} = r*e^{i*(theta + phase_shift)}.
struct NormalizedTerm {
  double r = 0.0;
  double theta = 0.0;
  double phase_shift = 0.0;
  bool zero_amplitude = false;
};

inline Complex value(const ExpTerm& t) { return std::polar(t.r, t.theta); }
inline Complex reconstruct(const CanonicalForm& c) { return c.A * std::polar(1.0, c.phi); }
inline Complex reconstruct(const SigmaForm& s) { return s.A * std::polar(1.0, s.sigma); }

// When the magnitude of a running amplitude falls below this fraction of the
// accumulated term amplitudes, the log-based recursions switch to the
// log-free update for that step.
inline constexpr double kCancellationEps = 1e-12;

// Fraction of sum(r) below which the cyclic-product identity is considered
// too ill-conditioned to check.
inline constexpr double kNearCancellationEps = 1e-6;

NormalizedTerm normalize_term(Complex c, double theta);

// Left-to-right accumulation of r_k*e^{i*theta_k}; the oracle every
// canonicalizer is checked against.
Complex sum_direct(std::span<const ExpTerm> terms);

// e^{i*t1} + e^{i*t2} = 2*cos((t1-t2)/2)*e^{i*(t1+t2)/2}.
CanonicalForm two_term_sum(double theta1, double theta2);

// A = (prod_j r_j) * sum_j e^{-i*sum_{k!=j}(-i*ln r_k + theta_k)}.
// Requires every r_k > 0. Empty input yields (0, 0).
CanonicalForm canon_prop1(std::span<const ExpTerm> terms);

// Log-free recursion A_n = A_{n-1}*e^{-i*theta_n} + r_n*e^{-i*sum_{j<n}theta_j},
// A_0 = 0. Accepts r_k = 0.
CanonicalForm canon_prop2(std::span<const ExpTerm> terms);

// Nested-cosine recursion
//   A_n = 2*(A_{n-1}*r_n)^{1/2}
//         * cos((-i*ln(A_{n-1}/r_n) + sum_{j<=n}theta_j - 2*theta_n)/2)
//         * e^{-i*(sum_{j<=n}theta_j)/2}
// with the square root and the cosine argument derived from one log value so
// branch choices cancel. Requires every r_k > 0; falls back to the log-free
// update when |A_{n-1}| is below the cancellation threshold.
CanonicalForm canon_prop3(std::span<const ExpTerm> terms);

// Sigma-form recursion: A_1 = r_1,
//   A_n = (A_{n-1}*r_n)^{1/2} * 2*cos(-i*ln(A_{n-1}/r_n)^{1/2} + (sigma_{n-1}-theta_n)/2).
// Zero-amplitude terms are skipped; raises ZeroAmplitude when none remain.
SigmaForm canon_prop4(std::span<const ExpTerm> terms);

// Re-expresses A*e^{i*sigma} as A'*e^{i*sum_theta} with A' = A*e^{i(sigma-sum_theta)}.
CanonicalForm sigma_to_canonical(const SigmaForm& s, double sum_theta);

// Terms rotated left by k (0 <= k < n).
std::vector<ExpTerm> cyclic_shift(std::span<const ExpTerm> terms, std::size_t k);

struct CyclicReport {
  std::size_t n = 0;
  Complex direct_sum{};
  Complex product{};        // prod over k of S(rotate-left-by-k)
  Complex expected_power{}; // direct_sum^n
  double power_rel_err = 0.0;
  Complex principal_root{};
  std::size_t root_index = 0;  // which n-th root of unity maps the root onto S
  double root_rel_err = 0.0;
};

// Checks prod_k S(P^k(terms)) = S^n and locates the n-th root of unity that
// carries the principal root of the product back onto S.
CyclicReport cyclic_product_check(std::span<const ExpTerm> terms);

namespace detail {

// Single recursion steps with an injectable branch shift: the complex log of
// a_prev is taken as Log(a_prev) + 2*pi*i*branch_k and the square root uses
// the same value, so shifting branch_k must leave the output unchanged.
Complex prop3_step(Complex a_prev, double r_n, double theta_sum_incl, double theta_n,
                   int branch_k = 0);
Complex prop4_step(Complex a_prev, double sigma_prev, double r_n, double theta_n,
                   int branch_k = 0);

}  // namespace detail

}  // namespace wavenum::expsum
