#include "wavenum/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wavenum/kahan.hpp"

namespace wavenum::expsum {

namespace {

constexpr Complex kImag{0.0, 1.0};

void validate(std::span<const ExpTerm> terms) {
  for (const ExpTerm& t : terms) {
    if (!std::isfinite(t.r) || !std::isfinite(t.theta))
      throw std::invalid_argument("expsum: term fields must be finite");
    if (t.r < 0.0) throw std::invalid_argument("expsum: amplitude must be nonnegative");
  }
}

void require_positive(std::span<const ExpTerm> terms, const char* who) {
  for (const ExpTerm& t : terms)
    if (t.r == 0.0) throw ZeroAmplitude(who);
}

}  // namespace

NormalizedTerm normalize_term(Complex c, double theta) {
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag()) || !std::isfinite(theta))
    throw std::invalid_argument("normalize_term: inputs must be finite");
  if (c == Complex{0.0, 0.0}) return NormalizedTerm{0.0, theta, 0.0, true};
  return NormalizedTerm{std::abs(c), theta, std::arg(c), false};
}

Complex sum_direct(std::span<const ExpTerm> terms) {
  validate(terms);
  Complex acc{0.0, 0.0};
  for (const ExpTerm& t : terms) acc += value(t);
  return acc;
}

CanonicalForm two_term_sum(double theta1, double theta2) {
  const double half_diff = (theta1 - theta2) / 2.0;
  const double half_sum = (theta1 + theta2) / 2.0;
  return CanonicalForm{Complex{2.0 * std::cos(half_diff), 0.0}, half_sum};
}

CanonicalForm canon_prop1(std::span<const ExpTerm> terms) {
  validate(terms);
  require_positive(terms, "canon_prop1 requires strictly positive amplitudes (r > 0)");
  const std::size_t n = terms.size();

  KahanSum phi;
  double amp_product = 1.0;
  for (const ExpTerm& t : terms) {
    phi += t.theta;
    amp_product *= t.r;
  }

  Complex inner{0.0, 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    // sum over k != j of (-i ln r_k + theta_k)
    Complex exponent{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      exponent += Complex{terms[k].theta, -std::log(terms[k].r)};
    }
    inner += std::exp(-kImag * exponent);
  }
  return CanonicalForm{amp_product * inner, phi.value()};
}

CanonicalForm canon_prop2(std::span<const ExpTerm> terms) {
  validate(terms);
  Complex a{0.0, 0.0};
  KahanSum theta_before;  // sum_{j<n} theta_j
  for (const ExpTerm& t : terms) {
    a = a * std::polar(1.0, -t.theta) + t.r * std::polar(1.0, -theta_before.value());
    theta_before += t.theta;
  }
  return CanonicalForm{a, theta_before.value()};
}

namespace detail {

Complex prop3_step(Complex a_prev, double r_n, double theta_sum_incl, double theta_n,
                   int branch_k) {
  const Complex log_a = std::log(a_prev) + Complex{0.0, 2.0 * std::numbers::pi * branch_k};
  const double log_r = std::log(r_n);
  const Complex root = std::exp((log_a + log_r) / 2.0);
  const Complex cos_arg =
      (-kImag * (log_a - log_r) + (theta_sum_incl - 2.0 * theta_n)) / 2.0;
  return 2.0 * root * std::cos(cos_arg) * std::polar(1.0, -theta_sum_incl / 2.0);
}

Complex prop4_step(Complex a_prev, double sigma_prev, double r_n, double theta_n,
                   int branch_k) {
  const Complex log_a = std::log(a_prev) + Complex{0.0, 2.0 * std::numbers::pi * branch_k};
  const double log_r = std::log(r_n);
  const Complex root = std::exp((log_a + log_r) / 2.0);
  const Complex cos_arg = -kImag * (log_a - log_r) / 2.0 + (sigma_prev - theta_n) / 2.0;
  return root * 2.0 * std::cos(cos_arg);
}

}  // namespace detail

CanonicalForm canon_prop3(std::span<const ExpTerm> terms) {
  validate(terms);
  require_positive(terms, "canon_prop3 requires strictly positive amplitudes (r > 0)");
  if (terms.empty()) return CanonicalForm{Complex{0.0, 0.0}, 0.0};

  Complex a{terms[0].r, 0.0};
  KahanSum theta_before(terms[0].theta);  // sum_{j<=current} theta_j
  double r_sum = terms[0].r;
  for (std::size_t i = 1; i < terms.size(); ++i) {
    const ExpTerm& t = terms[i];
    const double theta_incl = theta_before.value() + t.theta;
    if (std::abs(a) < kCancellationEps * r_sum) {
      // log of a near-cancelled amplitude is singular; take the log-free step
      a = a * std::polar(1.0, -t.theta) + t.r * std::polar(1.0, -theta_before.value());
    } else {
      a = detail::prop3_step(a, t.r, theta_incl, t.theta);
    }
    theta_before += t.theta;
    r_sum += t.r;
  }
  return CanonicalForm{a, theta_before.value()};
}

SigmaForm canon_prop4(std::span<const ExpTerm> terms) {
  validate(terms);
  Complex a{0.0, 0.0};
  double sigma = 0.0;
  double r_sum = 0.0;
  bool started = false;
  for (const ExpTerm& t : terms) {
    if (t.r == 0.0) continue;  // value-neutral
    if (!started) {
      a = Complex{t.r, 0.0};
      sigma = t.theta;
      r_sum = t.r;
      started = true;
      continue;
    }
    const double sigma_next = (sigma + t.theta) / 2.0;
    if (std::abs(a) < kCancellationEps * r_sum) {
      a = (a * std::polar(1.0, sigma) + t.r * std::polar(1.0, t.theta)) *
          std::polar(1.0, -sigma_next);
    } else {
      a = detail::prop4_step(a, sigma, t.r, t.theta);
    }
    sigma = sigma_next;
    r_sum += t.r;
  }
  if (!started) throw ZeroAmplitude("canon_prop4 requires at least one term with r > 0");
  return SigmaForm{a, sigma};
}

CanonicalForm sigma_to_canonical(const SigmaForm& s, double sum_theta) {
  return CanonicalForm{s.A * std::polar(1.0, s.sigma - sum_theta), sum_theta};
}

std::vector<ExpTerm> cyclic_shift(std::span<const ExpTerm> terms, std::size_t k) {
  if (k >= terms.size())
    throw IndexOutOfRange("cyclic_shift: k must satisfy 0 <= k < terms.size()");
  std::vector<ExpTerm> out(terms.begin(), terms.end());
  std::rotate(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), out.end());
  return out;
}

CyclicReport cyclic_product_check(std::span<const ExpTerm> terms) {
  validate(terms);
  const std::size_t n = terms.size();
  const Complex s = n == 0 ? Complex{0.0, 0.0} : sum_direct(terms);
  double r_sum = 0.0;
  for (const ExpTerm& t : terms) r_sum += t.r;
  if (n == 0 || std::abs(s) <= kNearCancellationEps * r_sum)
    throw NearCancellation("cyclic_product_check: |S| too small relative to sum(r)");

  CyclicReport report;
  report.n = n;
  report.direct_sum = s;

  Complex product{1.0, 0.0};
  Complex power{1.0, 0.0};
  for (std::size_t k = 0; k < n; ++k) {
    product *= sum_direct(cyclic_shift(terms, k));
    power *= s;
  }
  report.product = product;
  report.expected_power = power;
  report.power_rel_err = std::abs(product - power) / std::abs(power);

  const Complex root = std::exp(std::log(product) / static_cast<double>(n));
  report.principal_root = root;

  const double tau = 2.0 * std::numbers::pi;
  const double delta = std::arg(s) - std::arg(root);
  const auto nd = static_cast<double>(n);
  auto idx = static_cast<long>(std::llround(nd * delta / tau));
  idx %= static_cast<long>(n);
  if (idx < 0) idx += static_cast<long>(n);
  report.root_index = static_cast<std::size_t>(idx);
  const Complex rotated = root * std::polar(1.0, tau * static_cast<double>(idx) / nd);
  report.root_rel_err = std::abs(rotated - s) / std::abs(s);
  return report;
}

}  // namespace wavenum::expsum
