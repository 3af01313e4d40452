#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "wavenum/expsum.hpp"
#include "wavenum/rng.hpp"

using namespace wavenum::expsum;
using std::numbers::pi;

namespace {

double dist(Complex a, Complex b) { return std::abs(a - b); }

std::vector<ExpTerm> draw_positive_terms(wavenum::SplitMix64& rng, std::size_t n) {
  std::vector<ExpTerm> terms(n);
  for (auto& t : terms) {
    t.r = rng.log_uniform(1e-3, 1e3);
    t.theta = rng.uniform(-pi, pi);
  }
  return terms;
}

}  // namespace

TEST_CASE("normalize_term folds coefficient phase into the angle") {
  NormalizedTerm n = normalize_term(Complex{1.0, 1.0}, 0.0);
  CHECK(n.r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(n.phase_shift == doctest::Approx(pi / 4).epsilon(1e-15));
  CHECK_FALSE(n.zero_amplitude);

  NormalizedTerm z = normalize_term(Complex{0.0, 0.0}, 1.0);
  CHECK(z.zero_amplitude);
  CHECK(z.r == 0.0);

  // Pure negative real: phase shift pi.
  NormalizedTerm m = normalize_term(Complex{-2.0, 0.0}, 0.5);
  CHECK(m.r == doctest::Approx(2.0));
  CHECK(m.phase_shift == doctest::Approx(pi));
  CHECK(m.theta == doctest::Approx(0.5));
}

TEST_CASE("sum_direct on hand values") {
  std::vector<ExpTerm> terms{{1.0, 0.0}, {1.0, pi / 2}};
  Complex s = sum_direct(terms);
  CHECK(dist(s, Complex{1.0, 1.0}) <= 1e-15);
  CHECK(sum_direct({}) == Complex{0.0, 0.0});
}

TEST_CASE("two_term_sum matches direct evaluation") {
  wavenum::SplitMix64 rng(101);
  for (int t = 0; t < 1000; ++t) {
    double t1 = rng.uniform(-10 * pi, 10 * pi);
    double t2 = rng.uniform(-10 * pi, 10 * pi);
    CanonicalForm c = two_term_sum(t1, t2);
    Complex direct = std::polar(1.0, t1) + std::polar(1.0, t2);
    CHECK(dist(reconstruct(c), direct) <= 1e-13);
  }
  // Equal angles: amplitude collapses to 2 on the shared phase.
  CanonicalForm eq = two_term_sum(0.3, 0.3);
  CHECK(dist(reconstruct(eq), 2.0 * std::polar(1.0, 0.3)) <= 1e-15);
}

TEST_CASE("worked two-term example shared by props 1-3") {
  // r = (1, 1), theta = (0, pi/2): S = 1 + i, phi = pi/2, A = S*e^{-i*phi} = 1 - i.
  std::vector<ExpTerm> terms{{1.0, 0.0}, {1.0, pi / 2}};

  CanonicalForm c2 = canon_prop2(terms);
  CHECK(c2.phi == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(dist(c2.A, Complex{1.0, -1.0}) <= 1e-14);
  CHECK(dist(reconstruct(c2), Complex{1.0, 1.0}) <= 1e-14);

  CanonicalForm c1 = canon_prop1(terms);
  CanonicalForm c3 = canon_prop3(terms);
  CHECK(c1.phi == doctest::Approx(c2.phi));
  CHECK(c3.phi == doctest::Approx(c2.phi));
  CHECK(dist(c1.A, c2.A) <= 1e-13);
  CHECK(dist(c3.A, c2.A) <= 1e-13);
}

TEST_CASE("prop4 sigma form on the worked example") {
  std::vector<ExpTerm> terms{{1.0, 0.0}, {1.0, pi / 2}};
  SigmaForm s = canon_prop4(terms);
  CHECK(s.sigma == doctest::Approx(pi / 4).epsilon(1e-15));
  CHECK(dist(s.A, Complex{std::sqrt(2.0), 0.0}) <= 1e-14);
  CHECK(dist(reconstruct(s), Complex{1.0, 1.0}) <= 1e-14);
}

TEST_CASE("single-term inputs") {
  std::vector<ExpTerm> one{{2.0, pi}};
  CanonicalForm c = canon_prop1(one);
  CHECK(c.phi == doctest::Approx(pi));
  CHECK(dist(c.A, Complex{2.0, 0.0}) <= 1e-15);
  CHECK(dist(reconstruct(c), std::polar(2.0, pi)) <= 1e-15);

  SigmaForm s = canon_prop4(one);
  CHECK(s.sigma == doctest::Approx(pi));
  CHECK(dist(s.A, Complex{2.0, 0.0}) <= 1e-15);
}

TEST_CASE("prop2 accepts zero amplitudes and keeps their angles in phi") {
  std::vector<ExpTerm> terms{{0.0, 0.7}, {3.0, 0.2}};
  CanonicalForm c = canon_prop2(terms);
  CHECK(c.phi == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(dist(reconstruct(c), std::polar(3.0, 0.2)) <= 1e-14);
}

TEST_CASE("log-based props require strictly positive amplitudes") {
  std::vector<ExpTerm> terms{{0.0, 0.7}, {3.0, 0.2}};
  CHECK_THROWS_WITH_AS(static_cast<void>(canon_prop1(terms)),
                       doctest::Contains("r > 0"), ZeroAmplitude);
  CHECK_THROWS_WITH_AS(static_cast<void>(canon_prop3(terms)),
                       doctest::Contains("r > 0"), ZeroAmplitude);
}

TEST_CASE("prop4 skips zero-amplitude terms entirely") {
  std::vector<ExpTerm> terms{{0.0, 0.7}, {3.0, 0.2}};
  SigmaForm s = canon_prop4(terms);
  // The skipped term contributes neither amplitude nor sigma weight.
  CHECK(s.sigma == doctest::Approx(0.2));
  CHECK(dist(s.A, Complex{3.0, 0.0}) <= 1e-15);

  std::vector<ExpTerm> zeros{{0.0, 0.1}, {0.0, 0.2}};
  CHECK_THROWS_AS(static_cast<void>(canon_prop4(zeros)), ZeroAmplitude);
}

TEST_CASE("empty input") {
  CHECK(reconstruct(canon_prop1({})) == Complex{0.0, 0.0});
  CHECK(reconstruct(canon_prop2({})) == Complex{0.0, 0.0});
  CHECK(reconstruct(canon_prop3({})) == Complex{0.0, 0.0});
  CHECK_THROWS_AS(static_cast<void>(canon_prop4({})), ZeroAmplitude);
}

TEST_CASE("sigma_to_canonical rebases the phase on the worked example") {
  std::vector<ExpTerm> terms{{1.0, 0.0}, {1.0, pi / 2}};
  SigmaForm s = canon_prop4(terms);
  CanonicalForm c = sigma_to_canonical(s, pi / 2);
  CHECK(c.phi == doctest::Approx(pi / 2));
  CHECK(dist(reconstruct(c), reconstruct(s)) <= 1e-14);
}

TEST_CASE("cyclic product identity on a simple pair") {
  std::vector<ExpTerm> terms{{1.0, 0.0}, {1.0, pi / 2}};
  CyclicReport rep = cyclic_product_check(terms);
  CHECK(rep.n == 2);
  // S = 1+i, rotations give the same multiset sum, so product = S^2 = 2i.
  CHECK(dist(rep.product, Complex{0.0, 2.0}) <= 1e-14);
  CHECK(rep.power_rel_err <= 1e-12);
  CHECK(rep.root_rel_err <= 1e-12);
  CHECK(rep.root_index < rep.n);
  // The root-of-unity factor must actually map the principal root onto S.
  Complex omega = std::polar(1.0, 2 * pi * static_cast<double>(rep.root_index) /
                                      static_cast<double>(rep.n));
  CHECK(dist(rep.principal_root * omega, rep.direct_sum) <= 1e-12);
}

TEST_CASE("cyclic_shift rotates and bounds-checks") {
  std::vector<ExpTerm> terms{{1.0, 0.1}, {2.0, 0.2}, {3.0, 0.3}};
  auto shifted = cyclic_shift(terms, 1);
  CHECK(shifted[0].r == 2.0);
  CHECK(shifted[1].r == 3.0);
  CHECK(shifted[2].r == 1.0);
  auto same = cyclic_shift(terms, 0);
  CHECK(same[0].r == 1.0);
  CHECK_THROWS_AS(static_cast<void>(cyclic_shift(terms, 3)), IndexOutOfRange);
}

TEST_CASE("cyclic product refuses a fully cancelling sum") {
  std::vector<ExpTerm> terms{{1.0, 0.0}, {1.0, pi}};
  CHECK_THROWS_AS(static_cast<void>(cyclic_product_check(terms)), NearCancellation);
}

TEST_CASE("branch shifts cancel in the step formulas") {
  wavenum::SplitMix64 rng(2024);
  for (int t = 0; t < 200; ++t) {
    Complex a_prev = std::polar(rng.log_uniform(1e-2, 1e2), rng.uniform(-pi, pi));
    double r_n = rng.log_uniform(1e-2, 1e2);
    double theta_sum = rng.uniform(-3 * pi, 3 * pi);
    double theta_n = rng.uniform(-pi, pi);
    double sigma_prev = rng.uniform(-pi, pi);

    Complex base3 = detail::prop3_step(a_prev, r_n, theta_sum, theta_n, 0);
    Complex base4 = detail::prop4_step(a_prev, sigma_prev, r_n, theta_n, 0);
    for (int k : {-2, -1, 1, 2}) {
      Complex s3 = detail::prop3_step(a_prev, r_n, theta_sum, theta_n, k);
      Complex s4 = detail::prop4_step(a_prev, sigma_prev, r_n, theta_n, k);
      CHECK(dist(s3, base3) <= 1e-12 * (std::abs(base3) + 1.0));
      CHECK(dist(s4, base4) <= 1e-12 * (std::abs(base4) + 1.0));
    }
  }
}

TEST_CASE("all four canonicalizers track the direct sum on random inputs") {
  wavenum::SplitMix64 rng(7);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 1 + rng.below(12);
    auto terms = draw_positive_terms(rng, n);
    double sum_r = 0.0;
    for (const auto& tm : terms) sum_r += tm.r;
    Complex direct = sum_direct(terms);

    CHECK(dist(reconstruct(canon_prop1(terms)), direct) <= 1e-10 * sum_r);
    CHECK(dist(reconstruct(canon_prop2(terms)), direct) <= 1e-10 * sum_r);
    CHECK(dist(reconstruct(canon_prop3(terms)), direct) <= 1e-10 * sum_r);
    CHECK(dist(reconstruct(canon_prop4(terms)), direct) <= 1e-10 * sum_r);
  }
}

TEST_CASE("props 1-3 agree on the amplitude itself, not just the product") {
  wavenum::SplitMix64 rng(8);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 1 + rng.below(10);
    auto terms = draw_positive_terms(rng, n);
    double sum_r = 0.0;
    for (const auto& tm : terms) sum_r += tm.r;
    CanonicalForm c1 = canon_prop1(terms);
    CanonicalForm c2 = canon_prop2(terms);
    CanonicalForm c3 = canon_prop3(terms);
    CHECK(dist(c1.A, c2.A) <= 1e-10 * sum_r);
    CHECK(dist(c3.A, c2.A) <= 1e-10 * sum_r);
  }
}
