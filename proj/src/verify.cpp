#include "wavenum/verify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numbers>
#include <utility>

#include "wavenum/kahan.hpp"
#include "wavenum/lang.hpp"
#include "wavenum/periodicity.hpp"
#include "wavenum/rational.hpp"

namespace wavenum::verify {

namespace {

using expsum::Complex;
using expsum::ExpTerm;
using nlohmann::ordered_json;

constexpr double kPi = std::numbers::pi;

constexpr std::uint64_t kSaltOracle = 1;
constexpr std::uint64_t kSaltCrossform = 2;
constexpr std::uint64_t kSaltPermutation = 3;
constexpr std::uint64_t kSaltCyclic = 4;
constexpr std::uint64_t kSaltField = 5;
constexpr std::uint64_t kSaltConservation = 6;
constexpr std::uint64_t kSaltPeriod = 7;
constexpr std::uint64_t kSaltBranch = 8;

// Samples with an Inv denominator below this magnitude are excluded from
// pointwise checks and counted in the report.
constexpr double kNearPoleMag = 1e-6;

CheckResult make_check(std::string name, double tol) {
  CheckResult c;
  c.name = std::move(name);
  c.tol = tol;
  return c;
}

// err <= tol must hold; max_err tracks the largest error seen.
template <class Builder>
void record_le(CheckResult& c, double err, Builder&& worst) {
  bool ok = err <= c.tol;
  (ok ? c.pass : c.fail)++;
  if (!(err <= c.max_err)) {
    c.max_err = err;
    c.worst_err = err;
    c.worst_input = worst();
  }
}

// value > tol must hold (order-dependence style checks); max_err tracks the
// smallest value seen, i.e. the thinnest margin.
template <class Builder>
void record_gt(CheckResult& c, double value, Builder&& worst) {
  bool ok = value > c.tol;
  (ok ? c.pass : c.fail)++;
  bool first = c.pass + c.fail == 1;
  if (first || !(value >= c.max_err)) {
    c.max_err = value;
    c.worst_err = value;
    c.worst_input = worst();
  }
}

template <class Builder>
void record_bool(CheckResult& c, bool ok, Builder&& worst) {
  (ok ? c.pass : c.fail)++;
  if (!ok) {
    c.max_err = 1.0;
    c.worst_err = 1.0;
    if (c.worst_input.is_null()) c.worst_input = worst();
  }
}

double sum_amplitudes(std::span<const ExpTerm> terms) {
  KahanSum s;
  for (const ExpTerm& t : terms) s += t.r;
  return s.value();
}

double sum_phases(std::span<const ExpTerm> terms) {
  KahanSum s;
  for (const ExpTerm& t : terms) s += t.theta;
  return s.value();
}

std::vector<ExpTerm> permuted(std::span<const ExpTerm> terms, SplitMix64& rng) {
  std::vector<std::size_t> idx(terms.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.below(i)]);
  std::vector<ExpTerm> out(terms.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = terms[idx[i]];
  return out;
}

// The nested-cosine recursion exactly as printed, kept as a regression
// witness: without the factor 2 and with theta_n instead of 2*theta_n in the
// cosine argument it cannot reproduce the direct sum.
Complex printed_prop3_step(Complex a_prev, double r_n, double theta_sum_incl, double theta_n) {
  Complex log_a = std::log(a_prev);
  double log_r = std::log(r_n);
  Complex root = std::exp(0.5 * (log_a + log_r));
  Complex cos_arg = 0.5 * (Complex{0.0, -1.0} * (log_a - Complex{log_r, 0.0}) +
                           Complex{theta_sum_incl - theta_n, 0.0});
  return root * std::cos(cos_arg) * std::polar(1.0, -0.5 * theta_sum_incl);
}

expsum::CanonicalForm canon_printed_prop3(std::span<const ExpTerm> terms) {
  KahanSum theta_sum(terms[0].theta);
  Complex a{terms[0].r, 0.0};
  for (std::size_t n = 1; n < terms.size(); ++n) {
    theta_sum += terms[n].theta;
    a = printed_prop3_step(a, terms[n].r, theta_sum.value(), terms[n].theta);
  }
  return {a, theta_sum.value()};
}

SuiteResult suite_oracle(const VerifyConfig& cfg) {
  SuiteResult out;
  out.suite = "oracle";
  std::uint64_t trials = cfg.trials ? cfg.trials : 10000;
  std::array<CheckResult, 4> checks = {
      make_check("prop1_matches_direct", cfg.tol_scale),
      make_check("prop2_matches_direct", cfg.tol_scale),
      make_check("prop3_matches_direct", cfg.tol_scale),
      make_check("prop4_matches_direct", cfg.tol_scale),
  };
  for (auto& c : checks) c.detail["error_unit"] = "abs_err / sum_r";

  for (std::uint64_t t = 0; t < trials; ++t) {
    SplitMix64 rng = trial_rng(cfg.seed, kSaltOracle, t);
    std::vector<ExpTerm> terms = draw_terms(rng, 1, cfg.n_max, cfg.r_lo, cfg.r_hi);
    Complex direct = expsum::sum_direct(terms);
    double sum_r = sum_amplitudes(terms);
    auto worst = [&] { return terms_json(terms); };

    Complex recon[4] = {
        expsum::reconstruct(expsum::canon_prop1(terms)),
        expsum::reconstruct(expsum::canon_prop2(terms)),
        expsum::reconstruct(expsum::canon_prop3(terms)),
        expsum::reconstruct(expsum::canon_prop4(terms)),
    };
    for (int i = 0; i < 4; ++i)
      record_le(checks[i], std::abs(recon[i] - direct) / sum_r, worst);
  }
  out.trials_run = trials;
  out.checks.assign(checks.begin(), checks.end());
  return out;
}

SuiteResult suite_crossform(const VerifyConfig& cfg) {
  SuiteResult out;
  out.suite = "crossform";
  std::uint64_t trials = cfg.trials ? cfg.trials : 5000;
  CheckResult c12 = make_check("prop1_prop2_agree", cfg.tol_scale);
  CheckResult c23 = make_check("prop2_prop3_agree", cfg.tol_scale);
  CheckResult c13 = make_check("prop1_prop3_agree", cfg.tol_scale);
  CheckResult cprinted = make_check("printed_prop3_diverges", cfg.tol_scale);
  cprinted.detail["comparison"] = "value_must_exceed_tol";
  cprinted.detail["note"] = "uncorrected nested-cosine step must miss the direct sum";

  for (std::uint64_t t = 0; t < trials; ++t) {
    SplitMix64 rng = trial_rng(cfg.seed, kSaltCrossform, t);
    std::vector<ExpTerm> terms = draw_terms(rng, 2, cfg.n_max, cfg.r_lo, cfg.r_hi);
    Complex direct = expsum::sum_direct(terms);
    double sum_r = sum_amplitudes(terms);
    if (std::abs(direct) <= expsum::kNearCancellationEps * sum_r) {
      out.excluded["near_cancellation"]++;
      continue;
    }
    auto worst = [&] { return terms_json(terms); };

    Complex a1 = expsum::canon_prop1(terms).A;
    Complex a2 = expsum::canon_prop2(terms).A;
    Complex a3 = expsum::canon_prop3(terms).A;
    record_le(c12, std::abs(a1 - a2) / sum_r, worst);
    record_le(c23, std::abs(a2 - a3) / sum_r, worst);
    record_le(c13, std::abs(a1 - a3) / sum_r, worst);

    Complex printed = expsum::reconstruct(canon_printed_prop3(terms));
    double printed_err = std::abs(printed - direct) / sum_r;
    record_gt(cprinted, printed_err, worst);
  }
  out.trials_run = trials;
  out.checks = {c12, c23, c13, cprinted};
  return out;
}

SuiteResult suite_permutation(const VerifyConfig& cfg) {
  SuiteResult out;
  out.suite = "permutation";
  std::uint64_t trials = cfg.trials ? cfg.trials : 2000;
  constexpr int kPerms = 5;
  constexpr double kSigmaMargin = 1e-6;
  constexpr double kFlagGap = 0.01;

  std::array<CheckResult, 4> invariant = {
      make_check("prop1_recon_permutation_invariant", cfg.tol_scale),
      make_check("prop2_recon_permutation_invariant", cfg.tol_scale),
      make_check("prop3_recon_permutation_invariant", cfg.tol_scale),
      make_check("prop4_recon_permutation_invariant", cfg.tol_scale),
  };
  CheckResult csigma = make_check("prop4_sigma_order_dependent", kSigmaMargin);
  csigma.detail["comparison"] = "value_must_exceed_tol";
  csigma.detail["family"] = "n >= 3 and |theta[n-2] - theta[n-1]| >= 0.01, last two swapped";
  CheckResult cswap = make_check("prop4_recon_invariant_under_swap", cfg.tol_scale);

  std::uint64_t flagged = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    SplitMix64 rng = trial_rng(cfg.seed, kSaltPermutation, t);
    std::vector<ExpTerm> terms = draw_terms(rng, 1, cfg.n_max, cfg.r_lo, cfg.r_hi);
    Complex direct = expsum::sum_direct(terms);
    double sum_r = sum_amplitudes(terms);
    auto worst = [&] { return terms_json(terms); };

    for (int p = 0; p < kPerms; ++p) {
      std::vector<ExpTerm> shuffled = permuted(terms, rng);
      Complex recon[4] = {
          expsum::reconstruct(expsum::canon_prop1(shuffled)),
          expsum::reconstruct(expsum::canon_prop2(shuffled)),
          expsum::reconstruct(expsum::canon_prop3(shuffled)),
          expsum::reconstruct(expsum::canon_prop4(shuffled)),
      };
      for (int i = 0; i < 4; ++i)
        record_le(invariant[i], std::abs(recon[i] - direct) / sum_r, worst);
    }

    std::size_t n = terms.size();
    if (n >= 3 && std::abs(terms[n - 2].theta - terms[n - 1].theta) >= kFlagGap) {
      ++flagged;
      std::vector<ExpTerm> swapped(terms.begin(), terms.end());
      std::swap(swapped[n - 2], swapped[n - 1]);
      expsum::SigmaForm base = expsum::canon_prop4(terms);
      expsum::SigmaForm alt = expsum::canon_prop4(swapped);
      record_gt(csigma, std::abs(alt.sigma - base.sigma), worst);
      record_le(cswap, std::abs(expsum::reconstruct(alt) - direct) / sum_r, worst);
    }
  }
  csigma.detail["flagged_trials"] = flagged;
  out.trials_run = trials;
  out.checks.assign(invariant.begin(), invariant.end());
  out.checks.push_back(csigma);
  out.checks.push_back(cswap);
  return out;
}

SuiteResult suite_cyclic(const VerifyConfig& cfg) {
  SuiteResult out;
  out.suite = "cyclic";
  std::uint64_t trials = cfg.trials ? cfg.trials : 2000;
  constexpr double kRelTol = 1e-9;
  CheckResult cpower = make_check("product_equals_power", kRelTol);
  CheckResult croot = make_check("principal_root_up_to_unity", kRelTol);
  std::map<std::size_t, std::uint64_t> histogram;

  for (std::uint64_t t = 0; t < trials; ++t) {
    SplitMix64 rng = trial_rng(cfg.seed, kSaltCyclic, t);
    std::vector<ExpTerm> terms = draw_terms(rng, 1, cfg.n_max, cfg.r_lo, cfg.r_hi);
    Complex direct = expsum::sum_direct(terms);
    double sum_r = sum_amplitudes(terms);
    if (std::abs(direct) <= expsum::kNearCancellationEps * sum_r) {
      out.excluded["near_cancellation"]++;
      continue;
    }
    auto worst = [&] { return terms_json(terms); };
    expsum::CyclicReport rep = expsum::cyclic_product_check(terms);
    record_le(cpower, rep.power_rel_err, worst);
    record_le(croot, rep.root_rel_err, worst);
    histogram[rep.root_index]++;
  }
  ordered_json hist = ordered_json::object();
  for (const auto& [idx, count] : histogram) hist[std::to_string(idx)] = count;
  croot.detail["root_index_histogram"] = hist;
  out.trials_run = trials;
  out.checks = {cpower, croot};
  return out;
}

SuiteResult suite_field(const VerifyConfig& cfg) {
  SuiteResult out;
  out.suite = "field";
  std::uint64_t trials = cfg.trials ? cfg.trials : 1000;
  constexpr double kLawTol = 1e-10;
  const std::vector<double> grid = sample_grid(cfg.seed);
  const wave::WaveExpr zero = wave::constant({0.0, 0.0});
  const wave::WaveExpr one = wave::gen(exact::Rational{0, 1}, exact::Rational{0, 1});

  constexpr std::array<const char*, 9> law_names = {
      "add_commutes",     "mul_commutes", "add_associates",
      "mul_associates",   "distributes",  "add_identity",
      "mul_identity",     "add_inverse",  "mul_inverse",
  };
  std::array<CheckResult, 9> checks;
  for (std::size_t i = 0; i < checks.size(); ++i) checks[i] = make_check(law_names[i], kLawTol);
  for (auto& c : checks) c.detail["error_unit"] = "abs_err / max intermediate magnitude";

  TreeOptions opt{.max_depth = 6, .params = GenParams::Mixed, .allow_inv = true};
  for (std::uint64_t t = 0; t < trials; ++t) {
    SplitMix64 rng = trial_rng(cfg.seed, kSaltField, t);
    wave::WaveExpr a = random_tree(rng, opt);
    wave::WaveExpr b = random_tree(rng, opt);
    wave::WaveExpr c = random_tree(rng, opt);

    const std::array<std::pair<wave::WaveExpr, wave::WaveExpr>, 9> laws = {{
        {wave::add(a, b), wave::add(b, a)},
        {wave::mul(a, b), wave::mul(b, a)},
        {wave::add(wave::add(a, b), c), wave::add(a, wave::add(b, c))},
        {wave::mul(wave::mul(a, b), c), wave::mul(a, wave::mul(b, c))},
        {wave::mul(a, wave::add(b, c)), wave::add(wave::mul(a, b), wave::mul(a, c))},
        {wave::add(a, zero), a},
        {wave::mul(a, one), a},
        {wave::add(a, wave::neg(a)), zero},
        {wave::mul(a, wave::inv(a)), one},
    }};

    for (std::size_t li = 0; li < laws.size(); ++li) {
      for (double rho : grid) {
        wave::EvalInfo lhs = wave::eval_info(laws[li].first, rho);
        wave::EvalInfo rhs = wave::eval_info(laws[li].second, rho);
        if (std::min(lhs.min_inv_mag, rhs.min_inv_mag) < kNearPoleMag) {
          out.excluded["near_pole_samples"]++;
          continue;
        }
        double err = std::abs(lhs.value - rhs.value) / std::max(lhs.scale, rhs.scale);
        record_le(checks[li], err, [&] {
          ordered_json w;
          w["law"] = law_names[li];
          w["lhs"] = lang::print_wave(laws[li].first);
          w["rhs"] = lang::print_wave(laws[li].second);
          w["rho"] = rho;
          return w;
        });
      }
    }
  }
  out.trials_run = trials;
  out.checks.assign(checks.begin(), checks.end());
  return out;
}

SuiteResult suite_conservation(const VerifyConfig& cfg) {
  SuiteResult out;
  out.suite = "conservation";
  std::uint64_t trials = cfg.trials ? cfg.trials : 5000;
  constexpr double kFloatTol = 1e-12;
  CheckResult cspin_exact = make_check("spin_conserved_exact_rational", 0.0);
  CheckResult crot_exact = make_check("rotation_conserved_exact_rational", 0.0);
  CheckResult cspin_float = make_check("spin_conserved_float", kFloatTol);
  CheckResult crot_float = make_check("rotation_conserved_float", kFloatTol);

  for (std::uint64_t t = 0; t < trials; ++t) {
    SplitMix64 rng = trial_rng(cfg.seed, kSaltConservation, t);
    bool rational = t % 2 == 0;
    TreeOptions opt{.max_depth = 5,
                    .params = rational ? GenParams::Rational : GenParams::Float,
                    .allow_inv = true};
    wave::WaveExpr a = random_tree(rng, opt);
    wave::WaveExpr b = random_tree(rng, opt);
    auto worst = [&] {
      ordered_json w;
      w["a"] = lang::print_wave(a);
      w["b"] = lang::print_wave(b);
      return w;
    };

    wave::WaveExpr sum = wave::add(a, b);
    wave::WaveExpr prod = wave::mul(a, b);
    wave::WaveExpr rec = wave::inv(a);

    if (rational) {
      auto sa = wave::spin_rational(a), sb = wave::spin_rational(b);
      auto ra = wave::rotation_rational(a), rb = wave::rotation_rational(b);
      bool spin_ok = sa && sb && wave::spin_rational(sum) == exact::rat_add(*sa, *sb) &&
                     wave::spin_rational(prod) == exact::rat_add(*sa, *sb) &&
                     wave::spin_rational(rec) == exact::rat_neg(*sa);
      bool rot_ok = ra && rb && wave::rotation_rational(sum) == exact::rat_add(*ra, *rb) &&
                    wave::rotation_rational(prod) == exact::rat_add(*ra, *rb) &&
                    wave::rotation_rational(rec) == exact::rat_neg(*ra);
      record_bool(cspin_exact, spin_ok, worst);
      record_bool(crot_exact, rot_ok, worst);
    } else {
      double sa = wave::spin(a), sb = wave::spin(b);
      double spin_err = std::max({std::abs(wave::spin(sum) - (sa + sb)),
                                  std::abs(wave::spin(prod) - (sa + sb)),
                                  std::abs(wave::spin(rec) + sa)});
      double ra = wave::rotation(a), rb = wave::rotation(b);
      double rot_err = std::max({std::abs(wave::rotation(sum) - (ra + rb)),
                                 std::abs(wave::rotation(prod) - (ra + rb)),
                                 std::abs(wave::rotation(rec) + ra)});
      record_le(cspin_float, spin_err, worst);
      record_le(crot_float, rot_err, worst);
    }
  }
  out.trials_run = trials;
  out.checks = {cspin_exact, crot_exact, cspin_float, crot_float};
  return out;
}

exact::Rational draw_small_rational(SplitMix64& rng, std::int64_t max_abs_num,
                                    std::int64_t max_den, bool nonzero) {
  while (true) {
    std::int64_t p = static_cast<std::int64_t>(rng.below(2 * max_abs_num + 1)) - max_abs_num;
    if (nonzero && p == 0) continue;
    std::int64_t q = 1 + static_cast<std::int64_t>(rng.below(max_den));
    return exact::make_rational(p, q);
  }
}

// Smallest X = k * periods[0] that is an integer multiple of every period.
exact::Rational brute_force_common_period(const std::vector<exact::Rational>& periods) {
  for (std::int64_t k = 1; k <= 100000; ++k) {
    exact::Rational x = exact::rat_mul(exact::rational_from_int(k), periods[0]);
    bool all = true;
    for (const exact::Rational& p : periods) {
      if (exact::rat_mul(x, exact::rat_inv(p)).den != 1) {
        all = false;
        break;
      }
    }
    if (all) return x;
  }
  throw std::logic_error("common period search exhausted");
}

SuiteResult suite_period(const VerifyConfig& cfg) {
  SuiteResult out;
  out.suite = "period";
  std::uint64_t trials = cfg.trials ? cfg.trials : 1000;
  constexpr double kPeriodTol = 1e-9;
  const std::vector<double> grid = sample_grid(cfg.seed);
  CheckResult cperiodic = make_check("periodic_with_leaf_lcm_period", 0.0);
  CheckResult cminimal = make_check("no_divisor_is_a_period", kPeriodTol);
  cminimal.detail["comparison"] = "value_must_exceed_tol";
  cminimal.detail["family"] = "distinct-spin distinct-rotation generator sums, divisors T/2..T/7";
  CheckResult cconstant = make_check("constant_detected", 0.0);
  CheckResult cunknown = make_check("unknown_for_float_spins", 0.0);

  for (std::uint64_t t = 0; t < trials; ++t) {
    SplitMix64 rng = trial_rng(cfg.seed, kSaltPeriod, t);
    int mode = static_cast<int>(t % 3);

    if (mode == 0) {
      int n = 1 + static_cast<int>(rng.below(4));
      std::vector<exact::Rational> spins, rotations;
      while (static_cast<int>(spins.size()) < n) {
        exact::Rational f = draw_small_rational(rng, 6, 6, true);
        if (std::find(spins.begin(), spins.end(), f) == spins.end()) spins.push_back(f);
      }
      while (static_cast<int>(rotations.size()) < n) {
        exact::Rational th = draw_small_rational(rng, 6, 6, false);
        if (std::find(rotations.begin(), rotations.end(), th) == rotations.end())
          rotations.push_back(th);
      }
      wave::WaveExpr e = wave::gen(spins[0], rotations[0]);
      std::vector<exact::Rational> periods;
      periods.push_back(exact::rat_abs(exact::rat_inv(spins[0])));
      for (int j = 1; j < n; ++j) {
        e = wave::add(e, wave::gen(spins[j], rotations[j]));
        periods.push_back(exact::rat_abs(exact::rat_inv(spins[j])));
      }
      auto worst = [&] { return ordered_json(lang::print_wave(e)); };

      exact::Rational expected = brute_force_common_period(periods);
      exact::PeriodReport rep = exact::periodicity(e);
      record_bool(cperiodic,
                  rep.status == exact::PeriodStatus::Periodic && rep.period &&
                      *rep.period == expected,
                  worst);

      double period = exact::to_double(expected);
      for (int k = 2; k <= 7; ++k) {
        double shift = period / k;
        double worst_gap = 0.0;
        for (double rho : grid) {
          Complex at = wave::eval(e, rho);
          Complex moved = wave::eval(e, rho + shift);
          worst_gap = std::max(worst_gap,
                               std::abs(moved - at) / std::max(1.0, std::abs(at)));
        }
        record_gt(cminimal, worst_gap, worst);
      }
    } else if (mode == 1) {
      int n = 1 + static_cast<int>(rng.below(3));
      wave::WaveExpr e = wave::gen(exact::Rational{0, 1}, draw_small_rational(rng, 6, 6, false));
      for (int j = 1; j < n; ++j) {
        wave::WaveExpr leaf =
            rng.u01() < 0.5
                ? wave::gen(exact::Rational{0, 1}, draw_small_rational(rng, 6, 6, false))
                : wave::constant({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)});
        e = rng.u01() < 0.5 ? wave::add(e, leaf) : wave::mul(e, leaf);
      }
      exact::PeriodReport rep = exact::periodicity(e);
      record_bool(cconstant, rep.status == exact::PeriodStatus::Constant,
                  [&] { return ordered_json(lang::print_wave(e)); });
    } else {
      double f = rng.uniform(0.1, 3.0) * std::numbers::sqrt2;
      wave::WaveExpr e = wave::gen(f, rng.uniform(-1.0, 1.0));
      if (rng.u01() < 0.5)
        e = wave::add(e, wave::gen(draw_small_rational(rng, 6, 6, true),
                                   draw_small_rational(rng, 6, 6, false)));
      exact::PeriodReport rep = exact::periodicity(e);
      record_bool(cunknown, rep.status == exact::PeriodStatus::Unknown,
                  [&] { return ordered_json(lang::print_wave(e)); });
    }
  }
  out.trials_run = trials;
  out.checks = {cperiodic, cminimal, cconstant, cunknown};
  return out;
}

SuiteResult suite_branch(const VerifyConfig& cfg) {
  SuiteResult out;
  out.suite = "branch";
  std::uint64_t trials = cfg.trials ? cfg.trials : 1000;
  constexpr double kRelTol = 1e-12;
  CheckResult c3 = make_check("prop3_step_branch_invariant", kRelTol);
  CheckResult c4 = make_check("prop4_step_branch_invariant", kRelTol);

  for (std::uint64_t t = 0; t < trials; ++t) {
    SplitMix64 rng = trial_rng(cfg.seed, kSaltBranch, t);
    std::vector<ExpTerm> terms = draw_terms(rng, 2, cfg.n_max, cfg.r_lo, cfg.r_hi);
    std::span<const ExpTerm> prefix(terms.data(), terms.size() - 1);
    const ExpTerm& last = terms.back();
    double prefix_sum_r = sum_amplitudes(prefix);
    auto worst = [&] { return terms_json(terms); };

    Complex a_prev = expsum::canon_prop2(prefix).A;
    if (std::abs(a_prev) < expsum::kNearCancellationEps * prefix_sum_r) {
      out.excluded["near_cancellation"]++;
      continue;
    }
    double theta_sum = sum_phases(terms);

    Complex base3 = expsum::detail::prop3_step(a_prev, last.r, theta_sum, last.theta, 0);
    if (std::abs(base3) < kNearPoleMag * (std::abs(a_prev) + last.r)) {
      out.excluded["near_zero_step_output"]++;
    } else {
      for (int k = -2; k <= 2; ++k) {
        if (k == 0) continue;
        Complex shifted = expsum::detail::prop3_step(a_prev, last.r, theta_sum, last.theta, k);
        record_le(c3, std::abs(shifted - base3) / std::abs(base3), worst);
      }
    }

    expsum::SigmaForm prev4 = expsum::canon_prop4(prefix);
    Complex base4 = expsum::detail::prop4_step(prev4.A, prev4.sigma, last.r, last.theta, 0);
    if (std::abs(base4) < kNearPoleMag * (std::abs(prev4.A) + last.r)) {
      out.excluded["near_zero_step_output"]++;
      continue;
    }
    for (int k = -2; k <= 2; ++k) {
      if (k == 0) continue;
      Complex shifted = expsum::detail::prop4_step(prev4.A, prev4.sigma, last.r, last.theta, k);
      record_le(c4, std::abs(shifted - base4) / std::abs(base4), worst);
    }
  }
  out.trials_run = trials;
  out.checks = {c3, c4};
  return out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "oracle", "crossform", "permutation", "cyclic", "field", "conservation", "period", "branch"};
  return names;
}

SuiteResult run_suite(const std::string& name, const VerifyConfig& config) {
  auto started = std::chrono::steady_clock::now();
  SuiteResult result;
  if (name == "oracle")
    result = suite_oracle(config);
  else if (name == "crossform")
    result = suite_crossform(config);
  else if (name == "permutation")
    result = suite_permutation(config);
  else if (name == "cyclic")
    result = suite_cyclic(config);
  else if (name == "field")
    result = suite_field(config);
  else if (name == "conservation")
    result = suite_conservation(config);
  else if (name == "period")
    result = suite_period(config);
  else if (name == "branch")
    result = suite_branch(config);
  else
    throw std::invalid_argument("unknown suite: " + name);
  result.config = config;
  auto finished = std::chrono::steady_clock::now();
  result.elapsed_ms = std::chrono::duration<double, std::milli>(finished - started).count();
  return result;
}

nlohmann::ordered_json report_json(const SuiteResult& result, bool include_elapsed) {
  ordered_json j;
  j["suite"] = result.suite;
  j["seed"] = result.config.seed;
  j["trials"] = result.trials_run;
  j["config"] = ordered_json{{"n_max", result.config.n_max},
                             {"r_lo", result.config.r_lo},
                             {"r_hi", result.config.r_hi},
                             {"tol_scale", result.config.tol_scale}};
  j["pass"] = result.passed();
  ordered_json checks = ordered_json::array();
  for (const CheckResult& c : result.checks) {
    ordered_json cj;
    cj["name"] = c.name;
    cj["pass"] = c.pass;
    cj["fail"] = c.fail;
    cj["tol"] = c.tol;
    cj["max_err"] = c.max_err;
    cj["worst_err"] = c.worst_err;
    cj["worst_input"] = c.worst_input;
    if (!c.detail.empty()) cj["detail"] = c.detail;
    checks.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks);
  ordered_json excluded = ordered_json::object();
  for (const auto& [key, count] : result.excluded) excluded[key] = count;
  j["excluded"] = std::move(excluded);
  if (include_elapsed) j["elapsed_ms"] = result.elapsed_ms;
  return j;
}

SplitMix64 trial_rng(std::uint64_t seed, std::uint64_t salt, std::uint64_t trial) {
  SplitMix64 g(seed + 0x9e3779b97f4a7c15ull * salt);
  std::uint64_t base = g.next();
  return SplitMix64(base + 0xbf58476d1ce4e5b9ull * trial);
}

std::vector<expsum::ExpTerm> draw_terms(SplitMix64& rng, int n_min, int n_max, double r_lo,
                                        double r_hi) {
  int n = n_min + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_max - n_min + 1)));
  std::vector<expsum::ExpTerm> terms;
  terms.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    terms.push_back({rng.log_uniform(r_lo, r_hi), rng.uniform(-kPi, kPi)});
  return terms;
}

nlohmann::ordered_json terms_json(std::span<const expsum::ExpTerm> terms) {
  ordered_json arr = ordered_json::array();
  for (const expsum::ExpTerm& t : terms)
    arr.push_back(ordered_json{{"r", t.r}, {"theta", t.theta}});
  ordered_json j;
  j["terms"] = std::move(arr);
  return j;
}

namespace {

wave::WaveExpr random_node(SplitMix64& rng, const TreeOptions& opt, int depth) {
  bool leaf = depth <= 0 || rng.u01() < 0.4;
  if (leaf) {
    if (rng.u01() < 0.25)
      return wave::constant({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)});
    bool rational;
    switch (opt.params) {
      case GenParams::Rational:
        rational = true;
        break;
      case GenParams::Float:
        rational = false;
        break;
      default:
        rational = rng.u01() < 0.5;
    }
    if (rational)
      return wave::gen(draw_small_rational(rng, 12, 12, false),
                       draw_small_rational(rng, 12, 12, false));
    return wave::gen(rng.uniform(-3.0, 3.0), rng.uniform(-1.0, 1.0));
  }
  double pick = rng.u01();
  if (opt.allow_inv && pick < 0.15) return wave::inv(random_node(rng, opt, depth - 1));
  if (pick < 0.6)
    return wave::add(random_node(rng, opt, depth - 1), random_node(rng, opt, depth - 1));
  return wave::mul(random_node(rng, opt, depth - 1), random_node(rng, opt, depth - 1));
}

}  // namespace

wave::WaveExpr random_tree(SplitMix64& rng, const TreeOptions& opt) {
  return random_node(rng, opt, opt.max_depth);
}

std::vector<double> sample_grid(std::uint64_t seed) {
  std::vector<double> grid;
  grid.reserve(64);
  for (int i = 0; i < 32; ++i) grid.push_back(4.0 * std::cos(kPi * (2 * i + 1) / 64.0));
  SplitMix64 rng(seed ^ 0xa5a5a5a55a5a5a5aull);
  for (int i = 0; i < 32; ++i) grid.push_back(rng.uniform(-4.0, 4.0));
  return grid;
}

}  // namespace wavenum::verify
