#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavenum/expsum.hpp"
#include "wavenum/rng.hpp"
#include "wavenum/wavefield.hpp"

namespace wavenum::verify {

struct VerifyConfig {
  std::uint64_t seed = 42;
  std::uint64_t trials = 0;  // 0 picks the suite default
  int n_max = 12;
  double r_lo = 1e-3;
  double r_hi = 1e3;
  // Oracle-style tolerances are tol_scale * sum(r).
  double tol_scale = 1e-10;
};

struct CheckResult {
  std::string name;
  std::uint64_t pass = 0;
  std::uint64_t fail = 0;
  double max_err = 0.0;
  double tol = 0.0;
  double worst_err = 0.0;
  // Replayable description of the worst trial (terms JSON or expression text).
  nlohmann::ordered_json worst_input;
  // Free-form extras (histograms, margins, exclusion counts).
  nlohmann::ordered_json detail = nlohmann::ordered_json::object();
};

struct SuiteResult {
  std::string suite;
  VerifyConfig config;
  std::uint64_t trials_run = 0;
  std::vector<CheckResult> checks;
  std::map<std::string, std::uint64_t> excluded;
  double elapsed_ms = 0.0;

  bool passed() const {
    for (const auto& c : checks)
      if (c.fail != 0 || c.pass == 0) return false;
    return !checks.empty();
  }
};

const std::vector<std::string>& suite_names();

// Runs one named suite: oracle, crossform, permutation, cyclic, field,
// conservation, period, branch. Deterministic given the config.
// Throws std::invalid_argument for unknown names.
SuiteResult run_suite(const std::string& name, const VerifyConfig& config);

nlohmann::ordered_json report_json(const SuiteResult& result, bool include_elapsed);

// Derives an independent per-trial stream from (seed, suite salt, trial).
SplitMix64 trial_rng(std::uint64_t seed, std::uint64_t salt, std::uint64_t trial);

// n uniform in [n_min, n_max], r log-uniform in [r_lo, r_hi],
// theta uniform in [-pi, pi].
std::vector<expsum::ExpTerm> draw_terms(SplitMix64& rng, int n_min, int n_max, double r_lo,
                                        double r_hi);

nlohmann::ordered_json terms_json(std::span<const expsum::ExpTerm> terms);

enum class GenParams { Rational, Float, Mixed };

struct TreeOptions {
  int max_depth = 6;
  GenParams params = GenParams::Mixed;
  bool allow_inv = true;
};

wave::WaveExpr random_tree(SplitMix64& rng, const TreeOptions& opt);

// 64 evaluation points in [-4, 4]: 32 Chebyshev plus 32 seeded uniform.
std::vector<double> sample_grid(std::uint64_t seed);

}  // namespace wavenum::verify
