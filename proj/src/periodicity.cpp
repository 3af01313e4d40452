#include "wavenum/periodicity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "wavenum/rng.hpp"

namespace wavenum::exact {

namespace {

constexpr int kSampleCount = 64;
constexpr double kCheckTol = 1e-9;
// Samples this close to a pole of an Inv node are excluded from the check.
constexpr double kNearPoleMag = 1e-6;

// Collects generator spins; false when one lacks an exact tag.
bool collect_spins(const wave::Node& n, std::vector<Rational>& out) {
  switch (n.kind) {
    case wave::NodeKind::Gen:
      if (!n.f_exact) return false;
      out.push_back(*n.f_exact);
      return true;
    case wave::NodeKind::Const:
      return true;
    case wave::NodeKind::Mul:
    case wave::NodeKind::Add:
      return collect_spins(*n.lhs, out) && collect_spins(*n.rhs, out);
    case wave::NodeKind::Inv:
      return collect_spins(*n.lhs, out);
  }
  return false;
}

void verify_period(const wave::WaveExpr& e, double period) {
  SplitMix64 rng(0x7c6e9d4b2a15f083ull);
  double worst = 0.0;
  for (int i = 0; i < kSampleCount; ++i) {
    double rho = rng.uniform(0.0, period);
    wave::EvalInfo at = wave::eval_info(e, rho);
    wave::EvalInfo shifted = wave::eval_info(e, rho + period);
    if (std::min(at.min_inv_mag, shifted.min_inv_mag) < kNearPoleMag) continue;
    double err = std::abs(shifted.value - at.value) / std::max(1.0, std::abs(at.value));
    worst = std::max(worst, err);
  }
  if (worst > kCheckTol) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "period check failed: relative error %.3e > %.0e", worst,
                  kCheckTol);
    throw VerificationFailed(buf);
  }
}

}  // namespace

const char* to_string(PeriodStatus s) {
  switch (s) {
    case PeriodStatus::Periodic:
      return "periodic";
    case PeriodStatus::Constant:
      return "constant";
    case PeriodStatus::Unknown:
      return "unknown";
  }
  return "unknown";
}

PeriodReport periodicity(const wave::WaveExpr& e) {
  std::vector<Rational> spins;
  if (!collect_spins(e.node(), spins)) return {PeriodStatus::Unknown, std::nullopt};

  std::optional<Rational> period;
  for (const Rational& f : spins) {
    if (rat_is_zero(f)) continue;
    Rational leaf_period = rat_abs(rat_inv(f));
    period = period ? rat_lcm(*period, leaf_period) : leaf_period;
  }
  if (!period) return {PeriodStatus::Constant, std::nullopt};

  verify_period(e, to_double(*period));
  return {PeriodStatus::Periodic, period};
}

}  // namespace wavenum::exact
