#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "wavenum/rational.hpp"
#include "wavenum/wavefield.hpp"

namespace wavenum::exact {

enum class PeriodStatus { Periodic, Constant, Unknown };

const char* to_string(PeriodStatus s);

struct PeriodReport {
  PeriodStatus status = PeriodStatus::Unknown;
  std::optional<Rational> period;  // present iff Periodic
};

// The claimed period failed the numeric spot check; an implementation bug,
// not a property of the input.
struct VerificationFailed : std::runtime_error {
  explicit VerificationFailed(const std::string& what) : std::runtime_error(what) {}
};

// Periodicity verdict for a wave expression. Generators must carry exact
// rational spins to participate; any float-only spin yields Unknown. All
// spins zero yields Constant. Otherwise the common period is the lcm of the
// generator periods 1/|f|, checked numerically at 64 seeded samples before
// being reported.
PeriodReport periodicity(const wave::WaveExpr& e);

}  // namespace wavenum::exact
