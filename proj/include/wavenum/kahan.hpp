#pragma once

namespace wavenum {

// Kahan compensated accumulator. Keeps the error of each addition and
// feeds it back into the next one, so long phase sums stay accurate.
struct KahanSum {
  double sum = 0.0;
  double compensation = 0.0;

  KahanSum() = default;
  explicit KahanSum(double initial) : sum(initial) {}

  KahanSum& operator+=(double value) {
    const double y = value - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
    return *this;
  }

  double value() const { return sum; }
};

}  // namespace wavenum
