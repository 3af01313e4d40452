#include <doctest.h>

#include <cmath>
#include <complex>

#include "wavenum/periodicity.hpp"
#include "wavenum/rational.hpp"
#include "wavenum/wavefield.hpp"

using namespace wavenum;
using exact::make_rational;
using exact::PeriodReport;
using exact::PeriodStatus;
using exact::Rational;
using wave::add;
using wave::gen;
using wave::inv;
using wave::mul;
using wave::WaveExpr;

namespace {
Rational rat(std::int64_t p, std::int64_t q) { return make_rational(p, q); }
}  // namespace

TEST_CASE("two-generator sum has the lcm period") {
  // Periods 3/2 and 2; common period lcm(3/2, 2) = 6.
  WaveExpr e = add(gen(rat(2, 3), rat(0, 1)), gen(rat(1, 2), rat(0, 1)));
  PeriodReport rep = exact::periodicity(e);
  REQUIRE(rep.status == PeriodStatus::Periodic);
  REQUIRE(rep.period.has_value());
  CHECK(*rep.period == rat(6, 1));
  // The verified claim is checkable directly.
  for (double rho : {0.0, 0.7, 1.3, 2.9}) {
    CHECK(std::abs(wave::eval(e, rho + 6.0) - wave::eval(e, rho)) <= 1e-9);
  }
}

TEST_CASE("zero-spin expressions are constant") {
  WaveExpr c = gen(rat(0, 1), rat(1, 3));
  PeriodReport rep = exact::periodicity(c);
  CHECK(rep.status == PeriodStatus::Constant);
  CHECK_FALSE(rep.period.has_value());

  WaveExpr k = wave::constant(std::complex<double>{2.5, -1.0});
  CHECK(exact::periodicity(k).status == PeriodStatus::Constant);

  // Constant is decided per generator, not by the structural spin sum:
  // w(1,0) + inv(w(1,0)) sums to spin 0 yet is 2*cos(2*pi*rho), so the
  // conservative answer is a period, not "constant".
  WaveExpr cancel = add(gen(rat(1, 1), rat(0, 1)), inv(gen(rat(1, 1), rat(0, 1))));
  PeriodReport rc = exact::periodicity(cancel);
  REQUIRE(rc.status == PeriodStatus::Periodic);
  CHECK(*rc.period == rat(1, 1));
}

TEST_CASE("float spins are unknown") {
  WaveExpr f = gen(0.5, 0.0);
  CHECK(exact::periodicity(f).status == PeriodStatus::Unknown);
  // One float generator anywhere poisons the analysis.
  WaveExpr m = add(gen(rat(1, 2), rat(0, 1)), gen(0.25, 0.0));
  CHECK(exact::periodicity(m).status == PeriodStatus::Unknown);
  // A float rotation alone does not: the period depends only on spins.
  WaveExpr t = gen(wave::GenArg{rat(1, 2)}, wave::GenArg{0.1});
  CHECK(exact::periodicity(t).status == PeriodStatus::Periodic);
}

TEST_CASE("single generator period is 1/|f|") {
  WaveExpr g = gen(rat(2, 3), rat(1, 5));
  PeriodReport rep = exact::periodicity(g);
  REQUIRE(rep.status == PeriodStatus::Periodic);
  CHECK(*rep.period == rat(3, 2));

  // Negative spin: same period through the absolute value.
  WaveExpr n = gen(rat(-2, 3), rat(0, 1));
  PeriodReport rn = exact::periodicity(n);
  REQUIRE(rn.status == PeriodStatus::Periodic);
  CHECK(*rn.period == rat(3, 2));
}

TEST_CASE("period folds across mul and inv structure") {
  WaveExpr e = mul(gen(rat(2, 3), rat(0, 1)), inv(gen(rat(1, 2), rat(1, 7))));
  PeriodReport rep = exact::periodicity(e);
  REQUIRE(rep.status == PeriodStatus::Periodic);
  CHECK(*rep.period == rat(6, 1));
}

TEST_CASE("reported period can be a non-minimal common multiple") {
  // w(1/2,0)^2 has spin 1 and true period 1, but the per-generator fold
  // reports lcm(2,2) = 2. The report is still a valid period.
  WaveExpr e = mul(gen(rat(1, 2), rat(0, 1)), gen(rat(1, 2), rat(0, 1)));
  PeriodReport rep = exact::periodicity(e);
  REQUIRE(rep.status == PeriodStatus::Periodic);
  CHECK(*rep.period == rat(2, 1));
  for (double rho : {0.1, 0.6, 1.4}) {
    CHECK(std::abs(wave::eval(e, rho + 2.0) - wave::eval(e, rho)) <= 1e-12);
  }
}
