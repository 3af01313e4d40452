#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "wavenum/expsum.hpp"
#include "wavenum/rational.hpp"

namespace wavenum::wave {

using Complex = std::complex<double>;

struct NonFinite : std::invalid_argument {
  explicit NonFinite(const char* what) : std::invalid_argument(what) {}
};

// Raised when evaluation meets a reciprocal of (numerically) zero.
struct PoleError : std::runtime_error {
  explicit PoleError(double at);
  double rho;
};

// |denominator| below this counts as a pole of an Inv node.
inline constexpr double kPoleEps = 1e-12;

enum class NodeKind { Gen, Const, Mul, Add, Inv };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

// Immutable expression tree over the generators w(f,theta): rho -> e^{i*2*pi*(f*rho+theta)}.
// theta is in turns. Generators written with exact rational parameters carry
// them alongside the double values so periodicity analysis stays exact.
struct Node {
  NodeKind kind = NodeKind::Const;
  // Gen
  double f = 0.0;
  double theta = 0.0;
  std::optional<exact::Rational> f_exact;
  std::optional<exact::Rational> theta_exact;
  // Const
  Complex c{0.0, 0.0};
  // Mul / Add / Inv
  NodePtr lhs;
  NodePtr rhs;
};

class WaveExpr {
 public:
  WaveExpr() = default;
  explicit WaveExpr(NodePtr node) : node_(std::move(node)) {}
  const Node& node() const { return *node_; }
  const NodePtr& ptr() const { return node_; }
  explicit operator bool() const { return static_cast<bool>(node_); }

 private:
  NodePtr node_;
};

// A generator parameter is either a plain float or an exact rational that
// additionally participates in periodicity analysis.
using GenArg = std::variant<double, exact::Rational>;

WaveExpr gen(double f, double theta);
WaveExpr gen(const exact::Rational& f, const exact::Rational& theta);
WaveExpr gen(const GenArg& f, const GenArg& theta);
WaveExpr constant(Complex c);
WaveExpr mul(const WaveExpr& a, const WaveExpr& b);
WaveExpr add(const WaveExpr& a, const WaveExpr& b);
WaveExpr inv(const WaveExpr& a);
WaveExpr div(const WaveExpr& a, const WaveExpr& b);  // a * inv(b)
WaveExpr neg(const WaveExpr& a);                     // w(0,1/2) * a

struct EvalInfo {
  Complex value{0.0, 0.0};
  // Largest magnitude produced at any node, floored at 1; the natural scale
  // for error tolerances on this evaluation.
  double scale = 1.0;
  // Smallest |denominator| seen across Inv nodes (huge when there are none).
  double min_inv_mag = 0.0;

  bool pole() const { return min_inv_mag < kPoleEps; }
};

// Pointwise evaluation bookkeeping without pole exceptions; value is
// meaningless when pole() is set.
EvalInfo eval_info(const WaveExpr& e, double rho);

// Pointwise evaluation; throws PoleError at poles.
Complex eval(const WaveExpr& e, double rho);

// Structural spin/rotation: Gen contributes (f, theta), Const contributes
// (0, 0), Mul and Add sum their children, Inv negates.
double spin(const WaveExpr& e);
double rotation(const WaveExpr& e);

// Exact variants; empty when any generator parameter lacks a rational tag.
std::optional<exact::Rational> spin_rational(const WaveExpr& e);
std::optional<exact::Rational> rotation_rational(const WaveExpr& e);

struct WaveCanonical {
  WaveExpr amp;
  double f = 0.0;
  double theta = 0.0;
};

// Factors e as amp * w(f,theta) with (f,theta) the structural spin/rotation.
WaveCanonical canonicalize(const WaveExpr& e);

// Evaluation at rho = 0; forgets the spin.
Complex project(const WaveExpr& e);

// Interprets r_k*e^{i*theta_k} (theta in radians) as the projection of
// const(r_k) * w(f_k, theta_k/2pi) and sums the lifted terms.
WaveExpr lift_sum(std::span<const expsum::ExpTerm> terms, std::span<const double> spins);

// Same shape, same parameter values, same exactness tags.
bool structural_equal(const WaveExpr& a, const WaveExpr& b);

}  // namespace wavenum::wave
