#include "wavenum/wavefield.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

namespace wavenum::wave {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string pole_message(double at) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "pole at rho = %.17g", at);
  return buf;
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw NonFinite(what);
}

NodePtr make_node(Node&& n) { return std::make_shared<const Node>(std::move(n)); }

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

}  // namespace

PoleError::PoleError(double at) : std::runtime_error(pole_message(at)), rho(at) {}

WaveExpr gen(double f, double theta) {
  require_finite(f, "generator spin must be finite");
  require_finite(theta, "generator rotation must be finite");
  Node n;
  n.kind = NodeKind::Gen;
  n.f = f;
  n.theta = theta;
  return WaveExpr(make_node(std::move(n)));
}

WaveExpr gen(const exact::Rational& f, const exact::Rational& theta) {
  Node n;
  n.kind = NodeKind::Gen;
  n.f = exact::to_double(f);
  n.theta = exact::to_double(theta);
  n.f_exact = f;
  n.theta_exact = theta;
  return WaveExpr(make_node(std::move(n)));
}

WaveExpr gen(const GenArg& f, const GenArg& theta) {
  Node n;
  n.kind = NodeKind::Gen;
  if (const auto* fr = std::get_if<exact::Rational>(&f)) {
    n.f = exact::to_double(*fr);
    n.f_exact = *fr;
  } else {
    n.f = std::get<double>(f);
    require_finite(n.f, "generator spin must be finite");
  }
  if (const auto* tr = std::get_if<exact::Rational>(&theta)) {
    n.theta = exact::to_double(*tr);
    n.theta_exact = *tr;
  } else {
    n.theta = std::get<double>(theta);
    require_finite(n.theta, "generator rotation must be finite");
  }
  return WaveExpr(make_node(std::move(n)));
}

WaveExpr constant(Complex c) {
  require_finite(c.real(), "constant must be finite");
  require_finite(c.imag(), "constant must be finite");
  Node n;
  n.kind = NodeKind::Const;
  n.c = c;
  return WaveExpr(make_node(std::move(n)));
}

WaveExpr mul(const WaveExpr& a, const WaveExpr& b) {
  Node n;
  n.kind = NodeKind::Mul;
  n.lhs = a.ptr();
  n.rhs = b.ptr();
  return WaveExpr(make_node(std::move(n)));
}

WaveExpr add(const WaveExpr& a, const WaveExpr& b) {
  Node n;
  n.kind = NodeKind::Add;
  n.lhs = a.ptr();
  n.rhs = b.ptr();
  return WaveExpr(make_node(std::move(n)));
}

WaveExpr inv(const WaveExpr& a) {
  Node n;
  n.kind = NodeKind::Inv;
  n.lhs = a.ptr();
  return WaveExpr(make_node(std::move(n)));
}

WaveExpr div(const WaveExpr& a, const WaveExpr& b) { return mul(a, inv(b)); }

WaveExpr neg(const WaveExpr& a) {
  return mul(gen(exact::make_rational(0, 1), exact::make_rational(1, 2)), a);
}

namespace {

EvalInfo eval_node(const Node& n, double rho) {
  switch (n.kind) {
    case NodeKind::Gen: {
      EvalInfo out;
      out.value = std::polar(1.0, kTwoPi * (n.f * rho + n.theta));
      out.scale = 1.0;
      out.min_inv_mag = std::numeric_limits<double>::infinity();
      return out;
    }
    case NodeKind::Const: {
      EvalInfo out;
      out.value = n.c;
      out.scale = std::max(1.0, std::abs(n.c));
      out.min_inv_mag = std::numeric_limits<double>::infinity();
      return out;
    }
    case NodeKind::Mul:
    case NodeKind::Add: {
      EvalInfo a = eval_node(*n.lhs, rho);
      EvalInfo b = eval_node(*n.rhs, rho);
      EvalInfo out;
      out.value = n.kind == NodeKind::Mul ? a.value * b.value : a.value + b.value;
      out.scale = std::max({a.scale, b.scale, std::abs(out.value)});
      out.min_inv_mag = std::min(a.min_inv_mag, b.min_inv_mag);
      return out;
    }
    case NodeKind::Inv: {
      EvalInfo a = eval_node(*n.lhs, rho);
      double d = std::abs(a.value);
      EvalInfo out;
      out.min_inv_mag = std::min(a.min_inv_mag, d);
      // Past a pole the value is discarded; keep it finite regardless.
      out.value = d < kPoleEps ? Complex{0.0, 0.0} : 1.0 / a.value;
      out.scale = std::max({a.scale, std::abs(out.value)});
      return out;
    }
  }
  throw std::logic_error("unreachable node kind");
}

}  // namespace

EvalInfo eval_info(const WaveExpr& e, double rho) { return eval_node(e.node(), rho); }

Complex eval(const WaveExpr& e, double rho) {
  EvalInfo info = eval_info(e, rho);
  if (info.pole()) throw PoleError(rho);
  return info.value;
}

namespace {

enum class Charge { Spin, Rotation };

double charge_of(const Node& n, Charge which) {
  switch (n.kind) {
    case NodeKind::Gen:
      return which == Charge::Spin ? n.f : n.theta;
    case NodeKind::Const:
      return 0.0;
    case NodeKind::Mul:
    case NodeKind::Add:
      return charge_of(*n.lhs, which) + charge_of(*n.rhs, which);
    case NodeKind::Inv:
      return -charge_of(*n.lhs, which);
  }
  throw std::logic_error("unreachable node kind");
}

std::optional<exact::Rational> charge_rational(const Node& n, Charge which) {
  switch (n.kind) {
    case NodeKind::Gen:
      return which == Charge::Spin ? n.f_exact : n.theta_exact;
    case NodeKind::Const:
      return exact::Rational{0, 1};
    case NodeKind::Mul:
    case NodeKind::Add: {
      auto a = charge_rational(*n.lhs, which);
      auto b = charge_rational(*n.rhs, which);
      if (!a || !b) return std::nullopt;
      return exact::rat_add(*a, *b);
    }
    case NodeKind::Inv: {
      auto a = charge_rational(*n.lhs, which);
      if (!a) return std::nullopt;
      return exact::rat_neg(*a);
    }
  }
  throw std::logic_error("unreachable node kind");
}

}  // namespace

double spin(const WaveExpr& e) { return charge_of(e.node(), Charge::Spin); }
double rotation(const WaveExpr& e) { return charge_of(e.node(), Charge::Rotation); }

std::optional<exact::Rational> spin_rational(const WaveExpr& e) {
  return charge_rational(e.node(), Charge::Spin);
}

std::optional<exact::Rational> rotation_rational(const WaveExpr& e) {
  return charge_rational(e.node(), Charge::Rotation);
}

WaveCanonical canonicalize(const WaveExpr& e) {
  WaveCanonical out;
  auto fr = spin_rational(e);
  auto tr = rotation_rational(e);
  if (fr && tr) {
    out.f = exact::to_double(*fr);
    out.theta = exact::to_double(*tr);
    out.amp = div(e, gen(*fr, *tr));
  } else {
    out.f = spin(e);
    out.theta = rotation(e);
    out.amp = div(e, gen(out.f, out.theta));
  }
  return out;
}

Complex project(const WaveExpr& e) { return eval(e, 0.0); }

WaveExpr lift_sum(std::span<const expsum::ExpTerm> terms, std::span<const double> spins) {
  if (terms.size() != spins.size())
    throw std::invalid_argument("lift_sum needs one spin per term");
  if (terms.empty()) throw expsum::ZeroAmplitude("lift_sum requires at least one term");
  WaveExpr acc;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (!(terms[k].r >= 0.0) || !std::isfinite(terms[k].r))
      throw std::invalid_argument("lift_sum amplitudes must be finite and nonnegative");
    require_finite(terms[k].theta, "lift_sum phases must be finite");
    require_finite(spins[k], "lift_sum spins must be finite");
    WaveExpr term =
        mul(constant(Complex{terms[k].r, 0.0}), gen(spins[k], terms[k].theta / kTwoPi));
    acc = acc ? add(acc, term) : term;
  }
  return acc;
}

namespace {

bool tags_equal(const std::optional<exact::Rational>& a, const std::optional<exact::Rational>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || *a == *b;
}

bool nodes_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Gen:
      return same_bits(a.f, b.f) && same_bits(a.theta, b.theta) &&
             tags_equal(a.f_exact, b.f_exact) && tags_equal(a.theta_exact, b.theta_exact);
    case NodeKind::Const:
      return same_bits(a.c.real(), b.c.real()) && same_bits(a.c.imag(), b.c.imag());
    case NodeKind::Mul:
    case NodeKind::Add:
      return nodes_equal(*a.lhs, *b.lhs) && nodes_equal(*a.rhs, *b.rhs);
    case NodeKind::Inv:
      return nodes_equal(*a.lhs, *b.lhs);
  }
  return false;
}

}  // namespace

bool structural_equal(const WaveExpr& a, const WaveExpr& b) {
  if (!a || !b) return !a && !b;
  return nodes_equal(a.node(), b.node());
}

}  // namespace wavenum::wave
