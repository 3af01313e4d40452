#include <charconv>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavenum/expsum.hpp"
#include "wavenum/lang.hpp"
#include "wavenum/periodicity.hpp"
#include "wavenum/rational.hpp"
#include "wavenum/verify.hpp"
#include "wavenum/wavefield.hpp"

namespace {

using nlohmann::ordered_json;
using wavenum::expsum::Complex;

constexpr int kExitPass = 0;
constexpr int kExitMathFail = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
  std::uint64_t seed = 42;
  std::uint64_t trials = 0;  // 0 keeps each suite's default
  double tol = 1e-10;
  bool compact_json = false;
  bool no_timestamp = false;
};

void emit(const ordered_json& j, const GlobalOptions& opts) {
  if (opts.compact_json)
    std::cout << j.dump() << "\n";
  else
    std::cout << j.dump(2) << "\n";
}

ordered_json complex_json(Complex z) {
  return ordered_json{{"re", z.real()}, {"im", z.imag()}};
}

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin),
                       std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open input file: " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

int run_canon(const std::string& input_path, const std::string& method,
              const GlobalOptions& opts) {
  std::vector<wavenum::expsum::ExpTerm> terms = wavenum::lang::parse_terms(read_input(input_path));
  Complex direct = wavenum::expsum::sum_direct(terms);
  double sum_r = 0.0;
  for (const auto& t : terms) sum_r += t.r;

  ordered_json j;
  j["method"] = method;
  Complex recon;
  if (method == "prop4") {
    wavenum::expsum::SigmaForm s = wavenum::expsum::canon_prop4(terms);
    recon = wavenum::expsum::reconstruct(s);
    j["A"] = complex_json(s.A);
    j["sigma"] = s.sigma;
  } else {
    wavenum::expsum::CanonicalForm c;
    if (method == "prop1")
      c = wavenum::expsum::canon_prop1(terms);
    else if (method == "prop2")
      c = wavenum::expsum::canon_prop2(terms);
    else
      c = wavenum::expsum::canon_prop3(terms);
    recon = wavenum::expsum::reconstruct(c);
    j["A"] = complex_json(c.A);
    j["phi"] = c.phi;
  }
  double abs_err = std::abs(recon - direct);
  j["reconstructed"] = complex_json(recon);
  j["direct"] = complex_json(direct);
  j["abs_err"] = abs_err;
  double tol_abs = opts.tol * sum_r;
  j["tol_abs"] = tol_abs;
  bool ok = abs_err <= tol_abs;
  j["pass"] = ok;
  emit(j, opts);
  return ok ? kExitPass : kExitMathFail;
}

int run_verify(const std::string& suite, const GlobalOptions& opts) {
  wavenum::verify::VerifyConfig cfg;
  cfg.seed = opts.seed;
  cfg.trials = opts.trials;
  cfg.tol_scale = opts.tol;
  wavenum::verify::SuiteResult result = wavenum::verify::run_suite(suite, cfg);
  emit(wavenum::verify::report_json(result, !opts.no_timestamp), opts);
  return result.passed() ? kExitPass : kExitMathFail;
}

ordered_json rational_or_double(double value, const std::optional<wavenum::exact::Rational>& tag) {
  if (tag) return ordered_json(wavenum::exact::to_string(*tag));
  return ordered_json(value);
}

int run_wave(const std::string& expr_text, const std::string& action, std::optional<double> rho,
             const GlobalOptions& opts) {
  namespace wave = wavenum::wave;
  wave::WaveExpr e = wavenum::lang::parse_wave(expr_text);

  if (action == "eval") {
    if (!rho) throw CLI::RequiredError("--rho is required for eval");
    Complex v = wave::eval(e, *rho);
    ordered_json j;
    j["rho"] = *rho;
    j["value"] = complex_json(v);
    emit(j, opts);
    return kExitPass;
  }

  if (action == "spin") {
    ordered_json j;
    j["spin"] = wave::spin(e);
    j["rotation"] = wave::rotation(e);
    if (auto s = wave::spin_rational(e)) j["spin_exact"] = wavenum::exact::to_string(*s);
    if (auto r = wave::rotation_rational(e)) j["rotation_exact"] = wavenum::exact::to_string(*r);
    emit(j, opts);
    return kExitPass;
  }

  if (action == "project") {
    Complex v = wave::project(e);
    ordered_json j;
    j["re"] = v.real();
    j["im"] = v.imag();
    emit(j, opts);
    return kExitPass;
  }

  if (action == "period") {
    wavenum::exact::PeriodReport rep = wavenum::exact::periodicity(e);
    ordered_json j;
    j["status"] = wavenum::exact::to_string(rep.status);
    if (rep.period) j["period"] = wavenum::exact::to_string(*rep.period);
    emit(j, opts);
    return kExitPass;
  }

  // canon: factor out w(f,theta) and verify the factorization pointwise
  // before reporting it.
  wave::WaveCanonical canon = wave::canonicalize(e);
  wave::WaveExpr recon = wave::mul(canon.amp, wave::gen(canon.f, canon.theta));
  double worst = 0.0;
  int checked = 0;
  for (double sample : wavenum::verify::sample_grid(opts.seed)) {
    wave::EvalInfo lhs = wave::eval_info(e, sample);
    wave::EvalInfo rhs = wave::eval_info(recon, sample);
    if (std::min(lhs.min_inv_mag, rhs.min_inv_mag) < 1e-6) continue;
    ++checked;
    worst = std::max(worst,
                     std::abs(lhs.value - rhs.value) / std::max(lhs.scale, rhs.scale));
  }
  ordered_json j;
  j["f"] = rational_or_double(canon.f, wave::spin_rational(e));
  j["theta"] = rational_or_double(canon.theta, wave::rotation_rational(e));
  j["amp"] = wavenum::lang::print_wave(canon.amp);
  j["recon_rel_err"] = worst;
  j["checked_samples"] = checked;
  bool ok = checked > 0 && worst <= 1e-10;
  j["pass"] = ok;
  emit(j, opts);
  return ok ? kExitPass : kExitMathFail;
}

int run_sample(const std::string& expr_text, double rho_min, double rho_max, std::int64_t count) {
  if (count < 2) throw CLI::ValidationError("count must be at least 2");
  if (!(rho_min < rho_max)) throw CLI::ValidationError("rho_min must be less than rho_max");
  wavenum::wave::WaveExpr e = wavenum::lang::parse_wave(expr_text);

  std::string out = "rho,re,im\n";
  double step = (rho_max - rho_min) / static_cast<double>(count - 1);
  for (std::int64_t i = 0; i < count; ++i) {
    double rho = i + 1 == count ? rho_max : rho_min + step * static_cast<double>(i);
    wavenum::wave::EvalInfo info = wavenum::wave::eval_info(e, rho);
    if (info.pole()) {
      out += shortest(rho);
      out += ",, #pole\n";
    } else {
      out += shortest(rho);
      out += ',';
      out += shortest(info.value.real());
      out += ',';
      out += shortest(info.value.imag());
      out += '\n';
    }
  }
  std::cout << out;
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Canonical forms for finite sums of complex exponentials and the\n"
      "pointwise algebra of wave expressions w(f,theta): rho -> e^{i2pi(f rho+theta)}.\n"
      "Generator parameters in expressions are in turns; term phases in the\n"
      "JSON schema are in radians."};
  app.require_subcommand(1);

  GlobalOptions opts;
  app.add_option("--seed", opts.seed, "seed for all randomized checks")->capture_default_str();
  app.add_option("--trials", opts.trials, "trial count override (0 keeps suite defaults)")
      ->capture_default_str();
  app.add_option("--tol", opts.tol, "tolerance scale on sum(r) for canon/verify")
      ->capture_default_str();
  app.add_flag("--json", opts.compact_json, "compact single-line JSON output");
  app.add_flag("--no-timestamp", opts.no_timestamp, "omit elapsed time from reports");

  auto* canon = app.add_subcommand(
      "canon", "canonicalize a term list {\"terms\":[{\"r\":..,\"theta\":..},..]} (theta radians)");
  // Accept the global options on either side of the subcommand name.
  canon->fallthrough();
  std::string canon_input = "-";
  std::string canon_method;
  canon->add_option("input", canon_input, "terms JSON file, or - for stdin")
      ->capture_default_str();
  canon->add_option("--method", canon_method, "prop1|prop2|prop3|prop4")
      ->required()
      ->check(CLI::IsMember({"prop1", "prop2", "prop3", "prop4"}));

  auto* verify = app.add_subcommand("verify", "run a seeded verification suite");
  verify->fallthrough();
  std::string suite;
  verify->add_option("suite", suite, "oracle|crossform|permutation|cyclic|field|conservation|period|branch")
      ->required();

  auto* wave_cmd = app.add_subcommand("wave", "operate on a wave expression (theta in turns)");
  wave_cmd->fallthrough();
  std::string wave_expr;
  std::string wave_action;
  double wave_rho = 0.0;
  wave_cmd->add_option("expr", wave_expr, "expression, e.g. \"w(1,1/4)*w(2,1/4)\"")->required();
  wave_cmd->add_option("action", wave_action, "eval|canon|spin|project|period")
      ->required()
      ->check(CLI::IsMember({"eval", "canon", "spin", "project", "period"}));
  auto* rho_opt = wave_cmd->add_option("--rho", wave_rho, "evaluation point (required for eval)");

  auto* sample = app.add_subcommand("sample", "CSV trace rho,re,im over a uniform grid");
  sample->fallthrough();
  std::string sample_expr;
  double rho_min = 0.0, rho_max = 1.0;
  std::int64_t count = 0;
  sample->add_option("expr", sample_expr, "expression to sample")->required();
  sample->add_option("rho_min", rho_min, "left endpoint")->required();
  sample->add_option("rho_max", rho_max, "right endpoint")->required();
  sample->add_option("count", count, "number of rows (>= 2)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (canon->parsed()) return run_canon(canon_input, canon_method, opts);
    if (verify->parsed()) return run_verify(suite, opts);
    if (wave_cmd->parsed()) {
      std::optional<double> rho;
      if (rho_opt->count() > 0) rho = wave_rho;
      return run_wave(wave_expr, wave_action, rho, opts);
    }
    if (sample->parsed()) return run_sample(sample_expr, rho_min, rho_max, count);
    std::cerr << "no subcommand\n";
    return kExitUsage;
  } catch (const wavenum::lang::ParseError& e) {
    std::cerr << "parse error at [" << e.span.start << "," << e.span.end << "): " << e.what()
              << "; expected";
    for (const auto& name : e.expected) std::cerr << " " << name;
    std::cerr << "\n";
    return kExitUsage;
  } catch (const wavenum::lang::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const wavenum::wave::PoleError& e) {
    std::cerr << e.what() << "\n";
    return kExitMathFail;
  } catch (const wavenum::exact::VerificationFailed& e) {
    std::cerr << e.what() << "\n";
    return kExitMathFail;
  } catch (const wavenum::exact::OverflowError& e) {
    std::cerr << e.what() << "\n";
    return kExitMathFail;
  } catch (const wavenum::expsum::NearCancellation& e) {
    std::cerr << e.what() << "\n";
    return kExitMathFail;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    // ZeroAmplitude, DivisionByZero, NonPositive: precondition violations.
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitMathFail;
  }
}
