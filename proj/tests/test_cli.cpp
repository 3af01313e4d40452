#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

// Runs the CLI with stderr folded into stdout; args are appended verbatim.
RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(WAVENUM_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.output.append(buf.data(), n);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string write_fixture(const std::string& name, const std::string& content) {
  std::ofstream out(name, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  out << content;
  out.close();
  return name;
}

json parse_output(const RunResult& r) {
  CAPTURE(r.output);
  return json::parse(r.output);
}

}  // namespace

TEST_CASE("canon computes the worked two-term example") {
  std::string path = write_fixture(
      "cli_two_term.json",
      R"({"terms":[{"r":1.0,"theta":0.0},{"r":1.0,"theta":1.5707963267948966}]})");
  for (const char* method : {"prop1", "prop2", "prop3"}) {
    RunResult r = run_cli("canon " + path + " --method " + method);
    CAPTURE(method);
    CAPTURE(r.output);
    CHECK(r.exit_code == 0);
    json j = parse_output(r);
    CHECK(j["method"] == method);
    CHECK(std::abs(j["A"]["re"].get<double>() - 1.0) <= 1e-12);
    CHECK(std::abs(j["A"]["im"].get<double>() + 1.0) <= 1e-12);
    CHECK(std::abs(j["phi"].get<double>() - 1.5707963267948966) <= 1e-12);
    CHECK(j["pass"] == true);
  }
  RunResult r4 = run_cli("canon " + path + " --method prop4");
  CHECK(r4.exit_code == 0);
  json j4 = parse_output(r4);
  CHECK(std::abs(j4["sigma"].get<double>() - 0.7853981633974483) <= 1e-12);
  CHECK(std::abs(j4["A"]["re"].get<double>() - std::sqrt(2.0)) <= 1e-12);
}

TEST_CASE("canon reads stdin when the input is '-'") {
  std::string path = write_fixture("cli_stdin.json", R"({"terms":[{"r":2.0,"theta":0.0}]})");
  RunResult r = run_cli("canon - --method prop2 < " + path);
  CHECK(r.exit_code == 0);
  json j = parse_output(r);
  CHECK(std::abs(j["A"]["re"].get<double>() - 2.0) <= 1e-12);
}

TEST_CASE("canon rejects zero amplitudes for log-based methods with exit 2") {
  std::string path = write_fixture("cli_zero_r.json",
                                   R"({"terms":[{"r":0.0,"theta":0.5},{"r":1.0,"theta":0.0}]})");
  RunResult r = run_cli("canon " + path + " --method prop1");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("r > 0") != std::string::npos);
  // prop2 accepts the same input.
  RunResult ok = run_cli("canon " + path + " --method prop2");
  CHECK(ok.exit_code == 0);
}

TEST_CASE("canon usage errors exit 2") {
  std::string path = write_fixture("cli_ok.json", R"({"terms":[{"r":1.0,"theta":0.0}]})");
  CHECK(run_cli("canon " + path).exit_code == 2);                     // missing --method
  CHECK(run_cli("canon " + path + " --method prop9").exit_code == 2); // unknown method
  CHECK(run_cli("canon no_such_file.json --method prop2").exit_code == 2);
  std::string bad = write_fixture("cli_bad.json", R"({"trms":[]})");
  RunResult r = run_cli("canon " + bad + " --method prop2");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("trms") != std::string::npos);
  std::string garbage = write_fixture("cli_garbage.json", "not json");
  RunResult g = run_cli("canon " + garbage + " --method prop2");
  CHECK(g.exit_code == 2);
  CHECK(g.output.find("$") != std::string::npos);
}

TEST_CASE("verify subcommand emits a deterministic report") {
  RunResult a = run_cli("--json --no-timestamp verify cyclic --trials 50");
  RunResult b = run_cli("--json --no-timestamp verify cyclic --trials 50");
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
  json j = parse_output(a);
  CHECK(j["suite"] == "cyclic");
  CHECK(j["trials"] == 50);
  CHECK(j["pass"] == true);
  CHECK_FALSE(j.contains("elapsed_ms"));

  RunResult t = run_cli("--json verify cyclic --trials 10");
  json jt = parse_output(t);
  CHECK(jt.contains("elapsed_ms"));

  CHECK(run_cli("verify nope").exit_code == 2);
}

TEST_CASE("wave canon factors the spin and rotation") {
  RunResult r = run_cli("wave \"w(1,1/4)*w(2,1/4)\" canon");
  CHECK(r.exit_code == 0);
  json j = parse_output(r);
  CHECK(j["f"] == "3");
  CHECK(j["theta"] == "1/2");
  CHECK(j["pass"] == true);
  CHECK(j["recon_rel_err"].get<double>() <= 1e-10);
}

TEST_CASE("wave eval and project") {
  RunResult r = run_cli("wave \"w(1,1/4)\" eval --rho 0.25");
  CHECK(r.exit_code == 0);
  json j = parse_output(r);
  // e^{i*2pi*(0.25+0.25)} = -1.
  CHECK(std::abs(j["value"]["re"].get<double>() + 1.0) <= 1e-12);
  CHECK(std::abs(j["value"]["im"].get<double>()) <= 1e-12);

  RunResult p = run_cli("wave \"w(5,1/4)\" project");
  CHECK(p.exit_code == 0);
  json jp = parse_output(p);
  CHECK(std::abs(jp["re"].get<double>()) <= 1e-12);
  CHECK(std::abs(jp["im"].get<double>() - 1.0) <= 1e-12);

  // eval without --rho is a usage error.
  CHECK(run_cli("wave \"w(1,0)\" eval").exit_code == 2);
}

TEST_CASE("wave period stringifies the exact period") {
  RunResult r = run_cli("wave \"w(2/3,0)+w(1/2,0)\" period");
  CHECK(r.exit_code == 0);
  json j = parse_output(r);
  CHECK(j["status"] == "periodic");
  CHECK(j["period"] == "6");

  RunResult c = run_cli("wave \"const(2.0,0.0)\" period");
  CHECK(parse_output(c)["status"] == "constant");

  RunResult u = run_cli("wave \"w(0.5,0)\" period");
  CHECK(parse_output(u)["status"] == "unknown");
}

TEST_CASE("wave spin reports both float and exact forms") {
  RunResult r = run_cli("wave \"w(1,1/4)*w(2,1/4)\" spin");
  CHECK(r.exit_code == 0);
  json j = parse_output(r);
  CHECK(j["spin"].get<double>() == 3.0);
  CHECK(j["spin_exact"] == "3");
  CHECK(j["rotation"].get<double>() == 0.5);
  CHECK(j["rotation_exact"] == "1/2");
}

TEST_CASE("wave parse errors exit 2 and poles exit 1") {
  RunResult bad = run_cli("wave \"w(1,0) + + w(2,0)\" eval --rho 0");
  CHECK(bad.exit_code == 2);

  // 1/(w(0,0) + w(0,1/2)) = 1/0 everywhere.
  RunResult pole = run_cli("wave \"inv(w(0,0)+w(0,1/2))\" eval --rho 0.3");
  CHECK(pole.exit_code == 1);
  CHECK(pole.output.find("pole") != std::string::npos);
}

TEST_CASE("sample emits CSV with pole rows marked") {
  RunResult r = run_cli("sample \"w(1,0)\" 0 1 5");
  CHECK(r.exit_code == 0);
  std::istringstream lines(r.output);
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(lines, line))
    if (!line.empty()) rows.push_back(line);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == "rho,re,im");
  CHECK(rows[1].rfind("0,", 0) == 0);
  CHECK(rows[5].rfind("1,", 0) == 0);

  RunResult p = run_cli("sample \"inv(w(0,0)+w(0,1/2))\" 0 1 3");
  CHECK(p.exit_code == 0);
  CHECK(p.output.find("#pole") != std::string::npos);

  CHECK(run_cli("sample \"w(1,0)\" 0 1 1").exit_code == 2);   // count < 2
  CHECK(run_cli("sample \"w(1,0)\" 1 0 5").exit_code == 2);   // min >= max
}

TEST_CASE("help and seed plumbing") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("verify --help").exit_code == 0);
  // Different seeds produce different reports.
  RunResult a = run_cli("--json --no-timestamp --seed 1 verify branch --trials 20");
  RunResult b = run_cli("--json --no-timestamp --seed 2 verify branch --trials 20");
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(a.output != b.output);
}
