// End-to-end checks of the command-line surface: runs the built binary and
// inspects its output files and exit codes.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "casimir/cone.hpp"
#include "casimir/sweep.hpp"
#include "casimir/verify.hpp"

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(CLI_BINARY_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string tmp_path(const char* name) {
  return std::string("cli_test_") + name + ".csv";
}

}  // namespace

TEST_CASE("cone subcommand reproduces the plane value") {
  const RunResult r = run("cone --theta0 90 --theta 180 --deg --machine");
  CHECK(r.exit_code == 0);
  double u = 0;
  REQUIRE(std::sscanf(r.output.c_str(), "cone u_hat=%lf", &u) == 1);
  CHECK(u == Catch::Approx(-3.0 / (8.0 * casimir::kPi)).epsilon(1e-6));
}

TEST_CASE("cone rejects theta <= theta0 with a named invariant") {
  const RunResult r = run("cone --theta0 1.0 --theta 0.5");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("theta must exceed theta0") != std::string::npos);
}

TEST_CASE("cone on-axis golden value at theta0 = 60 deg") {
  const RunResult r = run("cone --theta0 60 --theta 180 --deg --machine");
  CHECK(r.exit_code == 0);
  double u = 0;
  REQUIRE(std::sscanf(r.output.c_str(), "cone u_hat=%lf", &u) == 1);
  // golden from an independent arbitrary-precision evaluation
  CHECK(u == Catch::Approx(-0.036107928961348749728).epsilon(1e-8));
}

TEST_CASE("degree flag is exact") {
  // --deg X must equal radians X*pi/180 to the last bit: identical bytes
  const std::string p1 = tmp_path("deg"), p2 = tmp_path("rad");
  const double rad = 100.0 * casimir::kPi / 180.0;
  char radbuf[64];
  std::snprintf(radbuf, sizeof radbuf, "%.17g", rad);
  const RunResult r1 =
      run("sweep --theta0-start 100 --theta 180 --deg --output " + p1);
  const RunResult r2 = run("sweep --theta0-start " + std::string(radbuf) +
                           " --theta 3.141592653589793 --output " + p2);
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(p1) == slurp(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("sweep CSV format and determinism across thread counts") {
  const std::string p1 = tmp_path("t1"), p2 = tmp_path("t2");
  const std::string grid =
      "sweep --theta0-start 0.6 --theta0-stop 1.4 --theta0-count 3 "
      "--theta-start 1.8 --theta-stop 3.0 --theta-count 3 --output ";
  const RunResult r1 = run("  " + grid + p1 + "  ");
  setenv("CASIMIR_THREADS", "1", 1);
  const RunResult r2 = run(grid + p2);
  unsetenv("CASIMIR_THREADS");
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);

  const std::string c1 = slurp(p1);
  CHECK(c1 == slurp(p2));  // byte determinism regardless of parallelism
  CHECK(c1.rfind("theta0,theta,u_hat,u_hat_scaled,err,m_max\n", 0) == 0);

  // row-major theta0-then-theta order, 9 data rows
  int lines = 0;
  for (char ch : c1)
    if (ch == '\n') ++lines;
  CHECK(lines == 10);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("degenerate sweep exits with an error") {
  const RunResult r = run(
      "sweep --theta0-start 2.0 --theta0-stop 2.5 --theta0-count 2 "
      "--theta-start 0.5 --theta-stop 1.0 --theta-count 2 --output should_not_exist.csv");
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("theta must exceed theta0") != std::string::npos);
}

TEST_CASE("single-point sweep at the plane geometry") {
  const std::string p = tmp_path("plane");
  const RunResult r = run("sweep --theta0-start 1.5707963267948966 --theta "
                          "3.141592653589793 --output " + p);
  REQUIRE(r.exit_code == 0);
  const std::string csv = slurp(p);
  // one data row carrying u_hat_scaled ~ -0.11937
  std::istringstream is(csv);
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  double th0, th, u, us;
  REQUIRE(std::sscanf(row.c_str(), "%lf,%lf,%lf,%lf", &th0, &th, &u, &us) == 4);
  CHECK(us == Catch::Approx(-0.11937).epsilon(1e-3));
  std::remove(p.c_str());
}

TEST_CASE("wedge subcommand prints closed and relative values") {
  const RunResult r = run("wedge --theta0 45 --theta 180 --deg --ref-theta 120 --machine");
  CHECK(r.exit_code == 0);
  double closed = 0, rel = 0, closed_diff = 0;
  REQUIRE(std::sscanf(r.output.c_str(),
                      "wedge u_hat_closed=%lf relative=%lf closed_diff=%lf", &closed, &rel,
                      &closed_diff) == 3);
  CHECK(closed == Catch::Approx(-0.04884899659370587).epsilon(1e-10));
  CHECK(rel == Catch::Approx(closed_diff).epsilon(1e-7));
}

TEST_CASE("thermal tau = 0 matches cone output") {
  const RunResult rt = run("thermal --tau 0 --theta0 1.0471975511965976 --theta 2.5 --machine");
  const RunResult rc = run("cone --theta0 1.0471975511965976 --theta 2.5 --machine");
  REQUIRE(rt.exit_code == 0);
  REQUIRE(rc.exit_code == 0);
  double ut = 0, uc = 0;
  REQUIRE(std::sscanf(rt.output.c_str(), "thermal u_hat=%lf", &ut) == 1);
  REQUIRE(std::sscanf(rc.output.c_str(), "cone u_hat=%lf", &uc) == 1);
  CHECK(ut == uc);
}

TEST_CASE("verify fast level passes") {
  const RunResult r = run("verify --level fast");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("FAIL") == std::string::npos);
  CHECK(r.output.find("plane on-axis") != std::string::npos);
  CHECK(r.output.find("Wronskian") != std::string::npos);
}

TEST_CASE("tampering sentinel: a negated ghost term breaks the plane identity") {
  using namespace casimir;
  QuadSpec spec;
  const EnergyResult res = cone_energy_on_axis(1.0, kPi / 2, spec);
  const double tampered = res.electric + res.magnetic - res.ghost;
  const double want = -3.0 / (8.0 * kPi);
  // the untampered value passes at 1e-6, the tampered one must fail clearly
  CHECK(std::fabs(res.u_hat - want) / std::fabs(want) < 1e-6);
  CHECK(std::fabs(tampered - want) / std::fabs(want) > 1e-2);
}
