// Acceptance gate: every guarantee the library advertises, checked end to
// end. One PASS/FAIL line per criterion; nonzero exit if any fail.
#include "entrosteer/io.hpp"
#include "entrosteer/steering.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <sys/wait.h>

using namespace entrosteer;

namespace {

constexpr double ln_pi_e = 2.1447298858494;

int g_failures = 0;

void report(int n, const char* what, bool ok, const std::string& detail = "") {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << what;
  if (!detail.empty()) std::cout << " [" << detail << "]";
  std::cout << std::endl;
  if (!ok) ++g_failures;
}

std::string num(double v) { return io::format_number(v); }

// --- 1 & 2: connection identity + inequality suite over the mixture corpus --

void criteria_identity_and_inequalities() {
  const std::array<double, 3> widths{0.25, 0.5, 1.0};
  double worst_residual = 0.0;
  double worst_gap = 1e300;
  bool mi_row_ok = true;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t rank = seed < 100 ? 1 : 2;
    const GridDensity d = corpus_density(seed, rank);
    for (double w : widths) {
      const BinningSpec spec = BinningSpec::tile_all(d.axes(), w);
      const ConnectionReport conn = verify_connection(d, spec, LogBase::e);
      worst_residual = std::max(worst_residual, std::abs(conn.residual));
      for (const GapReport& g : gap_suite(d, spec, LogBase::e)) {
        if (!g.applicable) continue;
        worst_gap = std::min(worst_gap, g.gap);
        if (g.id == InequalityId::mutual_xy && g.gap < -1e-10) mi_row_ok = false;
      }
    }
  }
  report(1, "connection identity holds on the 200-case corpus", worst_residual < 1e-10,
         "max |residual| = " + num(worst_residual) + " nats");
  report(2, "inequality suite holds on the 200-case corpus",
         worst_gap >= -1e-10 && mi_row_ok, "min gap = " + num(worst_gap) + " nats");
}

// --- 3: gap tightening for the standard normal ------------------------------

void criterion_tightening() {
  const Axis ax{-8.0, 1.0 / 512.0, 8193};
  std::vector<double> values(ax.count);
  for (std::size_t i = 0; i < ax.count; ++i) {
    const double x = ax.coord(i);
    values[i] = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  }
  const GridDensity normal =
      GridDensity::normalized(std::vector<Axis>{ax}, std::move(values));
  const auto seq = refine_convergence(normal, BinningSpec::tile_all(normal.axes(), 1.0), 3,
                                      InequalityId::marginal_x, LogBase::e);
  // window-mass oracle values from an error-function evaluation
  const std::array<double, 4> oracle{0.0400202866, 0.0103096384, 0.0025974084, 0.0006506182};
  bool ok = seq.size() == 4;
  std::string detail;
  for (std::size_t i = 0; ok && i < 4; ++i) {
    ok = std::abs(seq[i].second - oracle[i]) < 1e-6;
    if (i > 0) ok = ok && seq[i].second < seq[i - 1].second;
    detail += (i ? ", " : "") + num(seq[i].second);
  }
  ok = ok && seq.back().second < 1e-3;
  report(3, "normal-density gap strictly decreases, < 1e-3 nats at width 1/8", ok, detail);
}

// --- 4: continuous steering LHS saturation for the separable model ---------

void criterion_saturation() {
  bool ok = true;
  std::string detail;
  for (std::size_t n : {std::size_t{1}, std::size_t{2}}) {
    const BiphotonParams p = BiphotonParams::isotropic(1.0, 1.0, n);
    const std::vector<double> w{0.5};
    const GridDensity xj = position_joint(p, position_axes(p, w));
    const GridDensity kj = momentum_joint(p, momentum_axes(p, w));
    const double lhs = continuous_steering_lhs(xj, kj, LogBase::e).value;
    const double target = static_cast<double>(n) * ln_pi_e;
    ok = ok && std::abs(lhs - target) < 1e-5;
    detail += (n == 1 ? "n=1: " : "; n=2: ") + num(lhs);
  }
  report(4, "separable model saturates the n log(pi e) bound within 1e-5", ok, detail);
}

// --- 5: no false violations on the separable model --------------------------

void criterion_soundness() {
  const std::array<double, 5> ws{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<std::pair<double, double>> pairs;
  for (double dx : ws)
    for (double dk : ws) pairs.emplace_back(dx, dk);
  const auto reports =
      steering_bin_scan(BiphotonParams::isotropic(1.0, 1.0), pairs, LogBase::e);
  bool ok = true;
  double worst = -1e300;
  for (const SteeringReport& r : reports) {
    worst = std::max(worst, r.margin);
    if (r.violated || r.margin > 1e-9) ok = false;
  }
  report(5, "separable model never flags steering over a 5x5 width grid", ok,
         "max margin = " + num(worst) + " nats");
}

// --- 6: witness power on the strongly entangled model -----------------------

void criterion_power() {
  const SteeringReport r =
      steering_model_test(BiphotonParams::isotropic(1.0, 0.05), 0.05, 0.05, LogBase::e);
  // margin frozen from an independent error-function binning oracle
  const double oracle_margin = 2.2647490413491145;
  const double oracle_rhs = 8.136194432957382;
  const bool ok = r.violated && !r.vacuous && r.margin > 0.0 &&
                  std::abs(r.rhs - oracle_rhs) < 1e-9 &&
                  std::abs(r.margin - oracle_margin) < 5e-3;
  report(6, "entangled model (0.05 widths) violates the witness at the oracle margin", ok,
         "margin = " + num(r.margin) + " vs " + num(oracle_margin) + " nats");
}

// --- 7: refinement consistency ----------------------------------------------

void criterion_refinement() {
  const double sp = 1.0, sm = 0.4;
  const std::vector<std::pair<double, double>> pairs{
      {0.4, 0.4}, {0.2, 0.2}, {0.1, 0.1}, {0.05, 0.05}, {0.025, 0.025}};
  const auto reports = steering_bin_scan(BiphotonParams::isotropic(sp, sm), pairs, LogBase::e);
  const double F = std::pow(sp * sp + sm * sm, 2) / (4.0 * sp * sp * sm * sm);
  const double continuous = ln_pi_e - 0.5 * std::log(F);
  bool ok = reports.size() == pairs.size();
  double prev = 1e300;
  double finest = 0.0;
  for (std::size_t i = 0; ok && i < reports.size(); ++i) {
    finest = reports[i].lhs + std::log(pairs[i].first * pairs[i].second);
    ok = finest <= prev + 1e-10;
    prev = finest;
  }
  ok = ok && std::abs(finest - continuous) < 1e-3;
  report(7, "LHS + log-width sum refines monotonically onto the continuous LHS", ok,
         "finest = " + num(finest) + " vs " + num(continuous) + " nats");
}

// --- 8: CLI contract ---------------------------------------------------------

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd =
      std::string("cd '") + GOLDEN_DIR + "' && '" + ENTROSTEER_BIN + "' " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  RunResult r;
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read_golden(const std::string& name) {
  std::ifstream in(std::string(GOLDEN_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_cli() {
  bool ok = true;
  std::string detail;
  const auto expect_golden = [&](const std::string& args, const std::string& golden) {
    const RunResult r = run_cli(args);
    if (r.exit_code != 0 || r.out != read_golden(golden)) {
      ok = false;
      detail += "golden mismatch: " + golden + "; ";
    }
  };
  expect_golden("entropy uniform4.csv --dx 1", "entropy_uniform.txt");
  expect_golden("--json entropy uniform4.csv --dx 1", "entropy_uniform.json");
  expect_golden("--json entropy unit_square.json --widths 0.5", "entropy_density.json");
  expect_golden("--base e --json verify-connection --model 1,1 --widths 0.5",
                "verify_model.json");
  expect_golden("--base e --json steering --model 1,0.2 --dx 0.2 --dk 0.2",
                "steering_model.json");
  expect_golden("--base e --json scan --model 1,0.2 --dx 0.8,0.4,0.2 --dk 0.8,0.4,0.2",
                "scan_model.json");
  expect_golden("--json probe-cmi unit_cube.json --widths 0.5", "probe_cmi.json");

  const auto expect_exit = [&](const std::string& args, int code) {
    const int got = run_cli(args).exit_code;
    if (got != code) {
      ok = false;
      detail += "exit " + std::to_string(got) + " != " + std::to_string(code) + " for '" + args +
                "'; ";
    }
  };
  std::ofstream("/tmp/entrosteer_accept_bad.csv") << "x,prob\n0.5,oops\n";
  std::ofstream("/tmp/entrosteer_accept_neg.json")
      << R"({"type":"density","axes":[{"origin":0,"step":0.5,"count":3}],"values":[1,-1,1]})";
  expect_exit("--help", 0);
  expect_exit("entropy /tmp/entrosteer_accept_bad.csv --dx 1", 2);
  expect_exit("entropy /tmp/entrosteer_accept_neg.json", 3);
  expect_exit("--json entropy unit_square.json --widths 0.3", 3);
  expect_exit("entropy", 5);
  expect_exit("--base 7 entropy uniform4.csv --dx 1", 5);
  std::remove("/tmp/entrosteer_accept_bad.csv");
  std::remove("/tmp/entrosteer_accept_neg.json");

  for (const char* name : {"entropy_uniform.json", "entropy_density.json", "verify_model.json",
                           "steering_model.json", "scan_model.json", "probe_cmi.json"}) {
    const std::string text = read_golden(name);
    if (nlohmann::ordered_json::parse(text).dump(2) + "\n" != text) {
      ok = false;
      detail += std::string("round-trip not byte-identical: ") + name + "; ";
    }
  }
  report(8, "CLI golden files, exit-code table and JSON round-trip", ok, detail);
}

}  // namespace

int main() {
  criteria_identity_and_inequalities();
  criterion_tightening();
  criterion_saturation();
  criterion_soundness();
  criterion_power();
  criterion_refinement();
  criterion_cli();
  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all acceptance criteria passed" << std::endl;
  return 0;
}
