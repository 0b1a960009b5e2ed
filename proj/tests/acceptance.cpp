// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Usage: acceptance <path-to-lobosc-binary>
//
// Criteria 1-7 exercise the library in-process; criterion 8 drives the
// installed command-line binary end to end.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lobosc/checks.hpp"
#include "lobosc/eigenfunctions.hpp"
#include "lobosc/eigensolver.hpp"
#include "lobosc/geometry.hpp"
#include "lobosc/oracle.hpp"
#include "lobosc/spheroidal.hpp"

#ifndef LOBOSC_SOURCE_DIR
#error "LOBOSC_SOURCE_DIR must point at the repository root"
#endif

namespace fs = std::filesystem;
using namespace lobosc;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "  " << detail << "\n";
  if (!ok) ++g_failures;
}

// run a criterion, catching everything so one crash cannot mask the rest
void criterion(const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(name, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---- criterion 8 helpers ---------------------------------------------------

struct CmdResult {
  int code = -1;
  std::string out;
};

std::string g_binary;
fs::path g_scratch;

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

CmdResult run_binary(const std::string& args, const std::string& tag) {
  const fs::path out_file = g_scratch / (tag + ".stdout");
  const fs::path err_file = g_scratch / (tag + ".stderr");
  const std::string cmd = "\"" + g_binary + "\" " + args + " > \"" +
                          out_file.string() + "\" 2> \"" + err_file.string() +
                          "\"";
  const int raw = std::system(cmd.c_str());
  CmdResult r;
  r.code = (raw == -1) ? -1 : WEXITSTATUS(raw);
  r.out = slurp(out_file);
  return r;
}

std::vector<std::vector<double>> parse_csv_rows(const std::string& text,
                                                const std::string& header,
                                                bool* header_ok) {
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      saw_header = true;
      if (header_ok != nullptr) *header_ok = (line == header);
      continue;
    }
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(std::move(row));
  }
  if (!saw_header && header_ok != nullptr) *header_ok = false;
  return rows;
}

// ---- criteria ----------------------------------------------------------------

void c1_reference_levels() {
  const std::string name = "reference_levels_q0.5";
  const auto g = oracle::read_golden(std::string(LOBOSC_SOURCE_DIR) +
                                     "/data/golden/spectrum_q0.5_m0.json");
  const auto p = geometry::params_from_q(0.5, 1.0);
  const auto sp = eigensolver::eigenvalues(p, 2, 1e-10);
  double worst = 0.0;
  bool ok = sp.size() == 3;
  for (int n = 0; ok && n <= 2; ++n) {
    const double diff = std::abs(sp[n].E_tilde - g.values[n].E_tilde);
    const double budget = g.values[n].err + sp[n].err + 1e-8;
    worst = std::max(worst, diff / budget);
    if (diff > budget) ok = false;
  }
  report(name, ok, "max |shooting - reference| = " + fmt(worst) +
                       " of the combined error budget (must be <= 1)");
}

void c2_flat_limit_levels() {
  const std::string name = "flat_limit_levels";
  const auto at5 = eigensolver::eigenvalues(geometry::params_from_q(5.0, 1.0), 2, 1e-10);
  const auto at50 = eigensolver::eigenvalues(geometry::params_from_q(50.0, 1.0), 2, 1e-10);
  bool ok = true;
  double worst_ratio = 0.0;
  for (int n = 0; n <= 2; ++n) {
    const double d5 = at5[n].E_tilde / 10.0 - (2 * n + 1);
    const double d50 = at50[n].E_tilde / 100.0 - (2 * n + 1);
    if (!(d5 > 0.0 && d50 > 0.0)) ok = false;
    const double ratio = d50 / d5;
    worst_ratio = std::max(worst_ratio, ratio);
    if (!(ratio < 0.25)) ok = false;
  }
  report(name, ok, "levels exceed 2n+1 and the excess shrinks: worst "
                       "d(q=50)/d(q=5) = " + fmt(worst_ratio) + " (< 0.25)");
}

void c3_strong_curvature() {
  const std::string name = "strong_curvature_ground_level";
  const auto lo = eigensolver::eigenvalues(geometry::params_from_q(0.1, 1.0), 0, 1e-10);
  const auto un = eigensolver::eigenvalues(geometry::params_from_q(1.0, 1.0), 0, 1e-10);
  const double r_lo = lo[0].E_tilde / 0.2;
  const double r_un = un[0].E_tilde / 2.0;
  const bool ok = r_lo > 2.0 * r_un;
  report(name, ok, "E0/omega at q=0.1 is " + fmt(r_lo) + " vs " + fmt(r_un) +
                       " at q=1 (must more than double)");
}

void c4_oracle_agreement() {
  const std::string name = "independent_method_agreement";
  bool ok = true;
  double worst = 0.0;
  for (double q : {0.5, 5.0}) {
    const auto p = geometry::params_from_q(q, 1.0);
    const auto sp = eigensolver::eigenvalues(p, 2, 1e-10);
    const auto ev = oracle::eigenvalues(p, 0, 3, {});
    for (int n = 0; n <= 2; ++n) {
      const double rel = std::abs(sp[n].E_tilde - ev[n].value) /
                         std::abs(ev[n].value);
      worst = std::max(worst, rel);
      if (!(rel <= 1e-4)) ok = false;
    }
  }
  report(name, ok, "worst relative gap shooting vs matrix method = " +
                       fmt(worst) + " (<= 1e-4)");
}

void c5_orthonormality() {
  const std::string name = "orthonormal_states_q0.5";
  const auto p = geometry::params_from_q(0.5, 1.0);
  eigensolver::SolverConfig scfg;
  scfg.shoot.rtol = 1e-11;
  const auto sp = eigensolver::eigenvalues(p, 2, 1e-11, scfg);
  eigenfunctions::SampleConfig cfg;
  cfg.shoot.rtol = 1e-11;
  cfg.rho_max = eigenfunctions::default_rho_max(sp[2].E, p);
  std::vector<eigenfunctions::RadialFunction> fs;
  for (int n = 0; n <= 2; ++n)
    fs.push_back(eigenfunctions::sample_radial(sp[n], p, cfg));
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      const double ov = eigenfunctions::overlap(fs[i], fs[j]);
      worst = std::max(worst, std::abs(ov - (i == j ? 1.0 : 0.0)));
    }
  }
  const bool ok = worst <= 1e-6;
  report(name, ok, "worst Gram defect = " + fmt(worst) + " (<= 1e-6)");
}

void c6_flat_limit_shapes() {
  const std::string name = "flat_limit_shapes";
  bool ok = true;
  std::string detail;

  // overlaps with the flat reference grow toward 1 as curvature fades
  double final_min = 1.0;
  for (int n = 0; n <= 2; ++n) {
    double prev = -1.0;
    for (double a2 : {1.0, 10.0, 100.0}) {
      const auto p = geometry::params_from_a2(a2, 1.0);
      eigensolver::SolverConfig scfg;
      scfg.shoot.rtol = 1e-11;
      const auto sp = eigensolver::eigenvalues(p, n, 1e-11, scfg);
      const double rho_curved = eigenfunctions::default_rho_max(sp[n].E, p);
      const double rho_flat =
          eigenfunctions::default_rho_max_flat(2.0 * n + 1.0, 1.0);
      const double rho_pair = std::max(rho_curved, rho_flat);
      eigenfunctions::SampleConfig cfg;
      cfg.shoot.rtol = 1e-11;
      cfg.rho_max = rho_pair;
      const auto f = eigenfunctions::sample_radial(sp[n], p, cfg);
      const auto ref = eigenfunctions::flat_eigenfunction(n, 1.0, rho_pair, 2000);
      const double ov = eigenfunctions::overlap(f, ref);
      if (!(ov > prev)) ok = false;
      prev = ov;
    }
    if (!(prev >= 0.95)) ok = false;
    final_min = std::min(final_min, prev);
  }
  detail = "overlaps rise with a^2; min at a^2 = 100 is " + fmt(final_min) +
           " (>= 0.95)";

  // higher states sit farther out, strictly, in both geometries
  const auto p1 = geometry::params_from_a2(1.0, 1.0);
  eigensolver::SolverConfig scfg;
  scfg.shoot.rtol = 1e-11;
  const auto sp1 = eigensolver::eigenvalues(p1, 2, 1e-11, scfg);
  eigenfunctions::SampleConfig cfg1;
  cfg1.shoot.rtol = 1e-11;
  cfg1.rho_max = eigenfunctions::default_rho_max(sp1[2].E, p1);
  double prev_mean = 0.0, prev_r90 = 0.0;
  for (int n = 0; n <= 2; ++n) {
    const auto f = eigenfunctions::sample_radial(sp1[n], p1, cfg1);
    const auto c = eigenfunctions::concentration(f);
    if (!(c.mean_rho > prev_mean && c.r90 > prev_r90)) ok = false;
    prev_mean = c.mean_rho;
    prev_r90 = c.r90;
  }
  prev_mean = prev_r90 = 0.0;
  for (int n = 0; n <= 2; ++n) {
    const auto f = eigenfunctions::flat_eigenfunction(n, 1.0);
    const auto c = eigenfunctions::concentration(f);
    if (!(c.mean_rho > prev_mean && c.r90 > prev_r90)) ok = false;
    prev_mean = c.mean_rho;
    prev_r90 = c.r90;
  }
  report(name, ok, detail + "; concentration radii increase with n");
}

void c7_equation_residual() {
  const std::string name = "equation_residual";
  const auto g = oracle::read_golden(std::string(LOBOSC_SOURCE_DIR) +
                                     "/data/golden/spectrum_q0.5_m0.json");
  const auto p = geometry::params_from_q(0.5, 1.0);
  spheroidal::ShootingConfig cfg;
  const double clean = checks::ode_residual(g.values[0].E_tilde, p, 50, cfg);
  spheroidal::ShootingConfig bug = cfg;
  bug.flip_lambda_sign = true;
  const double flipped = checks::ode_residual(g.values[0].E_tilde, p, 50, bug);
  const bool ok = clean <= 100 * cfg.rtol && flipped > 1e-3;
  report(name, ok, "clean solve residual = " + fmt(clean) +
                       " (<= " + fmt(100 * cfg.rtol) +
                       "); planted sign bug measures " + fmt(flipped) +
                       " (> 1e-3)");
}

void c8_cli_end_to_end() {
  const std::string name = "cli_end_to_end";
  bool ok = true;
  std::vector<std::string> notes;

  // a 40-point logarithmic sweep over the full regime, written to a file
  const fs::path sweep_file = g_scratch / "sweep.csv";
  const auto sw = run_binary("sweep --q-min 0.25 --q-max 50 --points 40 "
                             "--n-max 2 --out \"" + sweep_file.string() + "\"",
                             "sweep");
  if (sw.code != 0) {
    ok = false;
    notes.push_back("sweep exit " + std::to_string(sw.code));
  }
  bool header_ok = false;
  const auto rows = parse_csv_rows(slurp(sweep_file),
                                   "q,n,E_tilde,E_over_omega", &header_ok);
  if (!header_ok) {
    ok = false;
    notes.push_back("bad sweep header");
  }
  if (rows.size() != 40 * 3) {
    ok = false;
    notes.push_back("sweep rows = " + std::to_string(rows.size()));
  } else {
    // endpoints land exactly; E/omega falls monotonically with q per level
    if (rows.front()[0] != 0.25 || rows.back()[0] != 50.0) {
      ok = false;
      notes.push_back("sweep endpoints off");
    }
    for (int n = 0; n <= 2 && ok; ++n) {
      double prev = 1e300;
      for (std::size_t i = n; i < rows.size(); i += 3) {
        if (static_cast<int>(rows[i][1]) != n) {
          ok = false;
          notes.push_back("row order broken");
          break;
        }
        if (!(rows[i][3] < prev)) {
          ok = false;
          notes.push_back("E/omega not decreasing at q = " + fmt(rows[i][0]));
          break;
        }
        prev = rows[i][3];
      }
    }
    // the sweep's endpoint must agree with a direct spectrum call
    const auto direct = eigensolver::eigenvalues(
        geometry::params_from_q(50.0, 1.0), 2, 1e-10);
    for (int n = 0; ok && n <= 2; ++n) {
      const double table = rows[rows.size() - 3 + n][2];
      if (std::abs(table - direct[n].E_tilde) >
          1e-9 * std::max(1.0, std::abs(direct[n].E_tilde))) {
        ok = false;
        notes.push_back("sweep endpoint differs from direct solve");
      }
    }
  }

  // determinism: identical bytes on identical invocations
  const auto s1 = run_binary("spectrum --q 5 --n-max 2", "spec1");
  const auto s2 = run_binary("spectrum --q 5 --n-max 2", "spec2");
  if (s1.code != 0 || s1.out != s2.out || s1.out.empty()) {
    ok = false;
    notes.push_back("spectrum runs not reproducible");
  }

  // exit codes: usage error -> 1, planted bug in verify -> 3, clean verify -> 0
  const auto usage = run_binary("spectrum --q 1 --a2 4", "usage");
  if (usage.code != 1) {
    ok = false;
    notes.push_back("usage exit " + std::to_string(usage.code));
  }
  const auto planted = run_binary(
      "verify --inject-lambda-sign-bug --oracle-n 4096", "planted");
  if (planted.code != 3) {
    ok = false;
    notes.push_back("planted-bug verify exit " + std::to_string(planted.code));
  }
  const auto verify = run_binary("verify", "verify");
  if (verify.code != 0) {
    ok = false;
    notes.push_back("verify exit " + std::to_string(verify.code));
  }
  if (verify.out.find("PASS") == std::string::npos) {
    ok = false;
    notes.push_back("verify printed no PASS lines");
  }

  std::string detail = "sweep (40 q), spectrum determinism, exit codes 1/3/0";
  if (!notes.empty()) {
    detail = "problems:";
    for (const auto& s : notes) detail += " [" + s + "]";
  }
  report(name, ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-lobosc-binary>\n";
    return 2;
  }
  g_binary = argv[1];
  g_scratch = fs::temp_directory_path() / "lobosc_acceptance";
  fs::remove_all(g_scratch);
  fs::create_directories(g_scratch);

  criterion("reference_levels_q0.5", c1_reference_levels);
  criterion("flat_limit_levels", c2_flat_limit_levels);
  criterion("strong_curvature_ground_level", c3_strong_curvature);
  criterion("independent_method_agreement", c4_oracle_agreement);
  criterion("orthonormal_states_q0.5", c5_orthonormality);
  criterion("flat_limit_shapes", c6_flat_limit_shapes);
  criterion("equation_residual", c7_equation_residual);
  criterion("cli_end_to_end", c8_cli_end_to_end);

  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all acceptance criteria passed\n";
  return 0;
}
