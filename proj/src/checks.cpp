#include "lobosc/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "lobosc/eigenfunctions.hpp"
#include "lobosc/eigensolver.hpp"
#include "lobosc/errors.hpp"
#include "lobosc/oracle.hpp"

namespace lobosc::checks {

bool VerifyReport::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

double ode_residual(double E_tilde, const geometry::ModelParams& p, int points,
                    const spheroidal::ShootingConfig& cfg) {
  if (points < 1) throw std::domain_error("ode_residual: points >= 1");
  const double xi0 = spheroidal::default_xi_start(p.q, cfg);
  const double lo = cfg.xi_switch * 1.1;
  const double hi = 0.9 * xi0;
  const double lam = -(E_tilde + 0.25);  // rebuilt here, independent of the
  const double q2 = p.q * p.q;           // integration path
  const double ratio = (points == 1) ? 1.0 : std::pow(hi / lo, 1.0 / (points - 1));

  // Five-point stencils around geometrically spaced checkpoints, all fed
  // to a single inward pass.
  std::vector<double> centers(points), deltas(points);
  std::vector<double> targets;
  targets.reserve(5 * points);
  for (int i = 0; i < points; ++i) {
    const double xc = hi / std::pow(ratio, i);  // descending
    const double s = xc * xc - 1.0;
    const double kappa = std::sqrt((std::abs(lam) + q2 * s) / s);
    const double d = 0.015 * std::min(xc - 1.0, 1.0 / kappa);
    centers[i] = xc;
    deltas[i] = d;
    for (int k = 2; k >= -2; --k) targets.push_back(xc + k * d);
  }
  const auto samples = spheroidal::sample_solution(E_tilde, p, targets, cfg);

  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    int top = samples[5 * i].exp;
    for (int k = 1; k < 5; ++k) top = std::max(top, samples[5 * i + k].exp);
    double v[5];
    for (int k = 0; k < 5; ++k) {
      const auto& sm = samples[5 * i + k];
      v[k] = std::ldexp(sm.value, sm.exp - top);
    }
    // v[0] = psi(xc+2d) ... v[4] = psi(xc-2d)
    const double d = deltas[i];
    const double xc = centers[i];
    const double d2 =
        (-v[4] + 16.0 * v[3] - 30.0 * v[2] + 16.0 * v[1] - v[0]) / (12.0 * d * d);
    const double d1 = (v[4] - 8.0 * v[3] + 8.0 * v[1] - v[0]) / (12.0 * d);
    const double om2 = 1.0 - xc * xc;
    const double coef = lam - q2 * om2;  // lambda + 4*theta*(1 - xi^2)
    const double t1 = om2 * d2;
    const double t2 = -2.0 * xc * d1;
    const double t3 = coef * v[2];
    const double r = t1 + t2 + t3;
    const double scale =
        std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
    if (scale > 0.0) worst = std::max(worst, std::abs(r) / scale);
  }
  return worst;
}

namespace {

using eigensolver::Eigenpair;
using geometry::ModelParams;

std::vector<Eigenpair> spectrum_for(double q, const VerifyOptions& opt,
                                    int n_max) {
  const auto p = geometry::params_from_q(q, 1.0);
  eigensolver::SolverConfig scfg;
  scfg.shoot.rtol = opt.rtol;
  return eigensolver::eigenvalues(p, n_max, opt.tol, scfg);
}

CheckResult oracle_agreement(double q, const VerifyOptions& opt) {
  CheckResult c;
  std::ostringstream name;
  name << "oracle_agreement_q" << q;
  c.name = name.str();
  c.threshold = 1e-4;
  const auto p = geometry::params_from_q(q, 1.0);
  oracle::OracleConfig ocfg;
  ocfg.N = opt.oracle_N;
  const auto ref = oracle::eigenvalues(p, 0, 3, ocfg);
  const auto got = spectrum_for(q, opt, 2);
  double worst = 0.0;
  for (int n = 0; n <= 2; ++n) {
    const double rel = std::abs(got[n].E_tilde - ref[n].value) /
                       std::max(1.0, std::abs(ref[n].value));
    worst = std::max(worst, rel);
  }
  c.measured = worst;
  c.passed = worst <= c.threshold;
  return c;
}

CheckResult monotonicity(const VerifyOptions& opt) {
  CheckResult c;
  c.name = "levels_decrease_with_q";
  c.threshold = 0.0;
  const std::vector<double> qs{1.0, 5.0, 20.0};
  int violations = 0;
  std::vector<std::vector<double>> levels;
  for (double q : qs) {
    const auto sp = spectrum_for(q, opt, 2);
    std::vector<double> row;
    for (const auto& ep : sp) row.push_back(ep.E / 1.0);
    levels.push_back(row);
  }
  for (int n = 0; n <= 2; ++n) {
    for (std::size_t i = 1; i < levels.size(); ++i) {
      if (!(levels[i][n] < levels[i - 1][n])) ++violations;
    }
  }
  c.measured = violations;
  c.passed = violations == 0;
  return c;
}

CheckResult small_q_growth(const VerifyOptions& opt) {
  CheckResult c;
  c.name = "ground_level_grows_at_small_q";
  c.threshold = 1.0;
  const double vq_half = spectrum_for(0.5, opt, 0)[0].E;
  const double vq_one = spectrum_for(1.0, opt, 0)[0].E;
  c.measured = vq_half / vq_one;
  c.passed = c.measured > 1.0;
  return c;
}

spheroidal::ShootingConfig tight_shoot(const VerifyOptions& opt) {
  spheroidal::ShootingConfig s;
  s.rtol = std::min(opt.rtol, 1e-11);
  return s;
}

std::vector<eigenfunctions::RadialFunction> states_on_common_grid(
    const std::vector<Eigenpair>& sp, const ModelParams& p, int n_max,
    double extra_rho, const VerifyOptions& opt) {
  double rho_max = extra_rho;
  for (int n = 0; n <= n_max; ++n) {
    rho_max = std::max(rho_max, eigenfunctions::default_rho_max(sp[n].E, p));
  }
  std::vector<eigenfunctions::RadialFunction> out;
  for (int n = 0; n <= n_max; ++n) {
    eigenfunctions::SampleConfig cfg;
    cfg.rho_max = rho_max;
    cfg.shoot = tight_shoot(opt);
    out.push_back(eigenfunctions::sample_radial(sp[n], p, cfg));
  }
  return out;
}

CheckResult orthonormality(const VerifyOptions& opt) {
  CheckResult c;
  c.name = "gram_matrix_q0.5";
  c.threshold = 1e-6;
  const auto p = geometry::params_from_q(0.5, 1.0);
  const auto sp = spectrum_for(0.5, opt, 2);
  const auto states = states_on_common_grid(sp, p, 2, 0.0, opt);
  double worst = 0.0;
  for (int i = 0; i <= 2; ++i) {
    for (int j = i; j <= 2; ++j) {
      const double g = eigenfunctions::overlap(states[i], states[j]);
      const double target = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(g - target));
    }
  }
  c.measured = worst;
  c.passed = worst <= c.threshold;
  return c;
}

CheckResult flat_limit_overlap(const VerifyOptions& opt) {
  CheckResult c;
  c.name = "flat_limit_overlap";
  c.threshold = 0.95;
  const std::vector<double> a2s{1.0, 10.0, 100.0};
  bool increasing = true;
  double min_at_100 = 1.0;
  for (int n = 0; n <= 2; ++n) {
    double prev = -1.0;
    for (double a2 : a2s) {
      const auto p = geometry::params_from_a2(a2, 1.0);
      const auto sp = spectrum_for(p.q, opt, n);
      const double rho_pair = std::max(
          eigenfunctions::default_rho_max(sp[n].E, p),
          eigenfunctions::default_rho_max_flat(2.0 * n + 1.0, 1.0));
      eigenfunctions::SampleConfig cfg;
      cfg.rho_max = rho_pair;
      cfg.shoot = tight_shoot(opt);
      const auto f = eigenfunctions::sample_radial(sp[n], p, cfg);
      const auto ref = eigenfunctions::flat_eigenfunction(n, 1.0, rho_pair);
      const double ov = std::abs(eigenfunctions::overlap(f, ref));
      if (!(ov > prev)) increasing = false;
      prev = ov;
      if (a2 == 100.0) min_at_100 = std::min(min_at_100, ov);
    }
  }
  c.measured = min_at_100;
  c.passed = increasing && min_at_100 >= c.threshold;
  if (!increasing) c.detail = "overlap not increasing with a^2";
  return c;
}

CheckResult concentration_ordering(const VerifyOptions& opt) {
  CheckResult c;
  c.name = "concentration_ordering";
  c.threshold = 0.0;
  int violations = 0;
  for (int n = 0; n <= 2; ++n) {
    std::vector<eigenfunctions::Concentration> seq;
    for (double a2 : {1.0, 10.0}) {
      const auto p = geometry::params_from_a2(a2, 1.0);
      const auto sp = spectrum_for(p.q, opt, n);
      eigenfunctions::SampleConfig cfg;
      cfg.shoot = tight_shoot(opt);
      seq.push_back(
          eigenfunctions::concentration(eigenfunctions::sample_radial(sp[n], p, cfg)));
    }
    seq.push_back(eigenfunctions::concentration(
        eigenfunctions::flat_eigenfunction(n, 1.0)));
    for (std::size_t i = 1; i < seq.size(); ++i) {
      if (!(seq[i].mean_rho > seq[i - 1].mean_rho)) ++violations;
      if (!(seq[i].r90 > seq[i - 1].r90)) ++violations;
    }
  }
  c.measured = violations;
  c.passed = violations == 0;
  return c;
}

CheckResult flat_reference(const VerifyOptions&) {
  CheckResult c;
  c.name = "flat_reference_moments";
  c.threshold = 1e-6;
  const auto f0 = eigenfunctions::flat_eigenfunction(0, 1.0);
  const double mean = eigenfunctions::concentration(f0).mean_rho;
  c.measured = std::abs(mean - std::sqrt(std::numbers::pi_v<double> / 2.0));
  c.passed = c.measured <= c.threshold && f0.norm_residual <= 1e-8;
  if (f0.norm_residual > 1e-8) c.detail = "flat norm residual above 1e-8";
  return c;
}

CheckResult residual_check(const VerifyOptions& opt) {
  CheckResult c;
  c.name = "ode_residual_eq1";
  c.threshold = 100.0 * opt.rtol;
  const auto p = geometry::params_from_q(0.5, 1.0);
  // Reference eigenvalue from the matrix side, so this check stands even
  // when root-finding is broken.
  oracle::OracleConfig ocfg;
  ocfg.N = opt.oracle_N;
  const double E0 = oracle::eigenvalues(p, 0, 1, ocfg)[0].value;
  spheroidal::ShootingConfig cfg;
  cfg.rtol = opt.rtol;
  cfg.flip_lambda_sign = opt.inject_lambda_sign_bug;
  c.measured = ode_residual(E0, p, 50, cfg);
  c.passed = c.measured <= c.threshold;
  return c;
}

}  // namespace

VerifyReport run_verification(const VerifyOptions& opt) {
  VerifyReport rep;
  rep.checks.push_back(oracle_agreement(0.5, opt));
  rep.checks.push_back(oracle_agreement(5.0, opt));
  rep.checks.push_back(monotonicity(opt));
  rep.checks.push_back(small_q_growth(opt));
  rep.checks.push_back(orthonormality(opt));
  rep.checks.push_back(flat_limit_overlap(opt));
  rep.checks.push_back(concentration_ordering(opt));
  rep.checks.push_back(flat_reference(opt));
  rep.checks.push_back(residual_check(opt));
  return rep;
}

}  // namespace lobosc::checks
