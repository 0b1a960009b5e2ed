#include "lobosc/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lobosc/errors.hpp"

namespace lobosc::eigensolver {

namespace {

double defect_value(const geometry::ModelParams& p, double E,
                    const spheroidal::ShootingConfig& cfg) {
  // Sign and relative comparisons never need the 2^exp factor.
  return spheroidal::boundary_defect(E, p, cfg).value;
}

}  // namespace

std::vector<std::pair<double, double>> bracket_scan(
    const geometry::ModelParams& p, double E_lo, double E_hi, int n_points,
    const spheroidal::ShootingConfig& cfg) {
  if (!(E_hi > E_lo)) throw std::domain_error("bracket_scan: need E_hi > E_lo");
  if (n_points < 2) throw std::domain_error("bracket_scan: need n_points >= 2");
  std::vector<std::pair<double, double>> brackets;
  const double step = (E_hi - E_lo) / (n_points - 1);
  double prev_E = E_lo;
  double prev_d;
  try {
    prev_d = defect_value(p, prev_E, cfg);
  } catch (const DefectNotConverged& e) {
    throw DefectNotConverged(std::string(e.what()) + " [scan start]");
  }
  for (int i = 1; i < n_points; ++i) {
    const double E = (i == n_points - 1) ? E_hi : E_lo + i * step;
    const double d = defect_value(p, E, cfg);
    if (prev_d == 0.0) {
      brackets.emplace_back(prev_E, prev_E);  // exact hit on a grid point
    } else if (d != 0.0 && std::signbit(d) != std::signbit(prev_d)) {
      brackets.emplace_back(prev_E, E);
    }
    prev_E = E;
    prev_d = d;
  }
  if (prev_d == 0.0) brackets.emplace_back(prev_E, prev_E);
  return brackets;
}

std::pair<double, double> refine_root(const geometry::ModelParams& p,
                                      std::pair<double, double> bracket,
                                      double tol,
                                      const spheroidal::ShootingConfig& cfg) {
  double a = bracket.first, b = bracket.second;
  if (a == b) return {a, 0.0};  // exact grid hit from the scan
  if (!(b > a)) throw std::domain_error("refine_root: need a < b");
  double fa = defect_value(p, a, cfg);
  double fb = defect_value(p, b, cfg);
  if (fa == 0.0) return {a, 0.0};
  if (fb == 0.0) return {b, 0.0};
  if (std::signbit(fa) == std::signbit(fb)) {
    throw RefinementError("refine_root: defect does not change sign across "
                          "the bracket");
  }
  // Bisection with a secant attempt each round: robust, and the secant
  // step gives near-quadratic closing on these smooth defects.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (b - a <= tol * std::max(1.0, std::abs(mid)) || mid <= a || mid >= b) {
      return {mid, 0.5 * (b - a)};
    }
    double x = mid;
    // |fa|, |fb| are stored-unit values from separate integrations; the
    // secant uses them only through the ratio, which stays O(1) near a
    // simple root.
    const double denom = fb - fa;
    if (denom != 0.0) {
      const double xs = (a * fb - b * fa) / denom;
      const double margin = 0.1 * (b - a);
      if (xs > a + margin && xs < b - margin) x = xs;
    }
    const double fx = defect_value(p, x, cfg);
    if (fx == 0.0) return {x, 0.0};
    if (std::signbit(fx) != std::signbit(fa)) {
      b = x;
      fb = fx;
    } else {
      a = x;
      fa = fx;
    }
  }
  throw RefinementError("refine_root: did not reach tolerance in 200 rounds");
}

double physical_energy(double E_tilde, const geometry::ModelParams& p) {
  return E_tilde * p.omega / (2.0 * p.q);
}

std::vector<Eigenpair> eigenvalues(const geometry::ModelParams& p, int n_max,
                                   double tol, const SolverConfig& cfg) {
  if (n_max < 0) throw std::domain_error("eigenvalues: n_max must be >= 0");
  if (!(tol > 0.0)) throw std::domain_error("eigenvalues: tol must be > 0");

  // Coarse matrix seed: one extra level above n_max bounds the window.
  const double Xi = 1.0 + cfg.seed_xi_factor / p.q;
  const auto T = oracle::assemble(p, 0, Xi, cfg.seed_N);
  const auto seeds = oracle::lowest_k(T, n_max + 2);

  double min_gap = seeds[1] - seeds[0];
  for (int i = 1; i + 1 < static_cast<int>(seeds.size()); ++i) {
    min_gap = std::min(min_gap, seeds[i + 1] - seeds[i]);
  }
  if (!(min_gap > 0.0)) {
    throw SpectralConsistencyError("eigenvalues: coarse seed levels collapse");
  }

  const double spread = seeds[n_max + 1] - seeds[0];
  const double pad = std::max(1.0, 0.1 * spread);
  const double top_gap = seeds[n_max + 1] - seeds[n_max];
  const double E_lo = seeds[0] - pad;
  const double E_hi = seeds[n_max] + std::min(pad, 0.5 * top_gap);

  const int expected =
      oracle::sturm_count_below(T, E_hi) - oracle::sturm_count_below(T, E_lo);
  if (expected < n_max + 1) {
    std::ostringstream os;
    os << "eigenvalues: oracle finds only " << expected
       << " levels in the scan window, need " << n_max + 1;
    throw SpectralConsistencyError(os.str());
  }

  const int n_points = std::clamp(
      static_cast<int>(std::ceil(4.0 * (E_hi - E_lo) / min_gap)),
      cfg.min_scan_points, cfg.max_scan_points);
  const auto brackets = bracket_scan(p, E_lo, E_hi, n_points, cfg.shoot);

  if (static_cast<int>(brackets.size()) != expected) {
    std::ostringstream os;
    os << "eigenvalues: defect scan found " << brackets.size()
       << " sign changes in [" << E_lo << ", " << E_hi << "] but the matrix "
       << "count is " << expected << " (q = " << p.q << ", n_points = "
       << n_points << ")";
    throw SpectralConsistencyError(os.str());
  }

  std::vector<Eigenpair> out;
  out.reserve(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    const auto [root, half] = refine_root(p, brackets[n], tol, cfg.shoot);
    Eigenpair ep;
    ep.n = n;
    ep.E_tilde = root;
    ep.E = physical_energy(root, p);
    ep.lambda = -(root + 0.25);
    ep.err = half;
    out.push_back(ep);
  }
  for (int n = 0; n < n_max; ++n) {
    if (!(out[n].E_tilde < out[n + 1].E_tilde)) {
      throw SpectralConsistencyError(
          "eigenvalues: refined spectrum is not strictly increasing");
    }
  }
  return out;
}

SweepTable sweep(const std::vector<double>& q_values, double omega, int n_max,
                 double tol, const SolverConfig& cfg) {
  SweepTable table;
  table.omega = omega;
  table.tol = tol;
  std::vector<double> qs = q_values;
  std::sort(qs.begin(), qs.end());
  for (double q : qs) {
    auto tag = [q](const std::exception& e) {
      std::ostringstream os;
      os << "sweep: q = " << q << ": " << e.what();
      return os.str();
    };
    try {
      const auto p = geometry::params_from_q(q, omega);
      const auto spectrum = eigenvalues(p, n_max, tol, cfg);
      for (const auto& ep : spectrum) {
        table.rows.push_back(SweepRow{q, ep.n, ep.E_tilde, ep.E / omega});
      }
    } catch (const SpectralConsistencyError& e) {
      throw SpectralConsistencyError(tag(e));
    } catch (const DefectNotConverged& e) {
      throw DefectNotConverged(tag(e));
    } catch (const RefinementError& e) {
      throw RefinementError(tag(e));
    } catch (const IntegrationError& e) {
      throw IntegrationError(tag(e), e.x_reached);
    }
  }
  table.monotone_decreasing.assign(n_max + 1, true);
  for (int n = 0; n <= n_max; ++n) {
    double prev = 0.0;
    bool first = true;
    for (const auto& row : table.rows) {
      if (row.n != n) continue;
      if (!first && !(row.E_over_omega < prev)) {
        table.monotone_decreasing[n] = false;
      }
      prev = row.E_over_omega;
      first = false;
    }
  }
  return table;
}

}  // namespace lobosc::eigensolver
