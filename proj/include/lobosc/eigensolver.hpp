#pragma once

// Discrete spectrum via sign changes of the boundary defect, seeded and
// cross-checked by the independent matrix oracle.

#include <utility>
#include <vector>

#include "lobosc/geometry.hpp"
#include "lobosc/oracle.hpp"
#include "lobosc/spheroidal.hpp"

namespace lobosc::eigensolver {

struct Eigenpair {
  int n;            // index, = number of radial nodes
  double E_tilde;   // dimensionless eigenvalue of the spheroidal problem
  double E;         // physical energy, E_tilde * omega / (2 q)
  double lambda;    // exactly -(E_tilde + 0.25)
  double err;       // half-width of the final refinement bracket
};

struct SolverConfig {
  spheroidal::ShootingConfig shoot;
  int seed_N = 2048;        // coarse oracle mesh used for seeding/counting
  double seed_xi_factor = 80.0;
  int max_scan_points = 2000;
  int min_scan_points = 33;
};

// Sign-change brackets of the defect on a uniform E_tilde grid over
// [E_lo, E_hi].  n_points >= 2 evaluation points.
std::vector<std::pair<double, double>> bracket_scan(
    const geometry::ModelParams& p, double E_lo, double E_hi, int n_points,
    const spheroidal::ShootingConfig& cfg = {});

// Refine one bracket to |b - a| <= tol * max(1, |E|); returns (root,
// half-width).  pre: the defect changes sign across the bracket.
std::pair<double, double> refine_root(const geometry::ModelParams& p,
                                      std::pair<double, double> bracket,
                                      double tol,
                                      const spheroidal::ShootingConfig& cfg = {});

// Lowest n_max + 1 eigenvalues (m = 0).  The scan window is seeded by the
// coarse oracle, and the number of brackets found must match the oracle's
// eigenvalue count in the window, else SpectralConsistencyError.
std::vector<Eigenpair> eigenvalues(const geometry::ModelParams& p, int n_max,
                                   double tol, const SolverConfig& cfg = {});

double physical_energy(double E_tilde, const geometry::ModelParams& p);

// ---- sweep over q ------------------------------------------------------

struct SweepRow {
  double q;
  int n;
  double E_tilde;
  double E_over_omega;
};

struct SweepTable {
  std::vector<SweepRow> rows;  // ordered by (q ascending, n ascending)
  double omega = 0.0;
  double tol = 0.0;
  // Per-level monotonicity of E/omega as q increases (index = n).
  std::vector<bool> monotone_decreasing;
};

// Runs eigenvalues() for each q (ascending); a failure is rethrown with the
// offending q named in the message.
SweepTable sweep(const std::vector<double>& q_values, double omega, int n_max,
                 double tol, const SolverConfig& cfg = {});

}  // namespace lobosc::eigensolver
