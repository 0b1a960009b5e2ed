#pragma once

// Normalized radial wavefunctions on a uniform rho grid, in the flat
// measure (integral of psi^2 drho = 1), plus the flat-space references
// they converge to as curvature goes to zero.

#include <string>
#include <vector>

#include "lobosc/eigensolver.hpp"
#include "lobosc/geometry.hpp"

namespace lobosc::eigenfunctions {

struct ParamsTag {
  bool flat = false;
  double a2 = 0.0;    // unused when flat
  double omega = 0.0;
};

struct RadialFunction {
  std::vector<double> rho;     // uniform grid from 0 to rho_max
  std::vector<double> values;  // psi(rho), unit L^2(drho) norm
  int n = 0;                   // radial index (= node count)
  ParamsTag tag;
  double norm_residual = 0.0;  // |1 - raw quadrature norm| before scaling
};

// Composite Simpson on a uniform grid (3/8 rule closes an odd interval
// count); n >= 3 points.
double integrate_uniform(const std::vector<double>& f, double h);

// Default outer radius: WKB decay budget of 25 past the classical turning
// point of the state with energy E.
double default_rho_max(double E, const geometry::ModelParams& p);
double default_rho_max_flat(double E, double omega);

struct SampleConfig {
  double rho_max = 0.0;  // 0 = default_rho_max
  int n_samples = 2000;
  spheroidal::ShootingConfig shoot;
};

// Sample the bound state ep of the curved problem.  Checks the tail is
// negligible at rho_max, counts nodes against ep.n, and fixes the overall
// sign so (-1)^n psi > 0 on the innermost lobe.
RadialFunction sample_radial(const eigensolver::Eigenpair& ep,
                             const geometry::ModelParams& p,
                             const SampleConfig& cfg = {});

// Flat-space reference psi0_n on the same kind of grid:
// psi0_n = (-1)^n sqrt(omega rho) L_n(omega rho^2 / 2) exp(-omega rho^2/4).
RadialFunction flat_eigenfunction(int n, double omega, double rho_max = 0.0,
                                  int n_samples = 2000);

// L^2(drho) inner product of two sampled functions; grids may differ in
// step and extent (the shorter one must still carry all but 1e-6 of both
// masses).
double overlap(const RadialFunction& f, const RadialFunction& g);

struct Concentration {
  double mean_rho;  // integral of rho psi^2
  double r90;       // radius enclosing 90% of the norm
};
Concentration concentration(const RadialFunction& f);

// Relative RMS residual of the sampled state under the one-dimensional
// form of its radial operator (central differences on the middle of the
// grid).  E is the physical energy of the state; pass p = nullptr for a
// flat-reference function.
double radial_residual(const RadialFunction& f, const geometry::ModelParams* p,
                       double E);

}  // namespace lobosc::eigenfunctions
