#pragma once

#include <stdexcept>

namespace lobosc::geometry {

// Model constants for the oscillator on the curved plane.
//
// a2 (= a^2) is the primary stored field; q is always derived as
// q = a2*omega/2 so that constructing from (a2, omega) or from (q, omega)
// yields bitwise-identical parameter sets.
struct ModelParams {
  double a;      // curvature radius
  double a2;     // a^2, primary field
  double omega;  // oscillator frequency
  double q;      // spheroidal parameter, q = a2*omega/2
  double theta;  // -q^2/4
  double R;      // scalar curvature, -2/a2
};

ModelParams params_from(double a, double omega);
ModelParams params_from_a2(double a2, double omega);
ModelParams params_from_q(double q, double omega);

// V(rho) = (a^2 omega^2 / 4) sinh^2(rho/a); rho >= 0.
double potential(double rho, const ModelParams& p);

// xi = cosh(rho/a)
double xi_of_rho(double rho, const ModelParams& p);

// xi - 1 = 2 sinh^2(rho/(2a)), stable for small rho
double xi_minus_one_of_rho(double rho, const ModelParams& p);

// rho = a * acosh(xi); xi >= 1
double rho_of_xi(double xi, const ModelParams& p);

// w(rho) = sqrt(sinh(rho/a)/a): half-density factor relating the
// flat-measure radial function psi(rho) to the spheroidal solution,
// psi(rho) = w(rho) * psi_tilde(cosh(rho/a)).
double half_density_weight(double rho, const ModelParams& p);

// Largest allowed rho/a in hyperbolic-function arguments before overflow
// guards fire.
inline constexpr double kMaxRhoOverA = 700.0;

}  // namespace lobosc::geometry
