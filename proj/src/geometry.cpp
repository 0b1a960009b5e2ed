#include "lobosc/geometry.hpp"

#include <cmath>
#include <string>

namespace lobosc::geometry {

namespace {

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::domain_error(std::string(name) + " must be positive and finite");
  }
}

// All hyperbolic arguments funnel through here; sinh/cosh overflow near 710.
double checked_x(double rho, const ModelParams& p, const char* where) {
  if (!(rho >= 0.0)) {
    throw std::domain_error(std::string(where) + ": rho must be >= 0");
  }
  const double x = rho / p.a;
  if (x > kMaxRhoOverA) {
    throw std::range_error(std::string(where) + ": rho/a = " + std::to_string(x) +
                           " exceeds overflow guard " + std::to_string(kMaxRhoOverA));
  }
  return x;
}

ModelParams finish(double a2, double omega) {
  ModelParams p;
  p.a2 = a2;
  p.a = std::sqrt(a2);
  p.omega = omega;
  p.q = a2 * omega / 2.0;  // the one and only q formula
  p.theta = -(p.q * p.q) / 4.0;
  p.R = -2.0 / a2;
  return p;
}

}  // namespace

ModelParams params_from(double a, double omega) {
  check_positive(a, "a");
  check_positive(omega, "omega");
  return finish(a * a, omega);
}

ModelParams params_from_a2(double a2, double omega) {
  check_positive(a2, "a2");
  check_positive(omega, "omega");
  return finish(a2, omega);
}

ModelParams params_from_q(double q, double omega) {
  check_positive(q, "q");
  check_positive(omega, "omega");
  return finish(2.0 * q / omega, omega);
}

double potential(double rho, const ModelParams& p) {
  const double s = std::sinh(checked_x(rho, p, "potential"));
  return 0.25 * p.a2 * p.omega * p.omega * s * s;
}

double xi_of_rho(double rho, const ModelParams& p) {
  return std::cosh(checked_x(rho, p, "xi_of_rho"));
}

double xi_minus_one_of_rho(double rho, const ModelParams& p) {
  const double sh = std::sinh(0.5 * checked_x(rho, p, "xi_minus_one_of_rho"));
  return 2.0 * sh * sh;
}

double rho_of_xi(double xi, const ModelParams& p) {
  if (!(xi >= 1.0)) {
    throw std::domain_error("rho_of_xi: xi must be >= 1");
  }
  return p.a * std::acosh(xi);
}

double half_density_weight(double rho, const ModelParams& p) {
  const double x = checked_x(rho, p, "half_density_weight");
  return std::sqrt(std::sinh(x) / p.a);
}

}  // namespace lobosc::geometry
