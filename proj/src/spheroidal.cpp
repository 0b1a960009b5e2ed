#include "lobosc/spheroidal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "lobosc/errors.hpp"
#include "lobosc/ode.hpp"

namespace lobosc::spheroidal {

using ode::State2;

SpheroidalCoeffs coeffs_for(double E_tilde, const geometry::ModelParams& p, int m) {
  return SpheroidalCoeffs{-(E_tilde + 0.25), p.theta, m};
}

double default_xi_start(double q, const ShootingConfig& cfg) {
  return std::max(cfg.xi_start_min, 1.0 + cfg.tail_threshold / q);
}

std::array<double, 2> ode_rhs(double xi, double psi, double dpsi,
                              const SpheroidalCoeffs& c) {
  const double om2 = 1.0 - xi * xi;  // negative on the domain
  double coef = c.lambda + 4.0 * c.theta * om2;
  if (c.m != 0) coef -= static_cast<double>(c.m) * c.m / om2;
  const double d2psi = (2.0 * xi * dpsi - coef * psi) / om2;
  return {dpsi, d2psi};
}

std::array<double, 2> log_rhs(double s, double u, double du,
                              const SpheroidalCoeffs& c) {
  // m = 0 only; t = xi - 1 = e^s, q^2 = -4 theta.
  const double t = std::exp(s);
  const double q2 = -4.0 * c.theta;
  const double tp2 = t + 2.0;
  const double d2u = (-du + (c.lambda + q2 * t * tp2) * u) * (t / tp2);
  return {du, d2u};
}

OdeState tail_state(double xi_start, double q, const ShootingConfig& cfg) {
  const double slack = 1.0 - 1e-12;
  if (!(q * (xi_start - 1.0) >= cfg.tail_threshold * slack)) {
    std::ostringstream os;
    os << "tail_state: q*(xi_start - 1) = " << q * (xi_start - 1.0)
       << " is below the tail threshold " << cfg.tail_threshold;
    throw ConfigError(os.str());
  }
  if (!(xi_start >= cfg.xi_start_min * slack)) {
    std::ostringstream os;
    os << "tail_state: xi_start = " << xi_start << " is below the minimum "
       << cfg.xi_start_min;
    throw ConfigError(os.str());
  }
  const double qx = q * xi_start;
  // log2 of the true magnitude of exp(-q xi)/(q xi)
  const double l2 = (-qx - std::log(qx)) / std::numbers::ln2_v<double>;
  if (!(std::abs(l2) < 1e8)) {
    throw std::range_error("tail_state: required scale exponent is out of range; "
                           "reduce xi_start (q*xi too large)");
  }
  OdeState st;
  st.xi = xi_start;
  st.scale_exp = static_cast<int>(std::floor(l2));
  st.psi = std::exp2(l2 - st.scale_exp);  // in [1, 2)
  st.dpsi = -(q + 1.0 / xi_start) * st.psi;
  return st;
}

namespace {

// Characteristic size of the scaled solution near xi: derivatives are
// weighted by min(1, xi-1) so the defect-carrying combination (xi-1)*psi'
// sets the scale at the regular end.
double outer_mag(double xi, const State2& y) {
  const double l = std::min(1.0, xi - 1.0);
  return std::max(std::abs(y[0]), std::abs(y[1]) * l);
}

// Power-of-two renormalization keeping the magnitude in [2^-32, 2^32].
// Returns the ldexp shift applied to the state (0 if none).
int renormalize(double mag, State2& y, int& scale_exp) {
  if (!(mag > 0.0)) return 0;
  if (mag < kRescaleHi && mag >= kRescaleLo) return 0;
  const int k = std::ilogb(mag);
  y[0] = std::ldexp(y[0], -k);
  y[1] = std::ldexp(y[1], -k);
  scale_exp += k;
  return -k;
}

struct OuterLeg {
  SpheroidalCoeffs c;
  ode::StepController ctl;

  void run(OdeState& st, double xi_end, double& h) const {
    State2 y{st.psi, st.dpsi};
    double x = st.xi;
    int* exp_ptr = &st.scale_exp;
    auto rhs = [this](double xi, const State2& v) -> State2 {
      const auto d = ode_rhs(xi, v[0], v[1], c);
      return {d[0], d[1]};
    };
    auto weight = [](double xi, const State2& v) -> State2 {
      const double l = std::min(1.0, xi - 1.0);
      const double S = std::max(std::abs(v[0]), std::abs(v[1]) * l);
      return {std::abs(v[0]) + 0.01 * S, std::abs(v[1]) + 0.01 * S / l};
    };
    auto after = [exp_ptr](double xi, State2& v) -> int {
      return renormalize(outer_mag(xi, v), v, *exp_ptr);
    };
    ode::integrate(rhs, weight, after, y, x, xi_end, h, ctl);
    st.xi = x;
    st.psi = y[0];
    st.dpsi = y[1];
  }
};

OdeState integrate_inward_impl(const OdeState& start, const SpheroidalCoeffs& c,
                               double xi_end, const ShootingConfig& cfg) {
  if (!(xi_end > 1.0 && xi_end < start.xi)) {
    throw std::domain_error("integrate_inward: need 1 < xi_end < xi_start");
  }
  OdeState st = start;
  const double q = std::sqrt(std::max(0.0, -4.0 * c.theta));
  double h = -std::min(0.1, 0.5 / (q + 1.0));
  OuterLeg leg{c, ode::StepController{cfg.rtol, 0.9, 0.2, 5.0}};
  leg.run(st, xi_end, h);
  return st;
}

SpheroidalCoeffs effective_coeffs(double E_tilde, const geometry::ModelParams& p,
                                  int m, const ShootingConfig& cfg) {
  SpheroidalCoeffs c = coeffs_for(E_tilde, p, m);
  if (cfg.flip_lambda_sign) c.lambda = -c.lambda;
  return c;
}

// Inner leg driver in s = log(xi - 1).  Tracks a running magnitude
// u_scale (in stored units, rescale-aware) used both for the error
// weights and for the defect usability floor.
struct InnerLeg {
  SpheroidalCoeffs c;
  ode::StepController ctl;
  State2 y;
  double s;
  int scale_exp;
  double u_scale;
  double h = -0.1;

  void run_to(double s_end) {
    auto rhs = [this](double sv, const State2& v) -> State2 {
      const auto d = log_rhs(sv, v[0], v[1], c);
      return {d[0], d[1]};
    };
    auto weight = [this](double, const State2& v) -> State2 {
      return {std::abs(v[0]) + 0.01 * u_scale, std::abs(v[1]) + 0.01 * u_scale};
    };
    auto after = [this](double, State2& v) -> int {
      const double mag = std::max(std::abs(v[0]), std::abs(v[1]));
      const int shift = renormalize(mag, v, scale_exp);
      if (shift != 0) u_scale = std::ldexp(u_scale, shift);
      u_scale = std::max(u_scale, std::max(std::abs(v[0]), std::abs(v[1])));
      return shift;
    };
    ode::integrate(rhs, weight, after, y, s, s_end, h, ctl);
  }
};

InnerLeg make_inner_leg(const OdeState& at_switch, const SpheroidalCoeffs& c,
                        const ShootingConfig& cfg) {
  InnerLeg leg;
  leg.c = c;
  leg.ctl = ode::StepController{cfg.rtol, 0.9, 0.2, 5.0};
  leg.y = State2{at_switch.psi, (cfg.xi_switch - 1.0) * at_switch.dpsi};
  leg.s = std::log(cfg.xi_switch - 1.0);
  leg.scale_exp = at_switch.scale_exp;
  leg.u_scale = std::max(std::abs(leg.y[0]), std::abs(leg.y[1]));
  return leg;
}

}  // namespace

OdeState integrate_inward(double E_tilde, const geometry::ModelParams& p, int m,
                          double xi_start, double xi_end,
                          const ShootingConfig& cfg) {
  const SpheroidalCoeffs c = effective_coeffs(E_tilde, p, m, cfg);
  return integrate_inward_impl(tail_state(xi_start, p.q, cfg), c, xi_end, cfg);
}

OdeState integrate_inward_from(const OdeState& start, double E_tilde,
                               const geometry::ModelParams& p, int m,
                               double xi_end, const ShootingConfig& cfg) {
  const SpheroidalCoeffs c = effective_coeffs(E_tilde, p, m, cfg);
  return integrate_inward_impl(start, c, xi_end, cfg);
}

DefectResult boundary_defect(double E_tilde, const geometry::ModelParams& p,
                             const ShootingConfig& cfg) {
  if (!(cfg.s_eval <= std::log(cfg.xi_switch - 1.0) - 1.0)) {
    throw ConfigError("boundary_defect: s_eval must sit at least 1 below "
                      "log(xi_switch - 1)");
  }
  const SpheroidalCoeffs c = effective_coeffs(E_tilde, p, 0, cfg);
  const double xi0 =
      cfg.xi_start > 0.0 ? cfg.xi_start : default_xi_start(p.q, cfg);
  OdeState st = integrate_inward_impl(tail_state(xi0, p.q, cfg), c, cfg.xi_switch, cfg);

  InnerLeg leg = make_inner_leg(st, c, cfg);

  double last_residual = 0.0, last_floor = 0.0;
  for (int attempt = 0; attempt <= cfg.max_deepen; ++attempt) {
    const double s1 = cfg.s_eval - attempt * cfg.s_deepen;
    const double s2 = s1 - cfg.s_eval_gap;
    leg.run_to(s1);
    const double d1 = leg.y[1];
    const int e1 = leg.scale_exp;
    leg.run_to(s2);
    const double d2 = leg.y[1];
    const int e2 = leg.scale_exp;

    // Compare both read-offs in the current stored units.
    const double d1_adj = std::ldexp(d1, e1 - e2);
    const double residual = std::abs(d1_adj - d2);
    const double floor = 1e-4 * leg.u_scale;
    if (residual <= 1e-3 * (std::abs(d2) + floor)) {
      return DefectResult{d2, residual, e2};
    }
    last_residual = residual;
    last_floor = floor;
  }
  std::ostringstream os;
  os << "boundary_defect: usability gate failed after " << cfg.max_deepen
     << " deepening retries at E_tilde = " << E_tilde
     << " (residual " << last_residual << ", floor " << last_floor << ")";
  throw DefectNotConverged(os.str());
}

std::vector<ScaledSample> sample_solution(double E_tilde,
                                          const geometry::ModelParams& p,
                                          std::span<const double> xi_targets,
                                          const ShootingConfig& cfg) {
  if (xi_targets.empty()) return {};
  for (std::size_t i = 0; i < xi_targets.size(); ++i) {
    if (!(xi_targets[i] > 1.0)) {
      throw std::domain_error("sample_solution: targets must be > 1");
    }
    if (i > 0 && !(xi_targets[i] < xi_targets[i - 1])) {
      throw std::domain_error("sample_solution: targets must strictly decrease");
    }
  }
  const SpheroidalCoeffs c = effective_coeffs(E_tilde, p, 0, cfg);
  const double xi0 = std::max(
      cfg.xi_start > 0.0 ? cfg.xi_start : default_xi_start(p.q, cfg),
      1.05 * xi_targets.front());
  OdeState st = tail_state(xi0, p.q, cfg);

  std::vector<ScaledSample> out;
  out.reserve(xi_targets.size());

  const double q = p.q;
  double h = -std::min(0.1, 0.5 / (q + 1.0));
  OuterLeg leg{c, ode::StepController{cfg.rtol, 0.9, 0.2, 5.0}};

  std::size_t i = 0;
  for (; i < xi_targets.size() && xi_targets[i] >= cfg.xi_switch; ++i) {
    leg.run(st, xi_targets[i], h);
    out.push_back(ScaledSample{st.psi, st.scale_exp});
  }
  if (i == xi_targets.size()) return out;

  leg.run(st, cfg.xi_switch, h);
  InnerLeg inner = make_inner_leg(st, c, cfg);
  for (; i < xi_targets.size(); ++i) {
    inner.run_to(std::log(xi_targets[i] - 1.0));
    out.push_back(ScaledSample{inner.y[0], inner.scale_exp});
  }
  return out;
}

}  // namespace lobosc::spheroidal
