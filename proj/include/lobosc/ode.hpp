#pragma once

// Embedded Dormand-Prince 5(4) pair with FSAL, signed steps, and exact
// endpoint landing.  The per-component error weights come from a caller
// callback and must be homogeneous of degree one in the state, so that
// scaling the state by a power of two reproduces the identical step
// sequence (power-of-two scaling is exact in IEEE arithmetic).

#include <array>
#include <cmath>
#include <limits>

#include "lobosc/errors.hpp"

namespace lobosc::ode {

using State2 = std::array<double, 2>;

struct StepController {
  double rtol = 1e-10;
  double safety = 0.9;
  double min_shrink = 0.2;
  double max_grow = 5.0;
};

namespace detail {
// Dormand-Prince coefficients.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b* (5th-order weights minus embedded 4th-order weights)
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace detail

// Integrates y' = rhs(x, y) from x to x_end (either direction; h carries the
// sign).  weight(x, y) -> State2 gives per-component scales; a step is
// accepted when max_i |err_i| <= rtol * weight_i.  after_step(x, y) runs on
// every accepted step and may rescale y by a power of two, returning the
// ldexp exponent it applied (0 if none) so the FSAL stage stays consistent.
//
// x and h are updated in place; on return x == x_end.
template <class Rhs, class Weight, class AfterStep>
void integrate(Rhs&& rhs, Weight&& weight, AfterStep&& after_step, State2& y,
               double& x, double x_end, double& h, const StepController& ctl) {
  using namespace detail;
  if (x == x_end) return;
  const double dir = (x_end > x) ? 1.0 : -1.0;
  if (h == 0.0 || (h > 0) != (dir > 0)) {
    h = dir * 1e-4 * std::max(1.0, std::abs(x));
  }

  State2 k1 = rhs(x, y);
  long steps = 0;
  constexpr long kMaxSteps = 20'000'000;

  while ((x_end - x) * dir > 0.0) {
    if (++steps > kMaxSteps) {
      throw IntegrationError("integrate: step budget exhausted", x);
    }
    // Land exactly on the endpoint.
    if ((x + h - x_end) * dir > 0.0) h = x_end - x;

    State2 yt;
    for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * a21 * k1[i];
    const State2 k2 = rhs(x + c2 * h, yt);
    for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const State2 k3 = rhs(x + c3 * h, yt);
    for (int i = 0; i < 2; ++i)
      yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const State2 k4 = rhs(x + c4 * h, yt);
    for (int i = 0; i < 2; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    const State2 k5 = rhs(x + c5 * h, yt);
    for (int i = 0; i < 2; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                          a64 * k4[i] + a65 * k5[i]);
    const State2 k6 = rhs(x + h, yt);
    State2 y5;
    for (int i = 0; i < 2; ++i)
      y5[i] = y[i] +
              h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    const State2 k7 = rhs(x + h, y5);

    const State2 w0 = weight(x, y);
    const State2 w1 = weight(x + h, y5);
    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                            e6 * k6[i] + e7 * k7[i]);
      if (e == 0.0) continue;
      // A non-finite ratio (overflow or NaN anywhere in the stages) must
      // reject the step; std::max would silently drop a NaN here.
      const double w = std::max(w0[i], w1[i]);
      const double r = std::abs(e) / (ctl.rtol * w);
      if (!std::isfinite(r)) {
        err = std::numeric_limits<double>::infinity();
        break;
      }
      err = std::max(err, r);
    }

    if (err <= 1.0) {
      x = x + h;
      y = y5;
      k1 = k7;  // FSAL
      const int shift = after_step(x, y);
      if (shift != 0) {
        for (int i = 0; i < 2; ++i) k1[i] = std::ldexp(k1[i], shift);
      }
      const double grow =
          (err == 0.0) ? ctl.max_grow
                       : std::min(ctl.max_grow,
                                  std::max(1.0, ctl.safety * std::pow(err, -0.2)));
      h *= grow;
    } else {
      const double shrink =
          std::max(ctl.min_shrink, ctl.safety * std::pow(err, -0.2));
      h *= shrink;  // k1 still matches (x, y); nothing moved
      if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(x))) {
        throw IntegrationError("integrate: step size underflow", x);
      }
    }
  }
  x = x_end;
}

}  // namespace lobosc::ode
