#include "lobosc/eigenfunctions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lobosc/errors.hpp"

namespace lobosc::eigenfunctions {

double integrate_uniform(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  if (n < 3) throw std::domain_error("integrate_uniform: need >= 3 samples");
  const int intervals = n - 1;
  double total = 0.0;
  int simpson_end = n - 1;  // last index covered by plain Simpson
  if (intervals % 2 != 0) {
    if (intervals < 3) throw std::domain_error("integrate_uniform: bad grid");
    simpson_end = n - 4;
    // Newton 3/8 closes the trailing three intervals.
    total += 3.0 * h / 8.0 *
             (f[n - 4] + 3.0 * f[n - 3] + 3.0 * f[n - 2] + f[n - 1]);
  }
  double odd = 0.0, even = 0.0;
  for (int j = 1; j < simpson_end; j += 2) odd += f[j];
  for (int j = 2; j < simpson_end; j += 2) even += f[j];
  total += h / 3.0 * (f[0] + f[simpson_end] + 4.0 * odd + 2.0 * even);
  return total;
}

namespace {

// Accumulate the WKB decay integral of sqrt(V - E) past the turning point
// until it reaches `budget`; returns the corresponding radius.
template <class Vfun>
double wkb_radius(double E, double rho_t, double scale, Vfun&& V,
                  double budget) {
  const double d = 0.005 * scale;
  double acc = 0.0;
  double rho = rho_t;
  double kappa_prev = 0.0;
  for (long i = 0; i < 4'000'000; ++i) {
    const double rho_next = rho + d;
    const double kappa = std::sqrt(std::max(0.0, V(rho_next) - E));
    acc += 0.5 * (kappa_prev + kappa) * d;
    rho = rho_next;
    kappa_prev = kappa;
    if (acc >= budget) return rho;
  }
  throw std::range_error("default_rho_max: decay budget not reached");
}

constexpr double kWkbBudget = 25.0;

}  // namespace

double default_rho_max(double E, const geometry::ModelParams& p) {
  if (!(E > 0.0)) throw std::domain_error("default_rho_max: need E > 0");
  const double rho_t = p.a * std::asinh(2.0 * std::sqrt(E) / (p.a * p.omega));
  return wkb_radius(E, rho_t, p.a,
                    [&p](double r) { return geometry::potential(r, p); },
                    kWkbBudget);
}

double default_rho_max_flat(double E, double omega) {
  if (!(E > 0.0) || !(omega > 0.0)) {
    throw std::domain_error("default_rho_max_flat: need E, omega > 0");
  }
  const double rho_t = 2.0 * std::sqrt(E) / omega;
  auto V = [omega](double r) { return 0.25 * omega * omega * r * r; };
  return wkb_radius(E, rho_t, 1.0 / std::sqrt(omega), V, kWkbBudget);
}

namespace {

void check_grid_args(double rho_max, int n_samples) {
  if (!(rho_max > 0.0)) throw std::domain_error("sampling: rho_max must be > 0");
  if (n_samples < 16) throw std::domain_error("sampling: need >= 16 samples");
}

// Tail, node-count, and sign post-conditions shared by both constructions.
void finalize(RadialFunction& f, int expect_nodes, double suggested_rho_max) {
  const int n = static_cast<int>(f.values.size());
  double peak = 0.0;
  for (double v : f.values) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) throw std::range_error("sampling: state vanished");

  const int tail_from = std::max(1, n - std::max(1, n / 100));
  double tail = 0.0;
  for (int j = tail_from; j < n; ++j) tail = std::max(tail, std::abs(f.values[j]));
  if (tail > 1e-8 * peak) {
    std::ostringstream os;
    os << "sampling: state has not decayed at rho_max = " << f.rho.back()
       << " (tail/peak = " << tail / peak << "); the default radius here is "
       << suggested_rho_max;
    throw std::range_error(os.str());
  }

  const double floor = 1e-9 * peak;
  int nodes = 0;
  double prev = 0.0;
  for (int j = 1; j < n; ++j) {
    const double v = f.values[j];
    if (std::abs(v) <= floor) continue;
    if (prev != 0.0 && std::signbit(v) != std::signbit(prev)) ++nodes;
    prev = v;
  }
  if (nodes != expect_nodes) {
    std::ostringstream os;
    os << "sampling: counted " << nodes << " nodes but the state index is "
       << expect_nodes;
    throw IndexingConsistencyError(os.str());
  }

  // Innermost lobe carries sign (-1)^n.
  const double want = (expect_nodes % 2 == 0) ? 1.0 : -1.0;
  for (int j = 1; j < n; ++j) {
    if (std::abs(f.values[j]) > 1e-3 * peak) {
      if (f.values[j] * want < 0.0) {
        for (double& v : f.values) v = -v;
      }
      break;
    }
  }
}

}  // namespace

RadialFunction sample_radial(const eigensolver::Eigenpair& ep,
                             const geometry::ModelParams& p,
                             const SampleConfig& cfg) {
  const double rho_max =
      cfg.rho_max > 0.0 ? cfg.rho_max : default_rho_max(ep.E, p);
  check_grid_args(rho_max, cfg.n_samples);
  if (rho_max / p.a > geometry::kMaxRhoOverA) {
    throw std::range_error("sample_radial: rho_max/a exceeds overflow guard");
  }
  if (p.q * std::cosh(rho_max / p.a) > 1e8) {
    std::ostringstream os;
    os << "sample_radial: q*cosh(rho_max/a) = "
       << p.q * std::cosh(rho_max / p.a)
       << " exceeds 1e8; reduce rho_max (default here is "
       << default_rho_max(ep.E, p) << ")";
    throw std::range_error(os.str());
  }

  const int n = cfg.n_samples;
  const double h = rho_max / (n - 1);
  RadialFunction f;
  f.n = ep.n;
  f.tag = ParamsTag{false, p.a2, p.omega};
  f.rho.resize(n);
  f.values.assign(n, 0.0);
  for (int j = 0; j < n; ++j) f.rho[j] = j * h;

  // One inward pass over all targets, descending in xi.
  std::vector<double> xi(n - 1);
  for (int j = 1; j < n; ++j) {
    xi[n - 1 - j] = 1.0 + geometry::xi_minus_one_of_rho(f.rho[j], p);
  }
  const auto samples =
      spheroidal::sample_solution(ep.E_tilde, p, xi, cfg.shoot);

  // Rebase the scaled samples onto the largest one.
  int top = std::numeric_limits<int>::min();
  for (const auto& s : samples) {
    if (s.value != 0.0) top = std::max(top, std::ilogb(s.value) + s.exp);
  }
  if (top == std::numeric_limits<int>::min()) {
    throw std::range_error("sample_radial: solution vanished on the grid");
  }
  for (int j = 1; j < n; ++j) {
    const auto& s = samples[n - 1 - j];
    const double psi_tilde =
        (s.value == 0.0) ? 0.0 : std::ldexp(s.value, s.exp - top);
    f.values[j] = geometry::half_density_weight(f.rho[j], p) * psi_tilde;
  }

  std::vector<double> sq(n);
  for (int j = 0; j < n; ++j) sq[j] = f.values[j] * f.values[j];
  const double raw = integrate_uniform(sq, h);
  if (!(raw > 0.0)) throw std::range_error("sample_radial: zero norm");
  const double scale = 1.0 / std::sqrt(raw);
  for (double& v : f.values) v *= scale;
  for (int j = 0; j < n; ++j) sq[j] = f.values[j] * f.values[j];
  f.norm_residual = std::abs(1.0 - integrate_uniform(sq, h));

  finalize(f, ep.n, default_rho_max(ep.E, p));
  return f;
}

RadialFunction flat_eigenfunction(int n_index, double omega, double rho_max,
                                  int n_samples) {
  if (n_index < 0 || n_index > 10000) {
    throw std::domain_error("flat_eigenfunction: bad index");
  }
  if (!(omega > 0.0)) throw std::domain_error("flat_eigenfunction: omega > 0");
  const double E = (2.0 * n_index + 1.0) * omega;
  if (rho_max <= 0.0) rho_max = default_rho_max_flat(E, omega);
  check_grid_args(rho_max, n_samples);

  const int n = n_samples;
  const double h = rho_max / (n - 1);
  RadialFunction f;
  f.n = n_index;
  f.tag = ParamsTag{true, 0.0, omega};
  f.rho.resize(n);
  f.values.assign(n, 0.0);
  const double sign = (n_index % 2 == 0) ? 1.0 : -1.0;
  for (int j = 0; j < n; ++j) {
    const double rho = j * h;
    f.rho[j] = rho;
    if (j == 0) continue;
    const double x = 0.5 * omega * rho * rho;
    // Laguerre L_n(x) by the ascending three-term recurrence.
    double Lkm1 = 1.0, Lk = 1.0 - x;
    if (n_index == 0) Lk = 1.0;
    for (int k = 1; k < n_index; ++k) {
      const double Lnext = ((2.0 * k + 1.0 - x) * Lk - k * Lkm1) / (k + 1.0);
      Lkm1 = Lk;
      Lk = Lnext;
    }
    const double L = (n_index == 0) ? 1.0 : Lk;
    f.values[j] = sign * std::sqrt(omega * rho) * L * std::exp(-0.5 * x);
  }

  std::vector<double> sq(n);
  for (int j = 0; j < n; ++j) sq[j] = f.values[j] * f.values[j];
  const double raw = integrate_uniform(sq, h);
  if (!(raw > 0.0)) throw std::range_error("flat_eigenfunction: zero norm");
  f.norm_residual = std::abs(1.0 - raw);
  const double scale = 1.0 / std::sqrt(raw);
  for (double& v : f.values) v *= scale;

  finalize(f, n_index, default_rho_max_flat(E, omega));
  return f;
}

namespace {

double interp_at(const RadialFunction& g, double x) {
  const double h = g.rho[1] - g.rho[0];
  const int n = static_cast<int>(g.rho.size());
  double t = x / h;
  int j = static_cast<int>(t);
  if (j < 0) j = 0;
  if (j >= n - 1) return g.values[n - 1];
  const double w = t - j;
  return g.values[j] * (1.0 - w) + g.values[j + 1] * w;
}

double mass_within(const RadialFunction& f, double r) {
  // Simpson mass of psi^2 over the grid prefix inside radius r — the same
  // quadrature family as the normalization, so the 1e-6 mass gate in
  // overlap() is not drowned by the integrator's own error (trapezoid
  // would contribute ~h^2/12 |d(psi^2)/drho|(0) ~ 3e-6 on default grids).
  const int n = static_cast<int>(f.rho.size());
  const double h = f.rho[1] - f.rho[0];
  int k = n - 1;
  if (f.rho.back() > r) {
    k = static_cast<int>(std::floor((r - f.rho[0]) / h + 1e-12));
    if (k > n - 1) k = n - 1;
  }
  if (k < 2) return 0.0;
  std::vector<double> sq(k + 1);
  for (int j = 0; j <= k; ++j) sq[j] = f.values[j] * f.values[j];
  return integrate_uniform(sq, h);
}

}  // namespace

double overlap(const RadialFunction& f, const RadialFunction& g) {
  if (f.rho.size() < 3 || g.rho.size() < 3) {
    throw std::domain_error("overlap: degenerate grids");
  }
  const double rc = std::min(f.rho.back(), g.rho.back());
  for (const auto* fn : {&f, &g}) {
    const double outside = 1.0 - mass_within(*fn, rc);
    if (outside > 1e-6) {
      std::ostringstream os;
      os << "overlap: " << outside
         << " of one state's norm lies beyond the shared radius " << rc;
      throw std::range_error(os.str());
    }
  }
  const bool same_grid =
      f.rho.size() == g.rho.size() && f.rho[1] == g.rho[1] &&
      f.rho.back() == g.rho.back();
  const RadialFunction& fine = (f.rho[1] <= g.rho[1]) ? f : g;
  const RadialFunction& other = (&fine == &f) ? g : f;
  const double h = fine.rho[1] - fine.rho[0];
  int n = static_cast<int>(fine.rho.size());
  if (!same_grid) {
    n = std::min(n, static_cast<int>(std::floor(rc / h + 1e-12)) + 1);
  }
  std::vector<double> prod(n);
  for (int j = 0; j < n; ++j) {
    const double a = fine.values[j];
    const double b = same_grid ? other.values[j] : interp_at(other, fine.rho[j]);
    prod[j] = a * b;
  }
  return integrate_uniform(prod, h);
}

Concentration concentration(const RadialFunction& f) {
  const int n = static_cast<int>(f.rho.size());
  const double h = f.rho[1] - f.rho[0];
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = f.rho[j] * f.values[j] * f.values[j];
  Concentration c;
  c.mean_rho = integrate_uniform(w, h);

  double total = 0.0;
  std::vector<double> cum(n, 0.0);
  for (int j = 1; j < n; ++j) {
    const double a = f.values[j - 1], b = f.values[j];
    total += 0.5 * (a * a + b * b) * h;
    cum[j] = total;
  }
  const double target = 0.9 * total;
  c.r90 = f.rho.back();
  for (int j = 1; j < n; ++j) {
    if (cum[j] >= target) {
      const double frac = (target - cum[j - 1]) / (cum[j] - cum[j - 1]);
      c.r90 = f.rho[j - 1] + frac * h;
      break;
    }
  }
  return c;
}

double radial_residual(const RadialFunction& f, const geometry::ModelParams* p,
                       double E) {
  const int n = static_cast<int>(f.rho.size());
  if (n < 32) throw std::domain_error("radial_residual: grid too short");
  const double h = f.rho[1] - f.rho[0];
  const int lo = std::max(2, static_cast<int>(0.2 * n));
  const int hi = std::min(n - 3, static_cast<int>(0.8 * n));
  double num = 0.0, den = 0.0;
  int count = 0;
  for (int j = lo; j <= hi; ++j) {
    const double rho = f.rho[j];
    double W;
    if (p != nullptr) {
      const double sh = std::sinh(rho / p->a);
      W = -1.0 / (4.0 * p->a2 * sh * sh) + geometry::potential(rho, *p);
    } else {
      const double om = f.tag.omega;
      W = -1.0 / (4.0 * rho * rho) + 0.25 * om * om * rho * rho;
    }
    const double d2 = (-f.values[j - 2] + 16.0 * f.values[j - 1] -
                       30.0 * f.values[j] + 16.0 * f.values[j + 1] -
                       f.values[j + 2]) /
                      (12.0 * h * h);
    const double r = -d2 + (W - E) * f.values[j];
    num += r * r;
    den += (E * f.values[j]) * (E * f.values[j]);
    ++count;
  }
  if (count == 0 || !(den > 0.0)) {
    throw std::domain_error("radial_residual: empty interior window");
  }
  return std::sqrt(num / den);
}

}  // namespace lobosc::eigenfunctions
