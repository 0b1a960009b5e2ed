#pragma once

// Desk-scale self-verification: re-runs the cheap end of every
// cross-check the test suite relies on, against freshly computed
// references, and reports one named result per check.

#include <string>
#include <vector>

#include "lobosc/geometry.hpp"
#include "lobosc/spheroidal.hpp"

namespace lobosc::checks {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;   // the quantity compared against the threshold
  double threshold = 0.0;
  std::string detail;
};

struct VerifyOptions {
  double tol = 1e-10;      // eigenvalue refinement tolerance
  double rtol = 1e-10;     // shooting integrator tolerance
  int oracle_N = 16384;    // desk-scale oracle mesh
  // Harness hook: run the residual check against a solution integrated
  // with the wrong lambda sign; the check must then fail.
  bool inject_lambda_sign_bug = false;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

VerifyReport run_verification(const VerifyOptions& opt = {});

// Max relative residual of equation (coefficients rebuilt independently
// of the integrator) over finite-difference stencils at `points`
// logarithmically spaced positions; used by the suite above and by tests.
double ode_residual(double E_tilde, const geometry::ModelParams& p, int points,
                    const spheroidal::ShootingConfig& cfg);

}  // namespace lobosc::checks
