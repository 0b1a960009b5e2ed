#pragma once

// Independent cross-check for the shooting spectrum: a finite-volume
// discretization of the same Sturm-Liouville problem,
//
//   -(p u')' + W u = E_tilde u,   p(xi) = xi^2 - 1,
//   W(xi) = m^2/(xi^2 - 1) + q^2 (xi^2 - 1) - 1/4,
//
// on a cell-centered mesh over (1, Xi).  The flux coefficient vanishes
// exactly at xi = 1, so the regular (limit-point) endpoint needs no
// boundary condition beyond dropping the flux; the far end is Dirichlet.
// Lowest eigenvalues come from Sturm-sequence bisection, sharpened by
// one Richardson step in the mesh width.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lobosc/geometry.hpp"

namespace lobosc::oracle {

struct TridiagonalOperator {
  std::vector<double> diag;
  std::vector<double> offdiag;  // size diag.size() - 1
  double h;
  double Xi;
  int m;
  std::optional<geometry::ModelParams> params;
};

struct OracleConfig {
  int N = 40960;            // cells of the fine mesh (must be even)
  double xi_factor = 80.0;  // Xi = 1 + xi_factor / q
  double bisect_rtol = 1e-12;
};

// Physical assembly on N cells over (1, Xi).
TridiagonalOperator assemble(const geometry::ModelParams& p, int m, double Xi,
                             int N);

// Assembly from caller-supplied coefficient functions (test hook for
// discretizations with known exact spectra).
TridiagonalOperator assemble_with(const std::function<double(double)>& pfun,
                                  const std::function<double(double)>& Wfun,
                                  double lo, double hi, int N);

// Number of eigenvalues strictly below x (Sturm sequence with pivot guard).
int sturm_count_below(const TridiagonalOperator& T, double x);

// The k smallest eigenvalues, ascending, by bisection to relative width
// bisect_rtol.
std::vector<double> lowest_k(const TridiagonalOperator& T, int k,
                             double bisect_rtol = 1e-12);

struct OracleValue {
  double value;           // Richardson-extrapolated E_tilde
  double error_estimate;  // mesh + domain-truncation bound
};

// Lowest k values with one Richardson step (N and N/2 meshes) and a
// domain-robustness term from re-solving on a 1.5x larger box.
std::vector<OracleValue> eigenvalues(const geometry::ModelParams& p, int m,
                                     int k, const OracleConfig& cfg = {});

// ---- golden spectrum files -------------------------------------------

struct GoldenEntry {
  int n;
  double E_tilde;
  double err;
};

struct GoldenFile {
  double q = 0.0;
  double omega = 0.0;
  int m = 0;
  int N = 0;
  double Xi = 0.0;
  std::string extrapolation;
  std::vector<GoldenEntry> values;
};

GoldenFile make_golden(const geometry::ModelParams& p, int m, int k,
                       const OracleConfig& cfg = {});

std::string golden_to_json(const GoldenFile& g);
GoldenFile read_golden(const std::string& path);

}  // namespace lobosc::oracle
