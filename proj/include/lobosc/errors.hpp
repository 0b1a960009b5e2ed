#pragma once

#include <stdexcept>
#include <string>

namespace lobosc {

// Bad setup or a violated threshold precondition (message names the threshold).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Adaptive integration could not proceed; carries the last abscissa reached.
struct IntegrationError : std::runtime_error {
  double x_reached;
  IntegrationError(const std::string& what, double x)
      : std::runtime_error(what), x_reached(x) {}
};

// The two-point boundary-defect extrapolation failed its usability gate
// even after the retry schedule.
struct DefectNotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Root refinement could not start or did not terminate.
struct RefinementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shooting bracket count disagrees with the independent matrix count,
// or a refined spectrum violates ordering.  Diagnostic; never repaired
// silently.
struct SpectralConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Node count of a sampled eigenfunction does not match its spectral index.
struct IndexingConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lobosc
