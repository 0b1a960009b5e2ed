#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "lobosc/eigensolver.hpp"
#include "lobosc/errors.hpp"
#include "lobosc/oracle.hpp"
#include "test_support.hpp"

using namespace lobosc;

TEST_CASE("shooting spectrum reproduces the committed reference levels") {
  REQUIRE(std::filesystem::exists(testsupport::golden_path()));
  const auto g = oracle::read_golden(testsupport::golden_path());
  const auto p = geometry::params_from_q(0.5, 1.0);
  const auto eps = eigensolver::eigenvalues(p, 2, 1e-10);
  REQUIRE(eps.size() == 3);
  for (int n = 0; n <= 2; ++n) {
    CHECK(eps[n].n == n);
    const double budget = g.values[n].err + eps[n].err + 1e-8;
    CHECK(std::abs(eps[n].E_tilde - g.values[n].E_tilde) <= budget);
    // derived fields are exact functions of the root
    CHECK(eps[n].lambda == -(eps[n].E_tilde + 0.25));
    CHECK(eps[n].E == eps[n].E_tilde * p.omega / (2.0 * p.q));
  }
  CHECK(eps[0].E_tilde < eps[1].E_tilde);
  CHECK(eps[1].E_tilde < eps[2].E_tilde);
}

TEST_CASE("parameter routes are interchangeable down to the last bit") {
  // q = a^2 omega / 2, so (a^2 = 10, omega = 1) and (q = 5, omega = 1)
  // describe the same operator and must produce identical arithmetic.
  const auto via_a2 = eigensolver::eigenvalues(
      geometry::params_from_a2(10.0, 1.0), 1, 1e-10);
  const auto via_q = eigensolver::eigenvalues(
      geometry::params_from_q(5.0, 1.0), 1, 1e-10);
  REQUIRE(via_a2.size() == via_q.size());
  for (size_t i = 0; i < via_q.size(); ++i) {
    CHECK(via_a2[i].E_tilde == via_q[i].E_tilde);
    CHECK(via_a2[i].E == via_q[i].E);
    CHECK(via_a2[i].lambda == via_q[i].lambda);
  }
}

TEST_CASE("roots do not depend on the asymptotic start point") {
  const auto p = geometry::params_from_q(5.0, 1.0);
  eigensolver::SolverConfig deep;
  deep.shoot.xi_start = spheroidal::default_xi_start(p.q, deep.shoot) + 10.0;
  const auto base = eigensolver::eigenvalues(p, 1, 1e-11);
  const auto far = eigensolver::eigenvalues(p, 1, 1e-11, deep);
  REQUIRE(base.size() == far.size());
  for (size_t i = 0; i < base.size(); ++i) {
    CHECK(std::abs(base[i].E_tilde - far[i].E_tilde) <=
          1e-9 * std::max(1.0, std::abs(base[i].E_tilde)));
  }
}

TEST_CASE("bracket_scan finds each level exactly once") {
  const auto p = geometry::params_from_q(0.5, 1.0);
  const auto br = eigensolver::bracket_scan(p, 0.5, 14.0, 270);
  REQUIRE(br.size() == 3);
  // doubling the grid does not create or lose sign changes, and each
  // refined bracket stays on top of its coarse counterpart
  const auto br2 = eigensolver::bracket_scan(p, 0.5, 14.0, 540);
  CHECK(br2.size() == br.size());
  for (size_t i = 0; i < br.size(); ++i) {
    const double mid1 = 0.5 * (br[i].first + br[i].second);
    const double mid2 = 0.5 * (br2[i].first + br2[i].second);
    CHECK(std::abs(mid2 - mid1) <= (br[i].second - br[i].first));
  }
}

TEST_CASE("refine_root demands a sign change") {
  // no eigenvalue lies in [2.5, 3.0] for q = 0.5, so the defect keeps its
  // sign there and refinement must refuse rather than fabricate a root
  const auto p = geometry::params_from_q(0.5, 1.0);
  CHECK_THROWS_AS(eigensolver::refine_root(p, {2.5, 3.0}, 1e-10),
                  RefinementError);
}

TEST_CASE("flat limit: levels approach 2n+1 from above as q grows") {
  // E/omega = E_tilde/(2q); the curvature correction is positive and
  // shrinks like 1/q, so the defect d_n = E/omega - (2n+1) must drop by
  // at least 4x from q=5 to q=50.
  const auto at5 = eigensolver::eigenvalues(geometry::params_from_q(5.0, 1.0), 2, 1e-10);
  const auto at50 = eigensolver::eigenvalues(geometry::params_from_q(50.0, 1.0), 2, 1e-10);
  for (int n = 0; n <= 2; ++n) {
    const double d5 = at5[n].E_tilde / 10.0 - (2 * n + 1);
    const double d50 = at50[n].E_tilde / 100.0 - (2 * n + 1);
    CHECK(d5 > 0.0);
    CHECK(d50 > 0.0);
    CHECK(d50 < 0.25 * d5);
  }
}

TEST_CASE("strong curvature raises the ground level") {
  const auto small_q = eigensolver::eigenvalues(geometry::params_from_q(0.1, 1.0), 0, 1e-10);
  const auto unit_q = eigensolver::eigenvalues(geometry::params_from_q(1.0, 1.0), 0, 1e-10);
  const double r_small = small_q[0].E_tilde / (2.0 * 0.1);
  const double r_unit = unit_q[0].E_tilde / (2.0 * 1.0);
  CHECK(r_small > 2.0 * r_unit);
}

TEST_CASE("a sign error in the spectral parameter cannot pass silently") {
  const auto p = geometry::params_from_q(0.5, 1.0);
  eigensolver::SolverConfig cfg;
  cfg.shoot.flip_lambda_sign = true;
  CHECK_THROWS_AS(eigensolver::eigenvalues(p, 1, 1e-10, cfg),
                  SpectralConsistencyError);
}

TEST_CASE("sweep: ordering, monotone flags, and single-point consistency") {
  const auto table = eigensolver::sweep({5.0, 0.5}, 1.0, 1, 1e-10);
  REQUIRE(table.rows.size() == 4);
  // rows come out sorted by q then n
  CHECK(table.rows[0].q == 0.5);
  CHECK(table.rows[0].n == 0);
  CHECK(table.rows[1].n == 1);
  CHECK(table.rows[2].q == 5.0);
  // E/omega falls with growing q, level by level
  for (int n = 0; n <= 1; ++n) {
    CHECK(table.monotone_decreasing[n]);
    CHECK(table.rows[n].E_over_omega > table.rows[2 + n].E_over_omega);
  }
  // a one-point sweep is exactly the direct solve
  const auto single = eigensolver::sweep({0.5}, 1.0, 1, 1e-10);
  const auto direct = eigensolver::eigenvalues(geometry::params_from_q(0.5, 1.0), 1, 1e-10);
  for (int n = 0; n <= 1; ++n) {
    CHECK(single.rows[n].E_tilde == direct[n].E_tilde);
    CHECK(single.rows[n].E_over_omega == direct[n].E_tilde / (2.0 * 0.5));
  }
}
