#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fbl/minimize.hpp"

using namespace fbl;

TEST_CASE("zero data stays zero") {
  const Grid g = make_grid_1d(0.0, 1.0, 64);
  const GammaParams p = derive_params(1.0);
  SolverConfig cfg;
  cfg.max_iters = 5000;
  const MinimizeResult r =
      minimize(g, BoundarySpec::dirichlet_1d(0.0, 0.0), ObjectiveAP{p, false}, cfg);
  CHECK(r.converged);
  CHECK(r.field.max_abs() == 0.0);
  CHECK(r.energy.total == 0.0);
}

TEST_CASE("exact-profile boundary data reproduces the profile in L-infinity") {
  const GammaParams p = derive_params(1.0);
  const int n = 512;
  const Grid g = make_grid_1d(0.0, 1.0, n);
  BoundarySpec bc = BoundarySpec::dirichlet_1d(profile(p, 1.0, 0), 0.0);
  SolverConfig cfg;
  cfg.max_iters = 400000;
  cfg.energy_tol = 1e-13;
  const MinimizeResult r = minimize(g, bc, ObjectiveAP{p, false}, cfg);
  CHECK(r.converged);
  double maxerr = 0.0;
  for (int i = 0; i <= n; ++i)
    maxerr = std::max(maxerr, std::abs(r.field.at(i) - profile(p, 1.0 - g.x(i), 0)));
  CHECK(maxerr < 5e-3);
}

TEST_CASE("L-infinity error decays under refinement (singular layer rate)") {
  const GammaParams p = derive_params(1.0);
  auto solve_err = [&](int n) {
    const Grid g = make_grid_1d(0.0, 1.0, n);
    BoundarySpec bc = BoundarySpec::dirichlet_1d(profile(p, 1.0, 0), 0.0);
    SolverConfig cfg;
    cfg.max_iters = 400000;
    cfg.energy_tol = 1e-13;
    const MinimizeResult r = minimize(g, bc, ObjectiveAP{p, false}, cfg);
    double maxerr = 0.0;
    for (int i = 0; i <= n; ++i)
      maxerr = std::max(maxerr, std::abs(r.field.at(i) - profile(p, 1.0 - g.x(i), 0)));
    return maxerr;
  };
  const double e1 = solve_err(128), e2 = solve_err(256);
  CHECK(e1 / e2 >= 1.3);
}

TEST_CASE("Alt-Caffarelli objective: support cap active") {
  const Grid g = make_grid_1d(0.0, 1.0, 256);
  BoundarySpec bc = BoundarySpec::dirichlet_1d(2.0, 0.0);
  SolverConfig cfg;
  cfg.max_iters = 200000;
  cfg.energy_tol = 1e-13;
  const MinimizeResult r = minimize(g, bc, ObjectiveAC{}, cfg);
  CHECK(r.converged);
  // minimizer of the one-parameter family 4/a + a capped at a = 1: the ramp
  double maxdev = 0.0;
  for (int i = 0; i <= 256; ++i)
    maxdev = std::max(maxdev, std::abs(r.field.at(i) - 2.0 * (1.0 - g.x(i))));
  CHECK(maxdev < 0.02);
  CHECK(std::abs(r.energy.total - 5.0) < 0.05);
}

TEST_CASE("energy trace is nonincreasing within each stage") {
  const GammaParams p = derive_params(1.2);
  const Grid g = make_grid_1d(0.0, 1.0, 128);
  BoundarySpec bc = BoundarySpec::dirichlet_1d(1.0, 0.0);
  SolverConfig cfg;
  cfg.max_iters = 100000;
  const MinimizeResult r = minimize(g, bc, ObjectiveAP{p, true}, cfg);
  CHECK(r.converged);
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    if (r.trace[k].stage != r.trace[k - 1].stage) continue;
    CHECK(r.trace[k].total <= r.trace[k - 1].total + cfg.energy_tol);
  }
  // continuation ladder recorded in decreasing delta order
  for (std::size_t k = 1; k < r.trace.size(); ++k)
    CHECK(r.trace[k].delta <= r.trace[k - 1].delta);
}

TEST_CASE("zero-set monotonicity under data scaling") {
  const GammaParams p = derive_params(1.0);
  const Grid g = make_grid_1d(0.0, 1.0, 256);
  SolverConfig cfg;
  cfg.max_iters = 200000;
  cfg.energy_tol = 1e-13;
  const MinimizeResult big =
      minimize(g, BoundarySpec::dirichlet_1d(1.0, 0.0), ObjectiveAP{p, false}, cfg);
  const MinimizeResult small =
      minimize(g, BoundarySpec::dirichlet_1d(0.5, 0.0), ObjectiveAP{p, false}, cfg);
  for (int i = 0; i <= 256; ++i)
    if (big.field.at(i) == 0.0) CHECK(small.field.at(i) == 0.0);
}

TEST_CASE("invalid configurations are rejected") {
  const Grid g = make_grid_1d(0.0, 1.0, 64);
  const GammaParams p = derive_params(1.0);
  SolverConfig bad;
  bad.ladder = {1.0, 2.0};  // not decreasing
  CHECK_THROWS_AS(
      minimize(g, BoundarySpec::dirichlet_1d(1.0, 0.0), ObjectiveAP{p, false}, bad),
      std::invalid_argument);
  BoundarySpec nb;
  nb.facets[0].dirichlet = true;  // missing trace
  CHECK_THROWS_AS(minimize(g, nb, ObjectiveAP{p, false}, SolverConfig{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      minimize(g, BoundarySpec::dirichlet_1d(-1.0, 0.0), ObjectiveAP{p, false},
               SolverConfig{}),
      std::invalid_argument);
}

TEST_CASE("nonconvergence carries the partial result") {
  const GammaParams p = derive_params(1.0);
  const Grid g = make_grid_1d(0.0, 1.0, 128);
  SolverConfig cfg;
  cfg.max_iters = 3;  // force failure
  cfg.energy_tol = 0.0;
  try {
    minimize(g, BoundarySpec::dirichlet_1d(1.0, 0.0), ObjectiveAP{p, false}, cfg);
    CHECK(false);
  } catch (const ConvergenceFailure& e) {
    CHECK(e.partial.converged == false);
    CHECK(e.partial.field.values.size() == g.n_nodes());
    CHECK(!e.partial.trace.empty());
  }
}
