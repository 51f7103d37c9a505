#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fbl/radial.hpp"

using namespace fbl;

TEST_CASE("1D closed form: mu = alpha = 2/(2+gamma)") {
  for (double gamma : {0.25, 0.5, 1.0, 1.5, 1.9}) {
    const GammaParams p = derive_params(gamma);
    const RadialSolution sol = radial_exterior(p, 1);
    CHECK(std::abs(sol.mu - p.alpha) < 1e-5);
  }
}

TEST_CASE("spec examples gamma=1 and gamma=0.5 in 1D") {
  const RadialSolution a = radial_exterior(derive_params(1.0), 1);
  CHECK(a.mu == doctest::Approx(2.0 / 3.0).epsilon(2e-5));
  const RadialSolution b = radial_exterior(derive_params(0.5), 1);
  CHECK(b.mu == doctest::Approx(0.8).epsilon(2e-5));
}

TEST_CASE("profile invariants") {
  const GammaParams p = derive_params(1.0);
  const RadialSolution sol = radial_exterior(p, 2);
  CHECK(sol.u.front() == 1.0);
  CHECK(sol.u.back() == 0.0);
  CHECK(sol.r.front() == 1.0);
  CHECK(sol.r.back() == doctest::Approx(1.0 + sol.mu));
  for (std::size_t k = 1; k < sol.u.size(); ++k) CHECK(sol.u[k] < sol.u[k - 1]);
  // interpolation endpoints and interior sanity
  CHECK(sol.value(1.0) == doctest::Approx(1.0));
  CHECK(sol.value(1.0 + sol.mu) == 0.0);
  CHECK(sol.value(2.0 + sol.mu) == 0.0);
  const double mid = sol.value(1.0 + sol.mu / 2);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
}

TEST_CASE("curvature shrinks the free boundary offset: mu(n=2) < mu(n=1)") {
  const GammaParams p = derive_params(1.0);
  const double mu1 = radial_exterior(p, 1).mu;
  const double mu2 = radial_exterior(p, 2).mu;
  CHECK(mu2 < mu1);
}

TEST_CASE("mu decreases toward 2 in n=2 (free boundary collapses onto the sphere)") {
  double prev = 1e9;
  for (double gamma : {1.5, 1.8, 1.9, 1.95}) {
    const GammaParams p = derive_params(gamma);
    const double mu = radial_exterior(p, 2).mu;
    CHECK(mu < prev);
    CHECK(mu > 0.0);
    prev = mu;
  }
}

TEST_CASE("invalid dimension") {
  CHECK_THROWS_AS(radial_exterior(derive_params(1.0), 0), std::invalid_argument);
}
