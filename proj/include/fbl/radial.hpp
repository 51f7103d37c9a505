#pragma once

#include <vector>

#include "fbl/exponents.hpp"

namespace fbl {

// Radial exterior solution: u'' + (n-1) u'/r = -(gamma/2) u^(-gamma-1) on
// (1, 1+mu), u(1) = 1, u = 0 beyond the free boundary r = 1+mu.
struct RadialSolution {
  double gamma = 0.0;
  int n = 1;
  double mu = 0.0;
  std::vector<double> r, u;  // samples on [1, 1+mu], u strictly decreasing

  /// Piecewise-linear value at radius; 0 for radius >= 1+mu.
  double value(double radius) const;
};

// Shoots from the free boundary inward, seeded by the profile asymptotic
// u ~ c_alpha t^alpha at offset t0; bisects mu until u(1)=1 within shoot_tol,
// then extrapolates the seeding offset t0 -> 0 (Aitken on a t0 halving
// sequence). Throws std::runtime_error naming the scanned interval when no
// bracket for mu exists.
RadialSolution radial_exterior(const GammaParams& p, int n, double shoot_tol = 1e-9);

}  // namespace fbl
