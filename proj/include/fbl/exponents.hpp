#pragma once

#include <stdexcept>

namespace fbl {

// Exponent algebra for the singular potential u^{-gamma} chi_{u>0}, gamma in (0,2).
// Everything downstream (profiles, comparison functions, the hodograph map,
// the linearized weight x_n^s) is a closed-form function of these five numbers.
struct GammaParams {
  double gamma;    // potential exponent, in (0,2)
  double alpha;    // profile homogeneity 2/(2+gamma), in (1/2,1)
  double c_alpha;  // profile coefficient alpha^(-alpha) = ((gamma+2)/2)^(2/(gamma+2)), > 1
  double s;        // degenerate-equation weight exponent 2(alpha-1), in (-1,0)
  double c_gamma;  // potential rescaling (2-gamma)^2/16, in (0,1/4)
};

/// Builds the full parameter set from gamma; throws std::domain_error outside (0,2).
GammaParams derive_params(double gamma);

// pow via exp/log of a positive argument; 0^e handled by limits.
// Uniformly accurate for the fractional exponents near gamma -> 2.
double positive_pow(double base, double expo);

// 1D profile c_alpha (t^+)^alpha and its derivatives (order 0, 1, 2).
// Derivative orders return signed infinity at t == 0 (the free boundary);
// callers must branch on the boundary explicitly.
double profile(const GammaParams& p, double t, int order = 0);

/// Inverse of the profile on [0, inf): returns t >= 0 with profile(t) == u_val.
double profile_inverse(const GammaParams& p, double u_val);

// Radial comparison functions for the viscosity definitions:
// psi_u(d) = c_alpha d^alpha + mu d^(2-alpha), psi_w(d) = d + mu d^(1-s).
double comparison_psi_u(const GammaParams& p, double d, double mu);
double comparison_psi_w(const GammaParams& p, double d, double mu);

enum class HodographDir { forward, backward };

// forward: u -> w = c_alpha^(-1/alpha) u^(1/alpha); backward: w -> u = c_alpha w^alpha.
// The transformed 1D profile is the linear ramp w(t) = t^+.
double hodograph(const GammaParams& p, double val, HodographDir dir);

}  // namespace fbl
