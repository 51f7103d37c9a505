#pragma once

#include "fbl/exponents.hpp"
#include "fbl/grid.hpp"

namespace fbl {

struct EnergyReport {
  double dirichlet = 0.0;
  double potential = 0.0;
  double perimeter = 0.0;
  double total = 0.0;
};

// Grid-tied scales: below dead_threshold the continuum profile cannot be
// resolved on the grid; reg_delta_min is the matching regularization width.
double dead_threshold(const GammaParams& p, const Grid& g);  // c_alpha (h/2)^alpha
double reg_delta_min(const GammaParams& p, const Grid& g);   // c_alpha h^alpha

// Closed-form layer integral of the 1D profile potential over depth d:
// int_0^d (c_alpha s^alpha)^(-gamma) ds = c_alpha^(-gamma) d^(1-alpha*gamma)/(1-alpha*gamma).
double layer_potential_integral(const GammaParams& p, double d);

// Dirichlet + u^{-gamma} chi_{u>0} by midpoint quadrature; cells straddling
// {u <= tau} contribute the potential through the profile layer integral with
// the sub-cell width recovered by profile inversion. rescaled multiplies the
// potential by c_gamma.
EnergyReport energy_AP(const ScalarField& u, const GammaParams& p, bool rescaled);

// Dirichlet + |{u > tau}|.
EnergyReport energy_AC(const ScalarField& u, double tau = 0.0);

// Dirichlet + interface length of the indicated zero set (marching squares
// at level 1/2 on the indicator; 1D counts crossing points). The field must
// vanish on the indicated set within tau.
EnergyReport energy_F(const ScalarField& u, const ScalarField& zero_set_indicator,
                      double tau = 1e-9);

}  // namespace fbl
