#pragma once

#include <array>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "fbl/energy.hpp"
#include "fbl/exponents.hpp"
#include "fbl/grid.hpp"

namespace fbl {

// Per-facet boundary condition. Facet order: 1D {xmin, xmax};
// 2D {xmin, xmax, ymin, ymax}. A facet is either Dirichlet with a trace
// function of (x, y), or free (unconstrained, natural condition).
struct BoundarySpec {
  struct Facet {
    bool dirichlet = false;
    std::function<double(double, double)> trace;
  };
  std::array<Facet, 4> facets;

  static BoundarySpec all_dirichlet(std::function<double(double, double)> trace);
  static BoundarySpec dirichlet_1d(double left, double right);
};

struct SolverConfig {
  double delta = 0.0;      // base regularization width; 0 = c_alpha h^alpha (AP), h (AC)
  double tau = 0.0;        // dead-core threshold; 0 = c_alpha (h/2)^alpha (AP), delta/2 (AC)
  int max_iters = 200000;  // per continuation stage
  enum class Step { fixed, backtracking } step = Step::backtracking;
  double step_size = 0.0;  // initial trial step; 0 = h^2/4
  double energy_tol = 1e-12;
  // delta multiples, decreasing. Descent digs dead zones sized by the active
  // delta and cannot migrate a free boundary back outward, so wide-delta
  // stages displace the interface irreversibly; a single sharp stage places
  // it within one cell.
  std::vector<double> ladder{0.03125};
};

struct ObjectiveAP {
  GammaParams params;
  bool rescaled = false;
};
struct ObjectiveAC {};
using Objective = std::variant<ObjectiveAP, ObjectiveAC>;

struct TraceRow {
  long iter = 0;
  int stage = 0;
  double delta = 0.0, dirichlet = 0.0, potential = 0.0, total = 0.0;
};

struct MinimizeResult {
  ScalarField field;      // dead-core thresholded minimizer
  ScalarField raw_field;  // final iterate before thresholding (sub-cell interface data)
  bool converged = false;
  long iterations = 0;
  std::vector<TraceRow> trace;
  EnergyReport energy;  // unregularized energy of `field`
};

// Thrown when a continuation stage exhausts max_iters; carries the last
// iterate and the energy trace.
struct ConvergenceFailure : std::runtime_error {
  MinimizeResult partial;
  explicit ConvergenceFailure(MinimizeResult r)
      : std::runtime_error("minimize: stage did not converge within max_iters"),
        partial(std::move(r)) {}
};

// Projected gradient descent (u >= 0, Dirichlet nodes pinned) with
// backtracking line search on the delta-regularized energy, continued down
// the delta ladder, then thresholded at tau (strict inequality: values equal
// to tau stay). Reported energy is the unregularized one of the result.
MinimizeResult minimize(const Grid& grid, const BoundarySpec& boundary,
                        const Objective& objective, const SolverConfig& config,
                        const std::optional<ScalarField>& initial = std::nullopt);

}  // namespace fbl
