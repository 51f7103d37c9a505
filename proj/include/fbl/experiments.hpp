#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fbl/energy.hpp"
#include "fbl/exponents.hpp"
#include "fbl/free_boundary.hpp"
#include "fbl/grid.hpp"
#include "fbl/minimize.hpp"
#include "fbl/radial.hpp"

namespace fbl {

// Weiss-type quantity Phi(r) = r^(1-n) F_{B_r}(u,E) - (1/2) r^(-n) int_{dB_r} u^2.
struct MonotonicityTrace {
  std::vector<double> radii;
  std::vector<double> phi;
  std::string description;
};

MonotonicityTrace monotonicity_trace(const ScalarField& u, const ScalarField& zero_ind,
                                     std::array<double, 2> center,
                                     const std::vector<double>& radii);

struct SweepEntry {
  double gamma = 0.0;
  EnergyReport energy;
  double gap = 0.0;          // total - reference value
  double l2_distance = 0.0;  // to the reference minimizer
  double hausdorff = 0.0;    // interface distance to the reference zero set
  double mu = 0.0;           // radial geometry only
  double flatness_ratio = std::numeric_limits<double>::quiet_NaN();  // when measured
};

struct SweepReport {
  std::vector<double> gammas;
  std::vector<SweepEntry> entries;
  double reference_value = 0.0;
  std::string reference_provenance;
  std::vector<std::array<double, 2>> truncation_diagnostic;  // (t, energy) rows
};

struct OneDGeometry {
  double left = 1.0, right = 0.0;
  int cells = 1024;
};
struct RadialGeometry {
  int n = 2;
};

// gamma -> 2: per gamma minimize the rescaled functional on the 1D geometry
// and compare against the analytic Dirichlet-perimeter reference; the radial
// geometry runs the exterior ODE per gamma (free boundary radius 1+mu).
// Sweep members are independent; jobs > 1 runs them concurrently.
SweepReport gamma_to_2_sweep(const OneDGeometry& geo, const std::vector<double>& gammas,
                             const SolverConfig& config, int jobs = 1);
SweepReport gamma_to_2_sweep(const RadialGeometry& geo, const std::vector<double>& gammas,
                             double shoot_tol = 1e-9, bool measure_flatness = false,
                             int jobs = 1);

// gamma -> 0: per gamma minimize the unrescaled functional; the reference is
// the Alt-Caffarelli minimizer computed on the same grid, plus the truncation
// diagnostic E_gamma((u_ref - t)^+) for a ladder of t.
SweepReport gamma_to_0_sweep(const OneDGeometry& geo, const std::vector<double>& gammas,
                             const SolverConfig& config, int jobs = 1);

struct DecayRow {
  double radius = 0.0, epsilon = 0.0;
  double ratio = 0.0, slack = 0.0;  // ratio vs previous radius; 0 on the first row
  bool flagged = false;             // ratio above 0.5 + slack
  bool floor_dominated = false;     // epsilon at the discretization floor
  std::array<double, 2> nu{0.0, 1.0};
};

struct DecayResult {
  bool in_regime = false;  // base certificate had epsilon <= 0.1
  std::vector<DecayRow> rows;
};

// Certificates at radii base_radius * prod(rho_ladder[0..k]); flags any ratio
// above 0.5 + slack with slack = 4h/(eps_prev * radius).
DecayResult flatness_decay_run(const ScalarField& u, const GammaParams& params,
                               std::array<double, 2> center, double base_radius,
                               const std::vector<double>& rho_ladder);

struct HarnackReport {
  bool trapped = false;  // x_n^+ <= w <= (x_n+a)^+ held on B_r samples
  double c_plus = 0.0, c_minus = 0.0, c_max = 0.0;
  std::string branch;
};

// Largest c with (x_n + c a)^+ <= w and largest c with w <= (x_n + (1-c)a)^+
// on B_{r/2}(x0); x_n is the y-coordinate of the field.
HarnackReport harnack_dichotomy_check(const ScalarField& w, std::array<double, 2> x0,
                                      double r, double a);

struct TrapReport {
  double C_lower = 0.0, C_upper = 0.0;
  double C_over_eps = 0.0;
};

// Smallest constants with (1 - C_lower) u0(d) <= u <= (1 + C_upper) u0(d) on
// {u > tau, d > 2h}, d the exact distance to the extracted interface.
TrapReport profile_trap_check(const ScalarField& u, const GammaParams& params,
                              double eps_flat);

// Embed a radial solution (centered at the origin) into a 2D patch;
// radii below the sample range continue linearly.
ScalarField embed_radial(const RadialSolution& sol, const Grid& patch);

/// Pointwise hodograph transform of a nonnegative field.
ScalarField hodograph_field(const ScalarField& u, const GammaParams& params);

void write_phi_trace_csv(const MonotonicityTrace& tr, const std::string& path);
void write_sweep_csv(const SweepReport& rep, const std::string& path);
void write_decay_csv(const DecayResult& res, const std::string& path);

}  // namespace fbl
