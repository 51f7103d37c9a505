#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace fbl {

// Half-domain grid for the degenerate problem div(x_n^s grad v) = 0 on
// {x_n > 0}. Tangential axes (1 or 2) are node-centered; the x_n axis is
// staggered (rows at (j+1/2)h) so no stencil divides by x_n = 0, or
// node-centered (rows at j h) for the limit problem whose bottom row carries
// Dirichlet trace data.
struct HalfGrid {
  int tdim = 1;
  std::array<double, 2> tmin{0.0, 0.0}, tmax{1.0, 0.0};
  std::array<int, 2> tcells{0, 0};
  int zrows = 0;
  double h = 0.0;
  bool staggered = true;

  int tn(int a) const { return tcells[a] + 1; }
  double tx(int a, int i) const { return tmin[a] + i * h; }
  double zrow(int j) const { return staggered ? (j + 0.5) * h : j * h; }
  double top() const { return zrow(zrows - 1); }
  std::size_t n_nodes() const {
    std::size_t n = std::size_t(tn(0)) * zrows;
    if (tdim == 2) n *= tn(1);
    return n;
  }
  std::size_t node(int i0, int i1, int j) const {
    if (tdim == 1) return std::size_t(j) * tn(0) + i0;
    return (std::size_t(j) * tn(1) + i1) * tn(0) + i0;
  }
};

HalfGrid make_half_grid(int tdim, std::array<double, 2> tmin, std::array<double, 2> tmax,
                        std::array<int, 2> tcells, int zrows, double h, bool staggered);

struct WeightedField {
  HalfGrid grid;
  std::vector<double> values;
  double at(int i0, int i1, int j) const { return values[grid.node(i0, i1, j)]; }
  double& at(int i0, int i1, int j) { return values[grid.node(i0, i1, j)]; }
  /// Multilinear interpolation in (x', z); z clamped to the row range.
  double sample(double x0, double x1, double z) const;
};

// s = LIMIT is expressed by limit = true (the s -> -1 problem).
struct WeightedProblem {
  HalfGrid grid;
  double s = -0.5;
  bool limit = false;
  // outer Dirichlet data, evaluated at (x0, x1, z)
  std::function<double(double, double, double)> data;
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
};

// Divergence-form finite differences with face weights (x_n at faces)^s;
// the x_n = 0 row has no bottom flux, which realizes the vanishing weighted
// flux condition. Jacobi-preconditioned conjugate gradients, iteration cap
// 1e5. Throws on nonconvergence with the residual history in the message.
WeightedField solve_weighted(const WeightedProblem& prob, double solve_tol,
                             SolveStats* stats = nullptr);

// Limit problem: (i) harmonic trace in x' on {x_n = 0} with corner data;
// (ii) interior equation with s = -1 and the trace as bottom Dirichlet data.
// The returned field lives on the node-centered (non-staggered) grid.
WeightedField solve_limit(const WeightedProblem& prob, double solve_tol,
                          SolveStats* stats = nullptr);

struct BarrierSample {
  std::array<double, 3> x{};  // (x0, x1, z)
  double residual = 0.0;
};

// Closed-form residual (Laplacian + s d_n /x_n) of the proof barriers:
//   q1 = c0/2 + C0(-|x'|^2 + z^2/(1+s) + z^(1-s))
//   q2 = c0   + C0(-|x'|^2 + (z^2 - z^(1-s))/(1+s))
// evaluated term-by-term at the sample points. n_dim is the ambient dimension
// (x' has n_dim - 1 components).
std::vector<BarrierSample> barrier_residual_q(double s, int which, double c0, double C0,
                                              int n_dim,
                                              const std::vector<std::array<double, 3>>& pts);

// sup over [0,1] of |(z^2 - z^(1-s))/(1+s) - z^2 log z| on a uniform grid.
double barrier_limit_pair_sup(double s, int grid_points = 10000);

struct C1AlphaFit {
  std::vector<double> a_prime;  // tangential slope(s)
  double alpha_fit = 0.0;
  double C_fit = 0.0;
  double lsq_residual = 0.0;
};

// Least-squares tangential slope on the bottom row near the origin of the
// tangential axes, then the smallest C with |v - v0 - a'.x'| <= C |x|^(1+alpha)
// over the half-ball, alpha from a log-log dyadic regression of the residual.
C1AlphaFit c1alpha_fit(const WeightedField& v, double fit_radius, double ball_radius);

}  // namespace fbl
