#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace fbl {

// Uniform node-centered grid on an interval (dim 1) or a rectangle (dim 2).
// Spacing is equal on all axes; nodes sit at min + i*h.
struct Grid {
  int dim = 1;
  std::array<double, 2> min{0.0, 0.0};
  std::array<double, 2> max{1.0, 0.0};
  std::array<int, 2> cells{0, 0};
  double h = 0.0;

  int nx() const { return cells[0] + 1; }
  int ny() const { return dim == 2 ? cells[1] + 1 : 1; }
  std::size_t n_nodes() const { return static_cast<std::size_t>(nx()) * ny(); }
  double x(int i) const { return min[0] + i * h; }
  double y(int j) const { return dim == 2 ? min[1] + j * h : 0.0; }
  std::size_t node(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * nx() + i;
  }
  bool contains(double px, double py = 0.0, double slack = 1e-12) const;
};

Grid make_grid_1d(double xmin, double xmax, int n_cells);
Grid make_grid_2d(double xmin, double xmax, double ymin, double ymax,
                  int nx_cells, int ny_cells);

// Node-indexed scalar field on a grid. Stencil outputs mark boundary nodes
// with NaN; norms ignore those markers.
struct ScalarField {
  Grid grid;
  std::vector<double> values;
  bool nonneg = false;

  double& at(int i, int j = 0) { return values[grid.node(i, j)]; }
  double at(int i, int j = 0) const { return values[grid.node(i, j)]; }
  double max_abs() const;  // NaN markers excluded
  double min_value() const;
  void check_nonneg(const char* who) const;
};

ScalarField constant_field(const Grid& g, double value);
ScalarField field_from(const Grid& g, const std::function<double(double, double)>& f);

// Second-order centered stencils on interior nodes; boundary nodes carry NaN.
ScalarField laplacian(const ScalarField& f);
std::vector<ScalarField> gradient(const ScalarField& f);

/// Multilinear interpolation; throws std::domain_error outside the extents.
double sample(const ScalarField& f, double px, double py = 0.0);

// CSV dump: header "# dim,h,extents...,cells...", one row per node
// "x[,y],value", row-major, 17 significant digits. Round-trips bit-exactly.
void write_field_csv(const ScalarField& f, const std::string& path);
ScalarField read_field_csv(const std::string& path);

// Maximum |a-b| over nodes where both are non-NaN.
double max_nodal_diff(const ScalarField& a, const ScalarField& b);

}  // namespace fbl
