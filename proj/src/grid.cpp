#include "fbl/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fbl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_axis(double lo, double hi, int n_cells, const char* axis) {
  if (!(hi > lo))
    throw std::invalid_argument(std::string("grid: empty extent on axis ") + axis);
  if (n_cells < 8)
    throw std::invalid_argument(std::string("grid: need at least 8 cells on axis ") + axis);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

bool Grid::contains(double px, double py, double slack) const {
  const double sl = slack * (max[0] - min[0]);
  if (px < min[0] - sl || px > max[0] + sl) return false;
  if (dim == 2 && (py < min[1] - sl || py > max[1] + sl)) return false;
  return true;
}

Grid make_grid_1d(double xmin, double xmax, int n_cells) {
  validate_axis(xmin, xmax, n_cells, "x");
  Grid g;
  g.dim = 1;
  g.min = {xmin, 0.0};
  g.max = {xmax, 0.0};
  g.cells = {n_cells, 0};
  g.h = (xmax - xmin) / n_cells;
  return g;
}

Grid make_grid_2d(double xmin, double xmax, double ymin, double ymax,
                  int nx_cells, int ny_cells) {
  validate_axis(xmin, xmax, nx_cells, "x");
  validate_axis(ymin, ymax, ny_cells, "y");
  const double hx = (xmax - xmin) / nx_cells;
  const double hy = (ymax - ymin) / ny_cells;
  if (std::abs(hx - hy) > 1e-12 * hx)
    throw std::invalid_argument("grid: spacing must be equal on both axes");
  Grid g;
  g.dim = 2;
  g.min = {xmin, ymin};
  g.max = {xmax, ymax};
  g.cells = {nx_cells, ny_cells};
  g.h = hx;
  return g;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values)
    if (!std::isnan(v)) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values)
    if (!std::isnan(v)) m = std::min(m, v);
  return m;
}

void ScalarField::check_nonneg(const char* who) const {
  for (double v : values) {
    if (std::isnan(v) || v < 0.0)
      throw std::invalid_argument(std::string(who) + ": field must be finite and nonnegative");
  }
}

ScalarField constant_field(const Grid& g, double value) {
  ScalarField f;
  f.grid = g;
  f.values.assign(g.n_nodes(), value);
  f.nonneg = value >= 0.0;
  return f;
}

ScalarField field_from(const Grid& g, const std::function<double(double, double)>& fn) {
  ScalarField f;
  f.grid = g;
  f.values.resize(g.n_nodes());
  bool nn = true;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double v = fn(g.x(i), g.y(j));
      f.values[g.node(i, j)] = v;
      if (v < 0.0) nn = false;
    }
  f.nonneg = nn;
  return f;
}

ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid;
  if (g.nx() < 3 || (g.dim == 2 && g.ny() < 3))
    throw std::invalid_argument("laplacian: need at least 3 nodes per axis");
  ScalarField out = constant_field(g, kNaN);
  out.nonneg = false;
  const double ih2 = 1.0 / (g.h * g.h);
  if (g.dim == 1) {
    for (int i = 1; i < g.nx() - 1; ++i)
      out.at(i) = (f.at(i - 1) - 2.0 * f.at(i) + f.at(i + 1)) * ih2;
  } else {
    for (int j = 1; j < g.ny() - 1; ++j)
      for (int i = 1; i < g.nx() - 1; ++i)
        out.at(i, j) = (f.at(i - 1, j) + f.at(i + 1, j) + f.at(i, j - 1) + f.at(i, j + 1) -
                        4.0 * f.at(i, j)) * ih2;
  }
  return out;
}

std::vector<ScalarField> gradient(const ScalarField& f) {
  const Grid& g = f.grid;
  if (g.nx() < 3 || (g.dim == 2 && g.ny() < 3))
    throw std::invalid_argument("gradient: need at least 3 nodes per axis");
  std::vector<ScalarField> out;
  const double i2h = 1.0 / (2.0 * g.h);
  ScalarField dx = constant_field(g, kNaN);
  dx.nonneg = false;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 1; i < g.nx() - 1; ++i)
      dx.at(i, j) = (f.at(i + 1, j) - f.at(i - 1, j)) * i2h;
  out.push_back(std::move(dx));
  if (g.dim == 2) {
    ScalarField dy = constant_field(g, kNaN);
    dy.nonneg = false;
    for (int j = 1; j < g.ny() - 1; ++j)
      for (int i = 0; i < g.nx(); ++i)
        dy.at(i, j) = (f.at(i, j + 1) - f.at(i, j - 1)) * i2h;
    out.push_back(std::move(dy));
  }
  return out;
}

double sample(const ScalarField& f, double px, double py) {
  const Grid& g = f.grid;
  if (!g.contains(px, py))
    throw std::domain_error("sample: point outside grid extents");
  const double fx = std::min(std::max((px - g.min[0]) / g.h, 0.0), double(g.cells[0]));
  int i = std::min(int(fx), g.cells[0] - 1);
  const double tx = fx - i;
  if (g.dim == 1) return (1.0 - tx) * f.at(i) + tx * f.at(i + 1);
  const double fy = std::min(std::max((py - g.min[1]) / g.h, 0.0), double(g.cells[1]));
  int j = std::min(int(fy), g.cells[1] - 1);
  const double ty = fy - j;
  return (1.0 - tx) * (1.0 - ty) * f.at(i, j) + tx * (1.0 - ty) * f.at(i + 1, j) +
         (1.0 - tx) * ty * f.at(i, j + 1) + tx * ty * f.at(i + 1, j + 1);
}

void write_field_csv(const ScalarField& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_field_csv: cannot open " + path);
  const Grid& g = f.grid;
  out << "# " << g.dim << "," << fmt17(g.h) << "," << fmt17(g.min[0]) << "," << fmt17(g.max[0]);
  if (g.dim == 2) out << "," << fmt17(g.min[1]) << "," << fmt17(g.max[1]);
  out << "," << g.cells[0];
  if (g.dim == 2) out << "," << g.cells[1];
  out << "\n";
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      out << fmt17(g.x(i));
      if (g.dim == 2) out << "," << fmt17(g.y(j));
      out << "," << fmt17(f.at(i, j)) << "\n";
    }
  if (!out) throw std::runtime_error("write_field_csv: write failed for " + path);
}

ScalarField read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_field_csv: cannot open " + path);
  std::string header;
  if (!std::getline(in, header) || header.size() < 2 || header[0] != '#')
    throw std::runtime_error("read_field_csv: missing header in " + path);
  std::stringstream hs(header.substr(1));
  std::vector<double> hv;
  std::string tok;
  while (std::getline(hs, tok, ',')) hv.push_back(std::stod(tok));
  if (hv.empty()) throw std::runtime_error("read_field_csv: bad header in " + path);
  const int dim = int(hv[0]);
  Grid g;
  if (dim == 1) {
    if (hv.size() != 5) throw std::runtime_error("read_field_csv: bad 1D header");
    g = make_grid_1d(hv[2], hv[3], int(hv[4]));
  } else if (dim == 2) {
    if (hv.size() != 8) throw std::runtime_error("read_field_csv: bad 2D header");
    g = make_grid_2d(hv[2], hv[3], hv[4], hv[5], int(hv[6]), int(hv[7]));
  } else {
    throw std::runtime_error("read_field_csv: unsupported dim");
  }
  ScalarField f;
  f.grid = g;
  f.values.reserve(g.n_nodes());
  std::string line;
  bool nn = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto last = line.rfind(',');
    if (last == std::string::npos)
      throw std::runtime_error("read_field_csv: malformed row in " + path);
    const double v = std::stod(line.substr(last + 1));
    f.values.push_back(v);
    if (v < 0.0) nn = false;
  }
  if (f.values.size() != g.n_nodes())
    throw std::runtime_error("read_field_csv: node count mismatch in " + path);
  f.nonneg = nn;
  return f;
}

double max_nodal_diff(const ScalarField& a, const ScalarField& b) {
  if (a.values.size() != b.values.size())
    throw std::invalid_argument("max_nodal_diff: size mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    const double va = a.values[k], vb = b.values[k];
    if (std::isnan(va) || std::isnan(vb)) continue;
    m = std::max(m, std::abs(va - vb));
  }
  return m;
}

}  // namespace fbl
