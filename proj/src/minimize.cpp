#include "fbl/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fbl {

BoundarySpec BoundarySpec::all_dirichlet(std::function<double(double, double)> trace) {
  BoundarySpec b;
  for (auto& f : b.facets) {
    f.dirichlet = true;
    f.trace = trace;
  }
  return b;
}

BoundarySpec BoundarySpec::dirichlet_1d(double left, double right) {
  BoundarySpec b;
  b.facets[0].dirichlet = true;
  b.facets[0].trace = [left](double, double) { return left; };
  b.facets[1].dirichlet = true;
  b.facets[1].trace = [right](double, double) { return right; };
  return b;
}

namespace {

// smoothstep ramp: 0 at 0 (with zero slope), 1 beyond 1
double ramp(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * (3.0 - 2.0 * x);
}
double ramp_d(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return 6.0 * x * (1.0 - x);
}

struct Potential {
  bool ac = false;
  double gamma = 0.0, scale = 1.0, delta = 1.0;
  double tau = 0.0, alpha = 1.0, c_alpha = 1.0;  // AP layer model

  // mollified singular potential, used on fully live cells
  double w(double u) const {
    if (ac) return scale * ramp(u / delta);
    const double r = ramp(u / delta);
    if (r == 0.0) return 0.0;
    return scale * positive_pow(u * u + delta * delta, -0.5 * gamma) * r;
  }
  double dw(double u) const {
    if (ac) return scale * ramp_d(u / delta) / delta;
    const double r = ramp(u / delta), rd = ramp_d(u / delta);
    if (r == 0.0 && rd == 0.0) return 0.0;
    const double q = positive_pow(u * u + delta * delta, -0.5 * gamma);
    return scale * (-gamma * u * q / (u * u + delta * delta) * r + q * rd / delta);
  }

};

struct Workspace {
  const Grid& g;
  std::vector<bool> pinned;
  std::vector<double> quad_w;  // nodal quadrature weights (trapezoid product)

  explicit Workspace(const Grid& grid) : g(grid) {
    pinned.assign(g.n_nodes(), false);
    quad_w.assign(g.n_nodes(), 0.0);
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        double w = (i == 0 || i == g.nx() - 1) ? 0.5 : 1.0;
        if (g.dim == 2) w *= (j == 0 || j == g.ny() - 1) ? 0.5 : 1.0;
        quad_w[g.node(i, j)] = w * (g.dim == 2 ? g.h * g.h : g.h);
      }
  }
};

// Cell-based AP potential for descent: mollified midpoint value on every
// cell. Smooth in the node values (no reclassification cliffs); exact zeros
// cost nothing, and the delta-continuation removes the sub-delta discount.
// The reporting quadrature (energy_AP) prices straddling cells by the exact
// profile layer integral instead.
double ap_cell_pot_1d(const Potential& pot, double a, double b, double h, double* da,
                      double* db) {
  const double m = 0.5 * (a + b);
  if (da) *da = 0.5 * pot.dw(m) * h;
  if (db) *db = 0.5 * pot.dw(m) * h;
  return pot.w(m) * h;
}

double ap_cell_pot_2d(const Potential& pot, const double v[4], double h, double dv[4]) {
  const double m = 0.25 * (v[0] + v[1] + v[2] + v[3]);
  if (dv) {
    const double dm = 0.25 * pot.dw(m) * h * h;
    for (int c = 0; c < 4; ++c) dv[c] = dm;
  }
  return pot.w(m) * h * h;
}

double reg_energy(const Grid& g, const std::vector<double>& u, const Potential& pot,
                  const std::vector<double>& quad_w, double* dir_out = nullptr,
                  double* pot_out = nullptr) {
  double dir = 0.0, p = 0.0;
  const int nx = g.nx();
  if (g.dim == 1) {
    for (int i = 0; i < g.cells[0]; ++i) {
      const double du = (u[i + 1] - u[i]) / g.h;
      dir += du * du * g.h;
      if (!pot.ac) p += ap_cell_pot_1d(pot, u[i], u[i + 1], g.h, nullptr, nullptr);
    }
  } else {
    const double i2h = 1.0 / (2.0 * g.h), h2 = g.h * g.h;
    for (int j = 0; j < g.cells[1]; ++j) {
      const int base = j * nx;
      for (int i = 0; i < g.cells[0]; ++i) {
        const double u00 = u[base + i], u10 = u[base + i + 1];
        const double u01 = u[base + nx + i], u11 = u[base + nx + i + 1];
        const double gx = (u10 + u11 - u00 - u01) * i2h;
        const double gy = (u01 + u11 - u00 - u10) * i2h;
        dir += (gx * gx + gy * gy) * h2;
        if (!pot.ac) {
          const double v[4] = {u00, u10, u11, u01};
          p += ap_cell_pot_2d(pot, v, g.h, nullptr);
        }
      }
    }
  }
  if (pot.ac)
    for (std::size_t k = 0; k < u.size(); ++k) p += quad_w[k] * pot.w(u[k]);
  if (dir_out) *dir_out = dir;
  if (pot_out) *pot_out = p;
  return dir + p;
}

void reg_gradient(const Grid& g, const std::vector<double>& u, const Potential& pot,
                  const Workspace& ws, std::vector<double>& grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  const int nx = g.nx();
  if (g.dim == 1) {
    for (int i = 0; i < g.cells[0]; ++i) {
      const double t = 2.0 * (u[i + 1] - u[i]) / g.h;
      grad[i + 1] += t;
      grad[i] -= t;
      if (!pot.ac) {
        double da, db;
        ap_cell_pot_1d(pot, u[i], u[i + 1], g.h, &da, &db);
        grad[i] += da;
        grad[i + 1] += db;
      }
    }
  } else {
    const double i2h = 1.0 / (2.0 * g.h);
    for (int j = 0; j < g.cells[1]; ++j) {
      const int base = j * nx;
      for (int i = 0; i < g.cells[0]; ++i) {
        const double u00 = u[base + i], u10 = u[base + i + 1];
        const double u01 = u[base + nx + i], u11 = u[base + nx + i + 1];
        const double gx = (u10 + u11 - u00 - u01) * i2h;
        const double gy = (u01 + u11 - u00 - u10) * i2h;
        const double cx = g.h * gx, cy = g.h * gy;
        grad[base + i] += -cx - cy;
        grad[base + i + 1] += cx - cy;
        grad[base + nx + i] += -cx + cy;
        grad[base + nx + i + 1] += cx + cy;
        if (!pot.ac) {
          const double v[4] = {u00, u10, u11, u01};
          double dv[4];
          ap_cell_pot_2d(pot, v, g.h, dv);
          grad[base + i] += dv[0];
          grad[base + i + 1] += dv[1];
          grad[base + nx + i + 1] += dv[2];
          grad[base + nx + i] += dv[3];
        }
      }
    }
  }
  if (pot.ac)
    for (std::size_t k = 0; k < u.size(); ++k) grad[k] += ws.quad_w[k] * pot.dw(u[k]);
  for (std::size_t k = 0; k < u.size(); ++k)
    if (ws.pinned[k]) grad[k] = 0.0;
}

// Coons-patch blend of the Dirichlet boundary data; free facets copy the
// nearest interior estimate implicitly by reflecting weights.
std::vector<double> initial_guess(const Grid& g, const BoundarySpec& bc) {
  std::vector<double> u(g.n_nodes(), 0.0);
  auto facet_val = [&](int f, double x, double y) -> double {
    if (bc.facets[f].dirichlet) return bc.facets[f].trace(x, y);
    return 0.0;
  };
  if (g.dim == 1) {
    const double a = facet_val(0, g.min[0], 0.0), b = facet_val(1, g.max[0], 0.0);
    for (int i = 0; i < g.nx(); ++i) {
      const double t = double(i) / g.cells[0];
      u[i] = (1.0 - t) * a + t * b;
    }
  } else {
    const double Lx = g.max[0] - g.min[0], Ly = g.max[1] - g.min[1];
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const double x = g.x(i), y = g.y(j);
        const double xi = (x - g.min[0]) / Lx, eta = (y - g.min[1]) / Ly;
        const double fL = facet_val(0, g.min[0], y), fR = facet_val(1, g.max[0], y);
        const double fB = facet_val(2, x, g.min[1]), fT = facet_val(3, x, g.max[1]);
        const double c00 = facet_val(2, g.min[0], g.min[1]);
        const double c10 = facet_val(2, g.max[0], g.min[1]);
        const double c01 = facet_val(3, g.min[0], g.max[1]);
        const double c11 = facet_val(3, g.max[0], g.max[1]);
        u[g.node(i, j)] = (1 - xi) * fL + xi * fR + (1 - eta) * fB + eta * fT -
                          ((1 - xi) * (1 - eta) * c00 + xi * (1 - eta) * c10 +
                           (1 - xi) * eta * c01 + xi * eta * c11);
      }
  }
  for (auto& v : u) v = std::max(v, 0.0);
  return u;
}

}  // namespace

MinimizeResult minimize(const Grid& grid, const BoundarySpec& boundary,
                        const Objective& objective, const SolverConfig& config,
                        const std::optional<ScalarField>& initial) {
  const int n_facets = grid.dim == 1 ? 2 : 4;
  for (int f = 0; f < n_facets; ++f)
    if (boundary.facets[f].dirichlet && !boundary.facets[f].trace)
      throw std::invalid_argument("minimize: Dirichlet facet without trace function");
  for (std::size_t k = 1; k < config.ladder.size(); ++k)
    if (!(config.ladder[k] < config.ladder[k - 1]))
      throw std::invalid_argument("minimize: continuation ladder must decrease");

  const bool is_ap = std::holds_alternative<ObjectiveAP>(objective);
  Potential pot;
  double delta_base, tau;
  if (is_ap) {
    const auto& ap = std::get<ObjectiveAP>(objective);
    pot.ac = false;
    pot.gamma = ap.params.gamma;
    pot.scale = ap.rescaled ? ap.params.c_gamma : 1.0;
    pot.alpha = ap.params.alpha;
    pot.c_alpha = ap.params.c_alpha;
    delta_base = config.delta > 0.0 ? config.delta : reg_delta_min(ap.params, grid);
    tau = config.tau > 0.0 ? config.tau : dead_threshold(ap.params, grid);
    pot.tau = tau;
  } else {
    pot.ac = true;
    delta_base = config.delta > 0.0 ? config.delta : grid.h;
    tau = config.tau > 0.0 ? config.tau : 0.5 * delta_base;
  }

  Workspace ws(grid);
  std::vector<double> u =
      initial ? initial->values : initial_guess(grid, boundary);
  if (initial && initial->values.size() != grid.n_nodes())
    throw std::invalid_argument("minimize: initial guess size mismatch");

  // pin Dirichlet nodes and impose their data
  auto pin = [&](int i, int j, int f) {
    if (!boundary.facets[f].dirichlet) return;
    const std::size_t k = grid.node(i, j);
    ws.pinned[k] = true;
    const double v = boundary.facets[f].trace(grid.x(i), grid.y(j));
    if (v < 0.0) throw std::invalid_argument("minimize: negative Dirichlet data");
    u[k] = v;
  };
  if (grid.dim == 1) {
    pin(0, 0, 0);
    pin(grid.nx() - 1, 0, 1);
  } else {
    for (int j = 0; j < grid.ny(); ++j) {
      pin(0, j, 0);
      pin(grid.nx() - 1, j, 1);
    }
    for (int i = 0; i < grid.nx(); ++i) {
      pin(i, 0, 2);
      pin(i, grid.ny() - 1, 3);
    }
  }
  for (auto& v : u) v = std::max(v, 0.0);

  MinimizeResult res;
  res.converged = true;
  std::vector<double> grad(u.size()), z(u.size()), y(u.size());
  long iter_total = 0;
  const long trace_cap = 4000;
  const double step0 = config.step_size > 0.0 ? config.step_size : grid.h * grid.h / 4.0;

  const std::vector<double> ladder =
      config.ladder.empty() ? std::vector<double>{1.0} : config.ladder;
  for (std::size_t st = 0; st < ladder.size(); ++st) {
    pot.delta = delta_base * ladder[st];
    double dpart, ppart;
    double Ex = reg_energy(grid, u, pot, ws.quad_w, &dpart, &ppart);
    bool stage_done = false;
    long thin = 1;
    int small_drops = 0;
    double L = 1.0 / step0;  // inverse step (local curvature estimate)
    double tm = 1.0;
    y = u;

    // Projected gradient steps taken at the momentum point with backtracking
    // on the quadratic upper bound; a monotone safeguard restarts the
    // momentum whenever the accelerated candidate fails to descend.
    auto pg_step = [&](const std::vector<double>& from, double Efrom, double& Eout) -> bool {
      reg_gradient(grid, from, pot, ws, grad);
      for (int bt = 0; bt < 60; ++bt) {
        const double step = 1.0 / L;
        double lin = 0.0, quad = 0.0;
        for (std::size_t k = 0; k < from.size(); ++k) {
          z[k] = ws.pinned[k] ? from[k] : std::max(from[k] - step * grad[k], 0.0);
          const double d = z[k] - from[k];
          lin += grad[k] * d;
          quad += d * d;
        }
        if (quad == 0.0) {
          Eout = Efrom;
          return false;  // stationary at line-search resolution
        }
        const double Ez = reg_energy(grid, z, pot, ws.quad_w, &dpart, &ppart);
        if (Ez <= Efrom + lin + 0.5 * L * quad + 1e-14 * std::abs(Efrom)) {
          Eout = Ez;
          return true;
        }
        L *= 2.0;
      }
      Eout = Efrom;
      return false;
    };

    for (int it = 0; it < config.max_iters; ++it) {
      ++iter_total;
      if (config.step == SolverConfig::Step::fixed) {
        reg_gradient(grid, u, pot, ws, grad);
        for (std::size_t k = 0; k < u.size(); ++k)
          if (!ws.pinned[k]) u[k] = std::max(u[k] - step0 * grad[k], 0.0);
        const double Enew = reg_energy(grid, u, pot, ws.quad_w, &dpart, &ppart);
        const double drop = Ex - Enew;
        Ex = Enew;
        if (it % thin == 0) {
          res.trace.push_back({iter_total, int(st), pot.delta, dpart, ppart, Ex});
          if (long(res.trace.size()) > trace_cap) thin *= 2;
        }
        if (std::abs(drop) < config.energy_tol && ++small_drops >= 3) {
          stage_done = true;
          break;
        }
        continue;
      }

      double Ey = reg_energy(grid, y, pot, ws.quad_w);
      double Ez;
      bool ok = pg_step(y, Ey, Ez);
      if (!ok || Ez > Ex) {
        // monotone fallback: restart the momentum from the current iterate
        tm = 1.0;
        y = u;
        ok = pg_step(u, Ex, Ez);
        if (!ok || Ez > Ex) {
          stage_done = true;  // no descent at line-search resolution
          break;
        }
      }
      const double drop = Ex - Ez;
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tm * tm));
      const double beta = (tm - 1.0) / t_next;
      for (std::size_t k = 0; k < u.size(); ++k) {
        double yk = z[k] + beta * (z[k] - u[k]);
        y[k] = ws.pinned[k] ? u[k] : std::max(yk, 0.0);
        u[k] = z[k];
      }
      tm = t_next;
      Ex = Ez;
      L = std::max(L * 0.7, 1e-8 / step0);
      if (it % thin == 0) {
        res.trace.push_back({iter_total, int(st), pot.delta, dpart, ppart, Ex});
        if (long(res.trace.size()) > trace_cap) thin *= 2;
      }
      if (drop < config.energy_tol) {
        if (++small_drops >= 3) {
          stage_done = true;
          break;
        }
      } else {
        small_drops = 0;
      }
    }
    if (!stage_done) res.converged = false;
  }

  res.iterations = iter_total;
  res.raw_field.grid = grid;
  res.raw_field.values = u;
  res.raw_field.nonneg = true;
  res.field = res.raw_field;
  for (auto& v : res.field.values)
    if (v < tau) v = 0.0;  // strict: values equal to tau stay positive
  res.field.nonneg = true;

  if (is_ap) {
    res.energy = energy_AP(res.field, std::get<ObjectiveAP>(objective).params,
                           std::get<ObjectiveAP>(objective).rescaled);
  } else {
    res.energy = energy_AC(res.field);
  }

  if (!res.converged) throw ConvergenceFailure(std::move(res));
  return res;
}

}  // namespace fbl
