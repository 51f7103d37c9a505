#include "fbl/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fbl/marching.hpp"

namespace fbl {

double dead_threshold(const GammaParams& p, const Grid& g) {
  return p.c_alpha * positive_pow(0.5 * g.h, p.alpha);
}

double reg_delta_min(const GammaParams& p, const Grid& g) {
  return p.c_alpha * positive_pow(g.h, p.alpha);
}

double layer_potential_integral(const GammaParams& p, double d) {
  if (d <= 0.0) return 0.0;
  const double e = 1.0 - p.alpha * p.gamma;  // = (2-gamma)/(2+gamma) > 0
  return positive_pow(p.c_alpha, -p.gamma) * positive_pow(d, e) / e;
}

namespace {

double dirichlet_quadrature(const ScalarField& u) {
  const Grid& g = u.grid;
  double acc = 0.0;
  if (g.dim == 1) {
    for (int i = 0; i < g.cells[0]; ++i) {
      const double du = (u.at(i + 1) - u.at(i)) / g.h;
      acc += du * du * g.h;
    }
  } else {
    const double i2h = 1.0 / (2.0 * g.h), h2 = g.h * g.h;
    for (int j = 0; j < g.cells[1]; ++j)
      for (int i = 0; i < g.cells[0]; ++i) {
        const double gx =
            (u.at(i + 1, j) + u.at(i + 1, j + 1) - u.at(i, j) - u.at(i, j + 1)) * i2h;
        const double gy =
            (u.at(i, j + 1) + u.at(i + 1, j + 1) - u.at(i, j) - u.at(i + 1, j)) * i2h;
        acc += (gx * gx + gy * gy) * h2;
      }
  }
  return acc;
}

}  // namespace

EnergyReport energy_AP(const ScalarField& u, const GammaParams& p, bool rescaled) {
  u.check_nonneg("energy_AP");
  const Grid& g = u.grid;
  const double tau = dead_threshold(p, g);
  const double scale = rescaled ? p.c_gamma : 1.0;

  EnergyReport rep;
  rep.dirichlet = dirichlet_quadrature(u);

  double pot = 0.0;
  if (g.dim == 1) {
    for (int i = 0; i < g.cells[0]; ++i) {
      const double a = u.at(i), b = u.at(i + 1);
      const bool la = a > tau, lb = b > tau;
      if (la && lb) {
        pot += positive_pow(0.5 * (a + b), -p.gamma) * g.h;
      } else if (la || lb) {
        const double d = std::min(profile_inverse(p, la ? a : b), g.h);
        pot += layer_potential_integral(p, d);
      }
      // fully dead cells carry no potential: chi_{u>0} vanishes there
    }
  } else {
    for (int j = 0; j < g.cells[1]; ++j)
      for (int i = 0; i < g.cells[0]; ++i) {
        const std::array<double, 4> v{u.at(i, j), u.at(i + 1, j), u.at(i + 1, j + 1),
                                      u.at(i, j + 1)};
        int nlive = 0;
        std::array<bool, 4> live{};
        for (int c = 0; c < 4; ++c) {
          live[c] = v[c] > tau;
          nlive += live[c];
        }
        if (nlive == 4) {
          const double m = 0.25 * (v[0] + v[1] + v[2] + v[3]);
          pot += positive_pow(m, -p.gamma) * g.h * g.h;
        } else if (nlive > 0) {
          // layer model: interface segment length times the profile layer
          // integral at the mean live-node depth
          const CellSegments segs =
              cell_segments(g.x(i), g.y(j), g.h, v, live, tau);
          double len = 0.0;
          for (int k = 0; k < segs.count; ++k)
            len += std::hypot(segs.seg[k][1][0] - segs.seg[k][0][0],
                              segs.seg[k][1][1] - segs.seg[k][0][1]);
          double dsum = 0.0;
          for (int c = 0; c < 4; ++c)
            if (live[c]) dsum += std::min(profile_inverse(p, v[c]), g.h);
          const double dbar = dsum / nlive;
          if (len == 0.0) len = g.h;  // degenerate corner case
          pot += len * layer_potential_integral(p, dbar);
        }
      }
  }
  rep.potential = pot * scale;
  rep.total = rep.dirichlet + rep.potential;
  return rep;
}

EnergyReport energy_AC(const ScalarField& u, double tau) {
  u.check_nonneg("energy_AC");
  const Grid& g = u.grid;
  EnergyReport rep;
  rep.dirichlet = dirichlet_quadrature(u);
  double meas = 0.0;
  if (g.dim == 1) {
    for (int i = 0; i < g.cells[0]; ++i)
      meas += edge_positive_fraction(u.at(i), u.at(i + 1), tau) * g.h;
  } else {
    for (int j = 0; j < g.cells[1]; ++j)
      for (int i = 0; i < g.cells[0]; ++i) {
        const std::array<double, 4> v{u.at(i, j), u.at(i + 1, j), u.at(i + 1, j + 1),
                                      u.at(i, j + 1)};
        meas += cell_positive_fraction(v, tau) * g.h * g.h;
      }
  }
  rep.potential = meas;
  rep.total = rep.dirichlet + rep.potential;
  return rep;
}

EnergyReport energy_F(const ScalarField& u, const ScalarField& zero_set_indicator,
                      double tau) {
  u.check_nonneg("energy_F");
  const Grid& g = u.grid;
  const Grid& ge = zero_set_indicator.grid;
  if (g.dim != ge.dim || g.cells != ge.cells)
    throw std::invalid_argument("energy_F: field and indicator grids differ");

  for (std::size_t k = 0; k < u.values.size(); ++k)
    if (zero_set_indicator.values[k] > 0.5 && u.values[k] > tau)
      throw std::invalid_argument("energy_F: field positive on the indicated zero set");

  EnergyReport rep;
  rep.dirichlet = dirichlet_quadrature(u);
  double per = 0.0;
  if (g.dim == 1) {
    for (int i = 0; i < g.cells[0]; ++i) {
      const bool a = zero_set_indicator.at(i) > 0.5, b = zero_set_indicator.at(i + 1) > 0.5;
      if (a != b) per += 1.0;  // one boundary point of E per sign change
    }
  } else {
    for (int j = 0; j < g.cells[1]; ++j)
      for (int i = 0; i < g.cells[0]; ++i) {
        const std::array<double, 4> v{
            zero_set_indicator.at(i, j), zero_set_indicator.at(i + 1, j),
            zero_set_indicator.at(i + 1, j + 1), zero_set_indicator.at(i, j + 1)};
        std::array<bool, 4> live{};
        for (int c = 0; c < 4; ++c) live[c] = v[c] > 0.5;
        const CellSegments segs = cell_segments(g.x(i), g.y(j), g.h, v, live, 0.5);
        for (int k = 0; k < segs.count; ++k)
          per += std::hypot(segs.seg[k][1][0] - segs.seg[k][0][0],
                            segs.seg[k][1][1] - segs.seg[k][0][1]);
      }
  }
  rep.perimeter = per;
  rep.total = rep.dirichlet + rep.potential + rep.perimeter;
  return rep;
}

}  // namespace fbl
