#include "fbl/free_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

namespace fbl {

double Polyline::length() const {
  double L = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k)
    L += std::hypot(pts[k][0] - pts[k - 1][0], pts[k][1] - pts[k - 1][1]);
  if (closed && pts.size() > 2)
    L += std::hypot(pts.front()[0] - pts.back()[0], pts.front()[1] - pts.back()[1]);
  return L;
}

namespace {

// quantized endpoint key for chain stitching
std::pair<long long, long long> qkey(const Pt& p, double q) {
  return {llround(p[0] / q), llround(p[1] / q)};
}

std::vector<Polyline> stitch(const std::vector<std::array<Pt, 2>>& segs, double h) {
  const double q = h * 1e-6;
  const double match2 = 4.0 * q * q;
  std::map<std::pair<long long, long long>, std::vector<std::size_t>> ends;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    ends[qkey(segs[k][0], q)].push_back(k);
    ends[qkey(segs[k][1], q)].push_back(k);
  }
  auto close = [&](const Pt& a, const Pt& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1];
    return dx * dx + dy * dy <= match2;
  };
  // endpoints can land a rounding step across a bucket boundary, so probe
  // the neighborhood of the tip's bucket
  auto find_next = [&](const Pt& tip, const std::vector<bool>& used) -> long long {
    const auto [bx, by] = qkey(tip, q);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = ends.find({bx + dx, by + dy});
        if (it == ends.end()) continue;
        for (std::size_t k : it->second)
          if (!used[k] && (close(segs[k][0], tip) || close(segs[k][1], tip)))
            return static_cast<long long>(k);
      }
    return -1;
  };
  std::vector<bool> used(segs.size(), false);
  std::vector<Polyline> chains;
  for (std::size_t start = 0; start < segs.size(); ++start) {
    if (used[start]) continue;
    used[start] = true;
    std::vector<Pt> chain{segs[start][0], segs[start][1]};
    for (int dir = 0; dir < 2; ++dir) {
      while (true) {
        const Pt tip = (dir == 0) ? chain.back() : chain.front();
        const long long k = find_next(tip, used);
        if (k < 0) break;
        const Pt next = close(segs[k][0], tip) ? segs[k][1] : segs[k][0];
        used[k] = true;
        if (dir == 0)
          chain.push_back(next);
        else
          chain.insert(chain.begin(), next);
      }
    }
    Polyline pl;
    pl.pts = std::move(chain);
    if (pl.pts.size() > 2 && close(pl.pts.front(), pl.pts.back())) {
      pl.pts.pop_back();
      pl.closed = true;
    }
    chains.push_back(std::move(pl));
  }
  return chains;
}

double seg_point_dist(const Pt& a, const Pt& b, double px, double py) {
  const double vx = b[0] - a[0], vy = b[1] - a[1];
  const double wx = px - a[0], wy = py - a[1];
  const double vv = vx * vx + vy * vy;
  double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(px - (a[0] + t * vx), py - (a[1] + t * vy));
}

}  // namespace

FreeBoundary extract_interface(const ScalarField& u, double tau, const GammaParams* params) {
  const Grid& g = u.grid;
  FreeBoundary fb;
  fb.tau = tau;

  bool any_live = false, any_dead = false;
  for (double v : u.values) {
    (v > tau ? any_live : any_dead) = true;
    if (any_live && any_dead) break;
  }
  if (!any_live || !any_dead) return fb;  // explicit "no interface"
  fb.has_interface = true;

  // edge values for crossing interpolation; the live/dead decision always
  // uses the raw field
  auto tv = [&](double v) -> double {
    if (!params) return v;
    return profile_inverse(*params, std::max(v, 0.0));
  };
  const double level = params ? profile_inverse(*params, std::max(tau, 0.0)) : tau;

  if (g.dim == 1) {
    for (int i = 0; i < g.cells[0]; ++i) {
      const double a = u.at(i), b = u.at(i + 1);
      const bool la = a > tau, lb = b > tau;
      if (la == lb) continue;
      fb.cells.push_back(i);
      const double wa = tv(a), wb = tv(b);
      double th = (wb == wa) ? 0.5 : (level - wa) / (wb - wa);
      th = std::clamp(th, 0.0, 1.0);
      fb.points.push_back(g.x(i) + th * g.h);
    }
    return fb;
  }

  std::vector<std::array<Pt, 2>> segs;
  for (int j = 0; j < g.cells[1]; ++j)
    for (int i = 0; i < g.cells[0]; ++i) {
      const std::array<double, 4> raw{u.at(i, j), u.at(i + 1, j), u.at(i + 1, j + 1),
                                      u.at(i, j + 1)};
      std::array<bool, 4> live{};
      int nlive = 0;
      for (int c = 0; c < 4; ++c) {
        live[c] = raw[c] > tau;
        nlive += live[c];
      }
      if (nlive == 0 || nlive == 4) continue;
      fb.cells.push_back(std::size_t(j) * g.cells[0] + i);
      const std::array<double, 4> vals{tv(raw[0]), tv(raw[1]), tv(raw[2]), tv(raw[3])};
      const CellSegments cs = cell_segments(g.x(i), g.y(j), g.h, vals, live, level);
      for (int k = 0; k < cs.count; ++k) segs.push_back(cs.seg[k]);
    }
  fb.chains = stitch(segs, g.h);
  return fb;
}

double distance_to_interface(const FreeBoundary& fb, double px, double py) {
  if (!fb.has_interface)
    throw std::domain_error("distance_to_interface: no interface present");
  double d = std::numeric_limits<double>::infinity();
  for (double x0 : fb.points) d = std::min(d, std::abs(px - x0));
  for (const Polyline& pl : fb.chains) {
    for (std::size_t k = 1; k < pl.pts.size(); ++k)
      d = std::min(d, seg_point_dist(pl.pts[k - 1], pl.pts[k], px, py));
    if (pl.closed && pl.pts.size() > 2)
      d = std::min(d, seg_point_dist(pl.pts.back(), pl.pts.front(), px, py));
  }
  return d;
}

std::array<double, 2> interface_normal_near(const FreeBoundary& fb, const ScalarField& u,
                                            double px, double py) {
  double best = std::numeric_limits<double>::infinity();
  std::array<double, 2> tangent{1.0, 0.0};
  auto consider = [&](const Pt& a, const Pt& b) {
    const double d = seg_point_dist(a, b, px, py);
    if (d < best) {
      best = d;
      const double L = std::hypot(b[0] - a[0], b[1] - a[1]);
      if (L > 0.0) tangent = {(b[0] - a[0]) / L, (b[1] - a[1]) / L};
    }
  };
  for (const Polyline& pl : fb.chains) {
    for (std::size_t k = 1; k < pl.pts.size(); ++k) consider(pl.pts[k - 1], pl.pts[k]);
    if (pl.closed && pl.pts.size() > 2) consider(pl.pts.back(), pl.pts.front());
  }
  if (!std::isfinite(best))
    throw std::domain_error("interface_normal_near: no 2D interface");
  std::array<double, 2> nrm{-tangent[1], tangent[0]};
  // orient toward the positivity side
  const double probe = 2.0 * u.grid.h;
  auto safe_sample = [&](double x, double y) -> double {
    if (!u.grid.contains(x, y)) return 0.0;
    return sample(u, x, y);
  };
  const double up = safe_sample(px + probe * nrm[0], py + probe * nrm[1]);
  const double dn = safe_sample(px - probe * nrm[0], py - probe * nrm[1]);
  if (dn > up) {
    nrm[0] = -nrm[0];
    nrm[1] = -nrm[1];
  }
  return nrm;
}

double flatness_epsilon_for_direction(const ScalarField& u, std::array<double, 2> center,
                                      double radius, const GammaParams& params,
                                      std::array<double, 2> nu,
                                      FlatnessCertificate::Mode mode) {
  const Grid& g = u.grid;
  double eps = 0.0;
  auto visit = [&](double x, double y, double val) {
    const double dot = x * nu[0] + y * nu[1];
    if (val > 0.0) {
      const double t =
          mode == FlatnessCertificate::Mode::u_profile ? profile_inverse(params, val) : val;
      eps = std::max(eps, std::abs(t - dot));
    } else {
      eps = std::max(eps, std::max(dot, 0.0));
    }
  };
  if (g.dim == 1) {
    for (int i = 0; i < g.nx(); ++i) {
      const double x = g.x(i) - center[0];
      if (std::abs(x) > radius) continue;
      visit(x, 0.0, u.at(i));
    }
  } else {
    const int i0 = std::max(0, int((center[0] - radius - g.min[0]) / g.h));
    const int i1 = std::min(g.nx() - 1, int((center[0] + radius - g.min[0]) / g.h) + 1);
    const int j0 = std::max(0, int((center[1] - radius - g.min[1]) / g.h));
    const int j1 = std::min(g.ny() - 1, int((center[1] + radius - g.min[1]) / g.h) + 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        const double x = g.x(i) - center[0], y = g.y(j) - center[1];
        if (x * x + y * y > radius * radius) continue;
        visit(x, y, u.at(i, j));
      }
  }
  return eps / radius;
}

FlatnessCertificate flatness_certificate(const ScalarField& u, std::array<double, 2> center,
                                         double radius, const GammaParams& params,
                                         FlatnessCertificate::Mode mode) {
  const Grid& g = u.grid;
  if (g.dim == 1) {
    if (center[0] - radius < g.min[0] - 1e-12 || center[0] + radius > g.max[0] + 1e-12)
      throw std::domain_error("flatness_certificate: ball exits the grid");
  } else {
    if (center[0] - radius < g.min[0] - 1e-12 || center[0] + radius > g.max[0] + 1e-12 ||
        center[1] - radius < g.min[1] - 1e-12 || center[1] + radius > g.max[1] + 1e-12)
      throw std::domain_error("flatness_certificate: ball exits the grid");
  }
  const FreeBoundary fb = extract_interface(u, 1e-12, &params);
  if (!fb.has_interface)
    throw std::domain_error("flatness_certificate: field has no interface");
  if (distance_to_interface(fb, center[0], center[1]) > g.h * (1.0 + 1e-9))
    throw std::domain_error("flatness_certificate: center not on the interface");

  FlatnessCertificate cert;
  cert.center = center;
  cert.radius = radius;
  cert.mode = mode;

  if (g.dim == 1) {
    double best = std::numeric_limits<double>::infinity();
    for (double nx : {1.0, -1.0}) {
      const double e = flatness_epsilon_for_direction(u, center, radius, params, {nx, 0.0}, mode);
      if (e < best) {
        best = e;
        cert.nu = {nx, 0.0};
      }
    }
    cert.epsilon = best;
    return cert;
  }

  const std::array<double, 2> seed = interface_normal_near(fb, u, center[0], center[1]);
  const double th0 = std::atan2(seed[1], seed[0]);
  auto eval = [&](double th) {
    return flatness_epsilon_for_direction(u, center, radius, params,
                                          {std::cos(th), std::sin(th)}, mode);
  };
  // coarse scan around the seed, then golden-section refinement
  double best_th = th0, best_e = eval(th0);
  const double span = 0.45;
  const int nscan = 19;
  for (int k = 0; k < nscan; ++k) {
    const double th = th0 - span + 2.0 * span * k / (nscan - 1);
    const double e = eval(th);
    if (e < best_e) {
      best_e = e;
      best_th = th;
    }
  }
  double a = best_th - span / (nscan - 1) * 2.0, b = best_th + span / (nscan - 1) * 2.0;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = eval(c), fd = eval(d);
  for (int k = 0; k < 48 && (b - a) > 1e-7; ++k) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = eval(d);
    }
  }
  const double th_ref = 0.5 * (a + b);
  const double e_ref = eval(th_ref);
  if (e_ref < best_e) {
    best_e = e_ref;
    best_th = th_ref;
  }
  cert.nu = {std::cos(best_th), std::sin(best_th)};
  cert.epsilon = best_e;
  return cert;
}

std::vector<FlatnessCertificate> dyadic_flatness_trace(const ScalarField& u,
                                                       std::array<double, 2> center,
                                                       const std::vector<double>& radii,
                                                       const GammaParams& params,
                                                       FlatnessCertificate::Mode mode) {
  std::vector<FlatnessCertificate> out;
  out.reserve(radii.size());
  for (double r : radii) out.push_back(flatness_certificate(u, center, r, params, mode));
  return out;
}

TouchResult viscosity_touch_test(const ScalarField& u, const GammaParams& params,
                                 std::array<double, 2> fb_point, double mu,
                                 double ball_radius, TouchSide side) {
  if (side == TouchSide::above && !(mu > 0.0))
    throw std::domain_error("viscosity_touch_test: side=above requires mu > 0");
  if (side == TouchSide::below && !(mu < 0.0))
    throw std::domain_error("viscosity_touch_test: side=below requires mu < 0");
  const Grid& g = u.grid;
  if (g.dim != 2)
    throw std::domain_error("viscosity_touch_test: requires a 2D field");
  const FreeBoundary fb = extract_interface(u, 1e-12, &params);
  if (!fb.has_interface || distance_to_interface(fb, fb_point[0], fb_point[1]) > g.h * 1.5)
    throw std::domain_error("viscosity_touch_test: point not on the free boundary");
  const std::array<double, 2> nrm = interface_normal_near(fb, u, fb_point[0], fb_point[1]);

  const double tol = 2.0 * positive_pow(g.h, params.alpha);
  const double neigh = 0.5 * ball_radius;
  // balls whose comparison correction |mu| rho^(2-alpha) stays below the
  // touch tolerance cannot be discriminated at this resolution
  const double rho_min = positive_pow(2.0 * tol / std::abs(mu), 1.0 / (2.0 - params.alpha));
  TouchResult res;
  res.pass = true;
  res.worst_margin = std::numeric_limits<double>::infinity();

  int scanned = 0;
  for (double scale : {0.25, 0.5, 1.0, 1.5, 2.0}) {
    const double rho = scale * ball_radius;
    if (rho < rho_min && scale < 1.0) continue;
    ++scanned;
    // C+ balls sit in the positivity side, C- balls cover the zero side
    const double sgn = side == TouchSide::above ? 1.0 : -1.0;
    const std::array<double, 2> z{fb_point[0] + sgn * rho * nrm[0],
                                  fb_point[1] + sgn * rho * nrm[1]};
    double max_violation = 0.0;
    const int i0 = std::max(0, int((fb_point[0] - neigh - g.min[0]) / g.h));
    const int i1 = std::min(g.nx() - 1, int((fb_point[0] + neigh - g.min[0]) / g.h) + 1);
    const int j0 = std::max(0, int((fb_point[1] - neigh - g.min[1]) / g.h));
    const int j1 = std::min(g.ny() - 1, int((fb_point[1] + neigh - g.min[1]) / g.h) + 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        const double dx = g.x(i) - fb_point[0], dy = g.y(j) - fb_point[1];
        if (dx * dx + dy * dy > neigh * neigh) continue;
        const double dist_z = std::hypot(g.x(i) - z[0], g.y(j) - z[1]);
        double dpsi;
        if (side == TouchSide::above)
          dpsi = std::max(rho - dist_z, 0.0);  // inside the ball
        else
          dpsi = std::max(dist_z - rho, 0.0);  // outside the ball
        const double psi = comparison_psi_u(params, dpsi, mu);
        const double uv = u.at(i, j);
        const double viol = side == TouchSide::above ? (psi - uv) : (uv - psi);
        max_violation = std::max(max_violation, viol);
      }
    res.worst_margin = std::min(res.worst_margin, max_violation);
    if (max_violation <= tol) {
      // the ordering holds up to the resolvable scale: touching is possible
      res.pass = false;
      res.witness_radius = rho;
      res.witness_center = z;
      return res;
    }
  }
  if (scanned == 0)
    throw std::domain_error("viscosity_touch_test: ball_radius below the discriminable scale");
  return res;
}

namespace {
std::string f17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void write_interface_csv(const FreeBoundary& fb, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_interface_csv: cannot open " + path);
  out << "# ordered polyline vertices; blank line separates chains; x[,y]\n";
  if (!fb.points.empty()) {
    for (double x : fb.points) out << f17(x) << "\n";
    return;
  }
  for (std::size_t c = 0; c < fb.chains.size(); ++c) {
    if (c) out << "\n";
    const Polyline& pl = fb.chains[c];
    for (const Pt& p : pl.pts) out << f17(p[0]) << "," << f17(p[1]) << "\n";
    if (pl.closed && !pl.pts.empty())
      out << f17(pl.pts.front()[0]) << "," << f17(pl.pts.front()[1]) << "\n";
  }
}

void write_flatness_csv(const std::vector<FlatnessCertificate>& certs,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_flatness_csv: cannot open " + path);
  out << "# center_x,center_y,radius,nu_x,nu_y,epsilon,mode\n";
  for (const auto& c : certs) {
    out << f17(c.center[0]) << "," << f17(c.center[1]) << "," << f17(c.radius) << ","
        << f17(c.nu[0]) << "," << f17(c.nu[1]) << "," << f17(c.epsilon) << ","
        << (c.mode == FlatnessCertificate::Mode::u_profile ? "u-profile" : "w-linear") << "\n";
  }
}

}  // namespace fbl
