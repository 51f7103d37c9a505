#include "fbl/radial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fbl {

double RadialSolution::value(double radius) const {
  if (radius >= 1.0 + mu) return 0.0;
  if (r.empty()) throw std::logic_error("RadialSolution: empty profile");
  if (radius <= r.front()) return u.front();
  auto it = std::lower_bound(r.begin(), r.end(), radius);
  const std::size_t k = std::distance(r.begin(), it);
  if (k == 0) return u.front();
  if (k >= r.size()) return u.back();
  const double t = (radius - r[k - 1]) / (r[k] - r[k - 1]);
  return (1.0 - t) * u[k - 1] + t * u[k];
}

namespace {

struct OdeState {
  double u, v;  // v = du/dr
};

// One RK4 step of u'' = -(gamma/2) u^(-gamma-1) - (n-1) u'/r, dr may be negative.
OdeState rk4_step(const GammaParams& p, int n, double r, OdeState y, double dr) {
  auto f = [&](double rr, OdeState s) -> OdeState {
    const double rhs = -0.5 * p.gamma * positive_pow(std::max(s.u, 1e-300), -p.gamma - 1.0) -
                       (n - 1) * s.v / rr;
    return {s.v, rhs};
  };
  const OdeState k1 = f(r, y);
  const OdeState k2 = f(r + 0.5 * dr, {y.u + 0.5 * dr * k1.u, y.v + 0.5 * dr * k1.v});
  const OdeState k3 = f(r + 0.5 * dr, {y.u + 0.5 * dr * k2.u, y.v + 0.5 * dr * k2.v});
  const OdeState k4 = f(r + dr, {y.u + dr * k3.u, y.v + dr * k3.v});
  return {y.u + dr / 6.0 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u),
          y.v + dr / 6.0 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v)};
}

// Integrate inward from r = (1+mu) - t0 down to r = 1 with steps graded by
// the distance to the free boundary; returns u(1). Optionally records samples.
double shoot(const GammaParams& p, int n, double mu, double t0,
             std::vector<double>* rs = nullptr, std::vector<double>* us = nullptr) {
  const double R = 1.0 + mu;
  double r = R - t0;
  if (r <= 1.0) return -1.0;  // seed point already inside the data sphere
  OdeState y{profile(p, t0, 0), -profile(p, t0, 1)};  // du/dr = -du/dt
  if (rs) {
    rs->push_back(r);
    us->push_back(y.u);
  }
  while (r > 1.0) {
    double dr = std::max(std::min(1e-3, (R - r) / 32.0), 1e-7);
    bool last = false;
    if (r - 1.0 <= dr) {
      dr = r - 1.0;
      last = true;
    }
    y = rk4_step(p, n, r, y, -dr);
    r = last ? 1.0 : r - dr;
    if (!(y.u > 0.0) || !std::isfinite(y.u)) return 1e9;
    if (rs) {
      rs->push_back(r);
      us->push_back(y.u);
    }
  }
  return y.u;
}

double solve_mu(const GammaParams& p, int n, double t0, double shoot_tol) {
  // u(1; mu) is increasing in mu; bracket by geometric scan.
  double lo = std::max(4.0 * t0, 1e-4), hi = lo;
  double flo = shoot(p, n, lo, t0) - 1.0;
  if (flo > 0.0) {
    // shrink until below
    for (int k = 0; k < 60 && flo > 0.0; ++k) {
      lo *= 0.7;
      if (lo <= 1.5 * t0) break;
      flo = shoot(p, n, lo, t0) - 1.0;
    }
    if (flo > 0.0)
      throw std::runtime_error("radial_exterior: no lower bracket for mu in [" +
                               std::to_string(lo) + ", " + std::to_string(hi) + "]");
    hi = lo / 0.7;
  } else {
    double fhi = flo;
    while (fhi <= 0.0) {
      hi *= 1.4;
      if (hi > 64.0)
        throw std::runtime_error("radial_exterior: no upper bracket for mu in [" +
                                 std::to_string(lo) + ", " + std::to_string(hi) + "]");
      fhi = shoot(p, n, hi, t0) - 1.0;
    }
    lo = hi / 1.4;
  }
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double f = shoot(p, n, mid, t0) - 1.0;
    if (std::abs(f) < shoot_tol && hi - lo < 1e-12) return mid;
    if (f > 0.0)
      hi = mid;
    else
      lo = mid;
    if (hi - lo < 1e-14) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

RadialSolution radial_exterior(const GammaParams& p, int n, double shoot_tol) {
  if (n < 1) throw std::invalid_argument("radial_exterior: dimension must be >= 1");
  const double t0 = 0.004;
  const double m0 = solve_mu(p, n, t0, shoot_tol);
  const double m1 = solve_mu(p, n, t0 / 2.0, shoot_tol);
  const double m2 = solve_mu(p, n, t0 / 4.0, shoot_tol);
  // Richardson/Aitken extrapolation of the seeding offset to t0 -> 0
  double mu = m2;
  const double d1 = m1 - m0, d2 = m2 - m1;
  if (std::abs(d2 - d1) > 1e-15) {
    const double acc = m2 - d2 * d2 / (d2 - d1);
    if (std::isfinite(acc) && std::abs(acc - m2) < 10.0 * std::abs(d2)) mu = acc;
  }
  // self-consistent fine solve for the stored profile; the extrapolated mu
  // must agree with it to seeding accuracy
  const double tf = t0 / 8.0;
  const double mf = solve_mu(p, n, tf, shoot_tol);
  if (std::abs(mu - mf) > 1e-4) mu = mf;

  RadialSolution sol;
  sol.gamma = p.gamma;
  sol.n = n;
  sol.mu = mu;
  std::vector<double> rs, us;
  const double u1 = shoot(p, n, mf, tf, &rs, &us);
  if (std::abs(u1 - 1.0) > std::max(1e-6, 100.0 * shoot_tol))
    throw std::runtime_error("radial_exterior: shooting residual " + std::to_string(u1 - 1.0));
  // integration ran inward; store increasing in r, then append the profile
  // tail up to the free boundary
  std::reverse(rs.begin(), rs.end());
  std::reverse(us.begin(), us.end());
  const double R = 1.0 + mu;
  std::vector<double> rr, uu;
  const std::size_t stride = std::max<std::size_t>(1, rs.size() / 2048);
  for (std::size_t k = 0; k < rs.size(); k += stride) {
    rr.push_back(rs[k]);
    uu.push_back(us[k]);
  }
  if (rr.empty() || rr.back() < rs.back()) {
    rr.push_back(rs.back());
    uu.push_back(us.back());
  }
  for (int k = 1; k <= 64; ++k) {
    const double t = tf * (1.0 - k / 64.0);
    rr.push_back(R - t);
    uu.push_back(profile(p, t, 0));
  }
  sol.r = std::move(rr);
  sol.u = std::move(uu);
  // pin the endpoints exactly, dropping samples the pin would invert
  sol.r.front() = 1.0;
  sol.u.front() = 1.0;
  std::size_t w = 1;
  for (std::size_t k = 1; k < sol.u.size(); ++k) {
    if (sol.u[k] < sol.u[w - 1]) {
      sol.r[w] = sol.r[k];
      sol.u[w] = sol.u[k];
      ++w;
    }
  }
  sol.r.resize(w);
  sol.u.resize(w);
  sol.r.back() = R;
  sol.u.back() = 0.0;
  for (std::size_t k = 1; k < sol.u.size(); ++k)
    if (!(sol.u[k] < sol.u[k - 1]))
      throw std::runtime_error("radial_exterior: profile not strictly decreasing");
  return sol;
}

}  // namespace fbl
