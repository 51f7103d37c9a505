#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fbl/free_boundary.hpp"
#include "fbl/radial.hpp"

using namespace fbl;

namespace {
ScalarField tilted_profile(const Grid& g, const GammaParams& p, double angle_deg,
                           std::array<double, 2> through = {0.0, 0.0}) {
  const double th = angle_deg * M_PI / 180.0;
  const std::array<double, 2> nu{std::sin(th), std::cos(th)};
  return field_from(g, [&](double x, double y) {
    const double d = (x - through[0]) * nu[0] + (y - through[1]) * nu[1];
    return profile(p, d, 0);
  });
}
}  // namespace

TEST_CASE("1D extraction: single crossing near zero") {
  const Grid g = make_grid_1d(-1.0, 1.0, 128);
  const ScalarField u = field_from(g, [](double x, double) { return std::max(x, 0.0); });
  const FreeBoundary fb = extract_interface(u, 1e-12);
  REQUIRE(fb.has_interface);
  REQUIRE(fb.points.size() == 1);
  CHECK(std::abs(fb.points[0]) <= g.h);
}

TEST_CASE("no interface on constant fields") {
  const Grid g = make_grid_1d(-1.0, 1.0, 64);
  const FreeBoundary fb = extract_interface(constant_field(g, 1.0), 1e-12);
  CHECK(!fb.has_interface);
  const FreeBoundary fz = extract_interface(constant_field(g, 0.0), 1e-12);
  CHECK(!fz.has_interface);
  CHECK_THROWS_AS(distance_to_interface(fb, 0.0, 0.0), std::domain_error);
}

TEST_CASE("radial embedding extracts a circle") {
  const GammaParams p = derive_params(1.0);
  const RadialSolution sol = radial_exterior(p, 2);
  const double R = 1.0 + sol.mu;
  const Grid g = make_grid_2d(-2.0, 2.0, -2.0, 2.0, 512, 512);
  const ScalarField u = field_from(g, [&](double x, double y) {
    const double r = std::hypot(x, y);
    return r < 1.0 ? 1.0 : sol.value(r);
  });
  const FreeBoundary fb = extract_interface(u, 1e-12, &p);
  REQUIRE(fb.has_interface);
  double maxdev = 0.0;
  std::size_t nv = 0;
  for (const auto& pl : fb.chains)
    for (const auto& q : pl.pts) {
      maxdev = std::max(maxdev, std::abs(std::hypot(q[0], q[1]) - R));
      ++nv;
    }
  CHECK(nv > 100);
  CHECK(maxdev < 2.0 * g.h);
}

TEST_CASE("interface is scale-covariant above the threshold") {
  const GammaParams p = derive_params(1.0);
  const Grid g = make_grid_2d(-1, 1, -1, 1, 64, 64);
  const ScalarField u = tilted_profile(g, p, 20.0);
  ScalarField u2 = u;
  for (auto& v : u2.values) v *= 2.0;
  const FreeBoundary a = extract_interface(u, 1e-12);
  const FreeBoundary b = extract_interface(u2, 1e-12);
  REQUIRE(a.chains.size() == b.chains.size());
  for (std::size_t c = 0; c < a.chains.size(); ++c) {
    REQUIRE(a.chains[c].pts.size() == b.chains[c].pts.size());
    for (std::size_t k = 0; k < a.chains[c].pts.size(); ++k) {
      CHECK(std::abs(a.chains[c].pts[k][0] - b.chains[c].pts[k][0]) < 1e-9);
      CHECK(std::abs(a.chains[c].pts[k][1] - b.chains[c].pts[k][1]) < 1e-9);
    }
  }
}

TEST_CASE("flatness certificate recovers a tilted profile direction") {
  const GammaParams p = derive_params(1.0);
  const Grid g = make_grid_2d(-1, 1, -1, 1, 512, 512);
  const ScalarField u = tilted_profile(g, p, 10.0);
  const double t = 0.5;
  const FlatnessCertificate cert = flatness_certificate(u, {0.0, 0.0}, t, p);
  const double ang = std::atan2(cert.nu[0], cert.nu[1]) * 180.0 / M_PI;
  CHECK(std::abs(ang - 10.0) < 0.5);
  CHECK(cert.epsilon < 2.0 * g.h / t);
}

TEST_CASE("axis-aligned profile in a half ball") {
  const GammaParams p = derive_params(1.0);
  const Grid g = make_grid_2d(-1, 1, -1, 1, 512, 512);
  const ScalarField u = tilted_profile(g, p, 0.0);
  const FlatnessCertificate cert = flatness_certificate(u, {0.0, 0.0}, 0.5, p);
  CHECK(std::abs(cert.nu[0]) < 0.01);
  CHECK(cert.nu[1] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(cert.epsilon < 2.0 * g.h / 0.5);
}

TEST_CASE("perturbed profile vs brute-force direction grid") {
  const GammaParams p = derive_params(1.0);
  const Grid g = make_grid_2d(-1, 1, -1, 1, 256, 256);
  const ScalarField u = field_from(g, [&](double x, double y) {
    const double bump = (x * x + y * y < 0.25)
                            ? 0.01 * std::exp(-1.0 / (1.0 - 4.0 * (x * x + y * y)))
                            : 0.0;
    return profile(p, y, 0) + bump * (y > 0 ? 1.0 : 0.0);
  });
  const double t = 0.45;
  const FlatnessCertificate cert = flatness_certificate(u, {0.0, 0.0}, t, p);
  // brute force over 720 directions
  double brute = 1e9;
  for (int k = 0; k < 720; ++k) {
    const double th = 2.0 * M_PI * k / 720;
    brute = std::min(brute, flatness_epsilon_for_direction(
                                u, {0.0, 0.0}, t, p, {std::sin(th), std::cos(th)},
                                FlatnessCertificate::Mode::u_profile));
  }
  CHECK(cert.epsilon <= brute * 1.10);
  CHECK(brute <= cert.epsilon * 1.10);
}

TEST_CASE("certificate sandwich re-verifies with inflated epsilon") {
  const GammaParams p = derive_params(1.3);
  const Grid g = make_grid_2d(-1, 1, -1, 1, 256, 256);
  const ScalarField u = tilted_profile(g, p, -25.0);
  const double t = 0.4;
  const FlatnessCertificate c = flatness_certificate(u, {0.0, 0.0}, t, p);
  const double eps = c.epsilon * (1.0 + 1e-9) + 1e-15;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double x = g.x(i), y = g.y(j);
      if (x * x + y * y > t * t) continue;
      const double dot = x * c.nu[0] + y * c.nu[1];
      const double lo = profile(p, dot - eps * t, 0), hi = profile(p, dot + eps * t, 0);
      CHECK(u.at(i, j) >= lo - 1e-12);
      CHECK(u.at(i, j) <= hi + 1e-12);
    }
}

TEST_CASE("enlarging the direction set never increases epsilon") {
  const GammaParams p = derive_params(1.0);
  const Grid g = make_grid_2d(-1, 1, -1, 1, 128, 128);
  const ScalarField u = tilted_profile(g, p, 33.0);
  const double t = 0.4;
  double best = 1e9;
  double prev = 1e9;
  for (int n : {8, 16, 32, 64}) {
    double e = 1e9;
    for (int k = 0; k < n; ++k) {
      const double th = 2.0 * M_PI * k / n;
      e = std::min(e, flatness_epsilon_for_direction(u, {0.0, 0.0}, t, p,
                                                     {std::sin(th), std::cos(th)},
                                                     FlatnessCertificate::Mode::u_profile));
    }
    CHECK(e <= prev + 1e-15);
    prev = e;
    best = std::min(best, e);
  }
}

TEST_CASE("rotation equivariance under quarter turns") {
  const GammaParams p = derive_params(1.0);
  const Grid g = make_grid_2d(-1, 1, -1, 1, 128, 128);
  const ScalarField u = tilted_profile(g, p, 10.0);
  // rotate the field by 90 degrees: v(i,j) = u(j, nx-1-i)
  ScalarField v = u;
  const int n = g.nx();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v.at(i, j) = u.at(j, n - 1 - i);
  const double t = 0.4;
  const FlatnessCertificate cu = flatness_certificate(u, {0.0, 0.0}, t, p);
  const FlatnessCertificate cv = flatness_certificate(v, {0.0, 0.0}, t, p);
  // nu rotates by +90 degrees: (x,y) -> (-y,x)
  CHECK(cv.nu[0] == doctest::Approx(-cu.nu[1]).epsilon(1e-3));
  CHECK(cv.nu[1] == doctest::Approx(cu.nu[0]).epsilon(1e-3));
  CHECK(std::abs(cv.epsilon - cu.epsilon) < 1e-10 + 0.02 * cu.epsilon);
}

TEST_CASE("dyadic trace on the exact profile sits at the floor") {
  const GammaParams p = derive_params(1.0);
  const Grid g = make_grid_2d(-1, 1, -1, 1, 512, 512);
  const ScalarField u = tilted_profile(g, p, 5.0);
  const auto certs = dyadic_flatness_trace(u, {0.0, 0.0}, {0.4, 0.2, 0.1}, p);
  REQUIRE(certs.size() == 3);
  for (const auto& c : certs) CHECK(c.epsilon < 2.0 * g.h / c.radius);
}

TEST_CASE("w-linear mode on the hodograph ramp") {
  const GammaParams p = derive_params(1.0);
  const Grid g = make_grid_2d(-1, 1, -1, 1, 256, 256);
  // w = (x.nu)^+ directly (the transformed profile)
  const double th = 15.0 * M_PI / 180.0;
  const ScalarField w = field_from(g, [&](double x, double y) {
    return std::max(x * std::sin(th) + y * std::cos(th), 0.0);
  });
  const FlatnessCertificate c = flatness_certificate(
      w, {0.0, 0.0}, 0.5, p, FlatnessCertificate::Mode::w_linear);
  const double ang = std::atan2(c.nu[0], c.nu[1]) * 180.0 / M_PI;
  CHECK(std::abs(ang - 15.0) < 0.5);
  CHECK(c.epsilon < 2.0 * g.h / 0.5);
}

TEST_CASE("ball exiting the grid is a domain error") {
  const GammaParams p = derive_params(1.0);
  const Grid g = make_grid_2d(-1, 1, -1, 1, 64, 64);
  const ScalarField u = tilted_profile(g, p, 0.0);
  CHECK_THROWS_AS(flatness_certificate(u, {0.0, 0.0}, 1.5, p), std::domain_error);
  CHECK_THROWS_AS(flatness_certificate(u, {0.0, 0.9}, 0.5, p), std::domain_error);
}

TEST_CASE("viscosity touching: exact profile passes above") {
  const GammaParams p = derive_params(1.0);
  const Grid g = make_grid_2d(-1, 1, -1, 1, 512, 512);
  const ScalarField u = tilted_profile(g, p, 0.0);
  const TouchResult r = viscosity_touch_test(u, p, {0.0, 0.0}, 0.5, 0.6, TouchSide::above);
  CHECK(r.pass);
}

TEST_CASE("viscosity touching: the comparison function touches itself") {
  const GammaParams p = derive_params(1.0);
  const Grid g = make_grid_2d(-1, 1, -1, 1, 512, 512);
  const double rho = 0.5;
  const std::array<double, 2> z{0.0, rho};  // ball tangent to origin from above
  const ScalarField psi = field_from(g, [&](double x, double y) {
    const double d = std::max(rho - std::hypot(x - z[0], y - z[1]), 0.0);
    return comparison_psi_u(p, d, 0.5);
  });
  const TouchResult r = viscosity_touch_test(psi, p, {0.0, 0.0}, 0.5, rho, TouchSide::above);
  CHECK(!r.pass);
  CHECK(r.witness_radius <= rho * (1.0 + 1e-12));
  CHECK(r.witness_radius > 0.0);
}

TEST_CASE("viscosity touching: side/sign preconditions") {
  const GammaParams p = derive_params(1.0);
  const Grid g = make_grid_2d(-1, 1, -1, 1, 64, 64);
  const ScalarField u = tilted_profile(g, p, 0.0);
  CHECK_THROWS_AS(viscosity_touch_test(u, p, {0.0, 0.0}, -0.5, 0.5, TouchSide::above),
                  std::domain_error);
  CHECK_THROWS_AS(viscosity_touch_test(u, p, {0.0, 0.0}, 0.5, 0.5, TouchSide::below),
                  std::domain_error);
  CHECK_THROWS_AS(viscosity_touch_test(u, p, {0.0, 0.8}, 0.5, 0.5, TouchSide::above),
                  std::domain_error);
}
