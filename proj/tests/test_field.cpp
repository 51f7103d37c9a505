#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "fbl/grid.hpp"

using namespace fbl;

TEST_CASE("grid construction and validation") {
  const Grid g = make_grid_1d(0.0, 1.0, 16);
  CHECK(g.h == doctest::Approx(1.0 / 16));
  CHECK(g.nx() == 17);
  CHECK_THROWS_AS(make_grid_1d(0.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_grid_2d(0, 1, 0, 2, 16, 16), std::invalid_argument);  // unequal h
  const Grid g2 = make_grid_2d(-1, 1, -1, 1, 32, 32);
  CHECK(g2.h == doctest::Approx(1.0 / 16));
  CHECK(g2.n_nodes() == 33 * 33);
}

TEST_CASE("laplacian on quadratics and constants") {
  const Grid g = make_grid_1d(0.0, 1.0, 64);
  const ScalarField f = field_from(g, [](double x, double) { return x * x; });
  const ScalarField lap = laplacian(f);
  CHECK(std::isnan(lap.at(0)));
  CHECK(std::isnan(lap.at(64)));
  for (int i = 1; i < 64; ++i) CHECK(lap.at(i) == doctest::Approx(2.0).epsilon(1e-9));

  const ScalarField c = constant_field(g, 3.5);
  const ScalarField lc = laplacian(c);
  for (int i = 1; i < 64; ++i) CHECK(std::abs(lc.at(i)) < 1e-12);
}

TEST_CASE("laplacian of sin(pi x) within the Taylor bound") {
  const Grid g = make_grid_1d(0.0, 1.0, 128);
  const ScalarField f = field_from(g, [](double x, double) { return std::sin(M_PI * x); });
  const ScalarField lap = laplacian(f);
  double maxerr = 0.0;
  for (int i = 1; i < 128; ++i)
    maxerr = std::max(maxerr,
                      std::abs(lap.at(i) + M_PI * M_PI * std::sin(M_PI * g.x(i))));
  CHECK(maxerr < 1e-3);  // pi^4 h^2 / 12 ~ 5e-4
}

TEST_CASE("gradient stencils") {
  const Grid g = make_grid_1d(0.0, 1.0, 32);
  const ScalarField f = field_from(g, [](double x, double) { return 3.0 * x; });
  const auto df = gradient(f);
  for (int i = 1; i < 32; ++i) CHECK(df[0].at(i) == doctest::Approx(3.0).epsilon(1e-12));

  const Grid g2 = make_grid_2d(0, 1, 0, 1, 16, 16);
  const ScalarField fxy = field_from(g2, [](double x, double y) { return x * y; });
  const auto d2 = gradient(fxy);
  for (int j = 1; j < 16; ++j)
    for (int i = 1; i < 16; ++i) {
      CHECK(d2[0].at(i, j) == doctest::Approx(g2.y(j)).epsilon(1e-12));
      CHECK(d2[1].at(i, j) == doctest::Approx(g2.x(i)).epsilon(1e-12));
    }
}

TEST_CASE("multilinear sampling") {
  const Grid g = make_grid_2d(0, 1, 0, 1, 16, 16);
  const ScalarField lin = field_from(g, [](double x, double y) { return 2 * x - 3 * y + 1; });
  CHECK(sample(lin, 0.37, 0.81) == doctest::Approx(2 * 0.37 - 3 * 0.81 + 1).epsilon(1e-13));
  CHECK(sample(lin, g.x(5), g.y(7)) == doctest::Approx(lin.at(5, 7)).epsilon(1e-14));
  CHECK_THROWS_AS(sample(lin, 1.5, 0.5), std::domain_error);

  // interpolation remainder of x^2 at a cell midpoint is exactly h^2/4
  const Grid g1 = make_grid_1d(0.0, 1.0, 16);
  const ScalarField sq = field_from(g1, [](double x, double) { return x * x; });
  const double mid = g1.x(3) + g1.h / 2;
  const double err = sample(sq, mid) - mid * mid;
  CHECK(err == doctest::Approx(g1.h * g1.h / 4).epsilon(1e-10));
}

TEST_CASE("summation by parts for compactly supported fields") {
  const Grid g = make_grid_1d(0.0, 1.0, 128);
  auto bump = [](double x, double c) {
    const double t = (x - c) / 0.15;
    return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
  };
  const ScalarField f = field_from(g, [&](double x, double) { return bump(x, 0.4); });
  const ScalarField q = field_from(g, [&](double x, double) { return bump(x, 0.55); });
  const ScalarField lf = laplacian(f), lq = laplacian(q);
  double a = 0.0, b = 0.0;
  for (int i = 1; i < 128; ++i) {
    a += lf.at(i) * q.at(i);
    b += f.at(i) * lq.at(i);
  }
  CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(a), 1.0));
}

TEST_CASE("second-order consistency under refinement") {
  auto run = [](int n) {
    const Grid g = make_grid_1d(0.0, 1.0, n);
    const ScalarField f =
        field_from(g, [](double x, double) { return std::exp(x) * std::sin(3 * x); });
    const ScalarField lap = laplacian(f);
    double maxerr = 0.0;
    for (int i = 1; i < n; ++i) {
      const double x = g.x(i);
      const double exact = std::exp(x) * (std::sin(3 * x) * (1 - 9) + 6 * std::cos(3 * x));
      maxerr = std::max(maxerr, std::abs(lap.at(i) - exact));
    }
    return maxerr;
  };
  const double e1 = run(64), e2 = run(128);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
}

TEST_CASE("field CSV round-trips bit-exactly") {
  const Grid g = make_grid_2d(-0.5, 0.75, 0.0, 1.25, 10, 10);
  const ScalarField f = field_from(g, [](double x, double y) {
    return std::sin(17.3 * x) * std::cos(5.1 * y) + 1.0 / 3.0;
  });
  const std::string path = std::filesystem::temp_directory_path() / "fbl_roundtrip.csv";
  write_field_csv(f, path);
  const ScalarField r = read_field_csv(path);
  REQUIRE(r.values.size() == f.values.size());
  for (std::size_t k = 0; k < f.values.size(); ++k) CHECK(r.values[k] == f.values[k]);
  CHECK(r.grid.h == f.grid.h);
  CHECK(r.grid.min == f.grid.min);
  std::remove(path.c_str());
}
