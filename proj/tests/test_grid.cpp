#include "fvk/grid.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "test_util.hpp"

using namespace fvk;
using testutil::Rng;

TEST_CASE("grid construction and node coordinates") {
  const Grid2D g(0.0, 1.0, 0.0, 2.0, 5, 9);
  CHECK(g.hx() == doctest::Approx(0.25));
  CHECK(g.hy() == doctest::Approx(0.25));
  CHECK(g.x(0) == 0.0);
  CHECK(g.x(4) == doctest::Approx(1.0));
  CHECK(g.y(8) == doctest::Approx(2.0));
  CHECK_THROWS_AS(Grid2D(1.0, 0.0, 0.0, 1.0, 5, 5), std::invalid_argument);
  CHECK_THROWS_AS(Grid2D(0.0, 1.0, 0.0, 1.0, 4, 5), std::invalid_argument);
}

TEST_CASE("sampling constants, coordinates, and analytic expressions") {
  const Grid2D g(0.0, 1.0, 0.0, 1.0, 5, 5);
  const ScalarField ones = sample(Expr::constant(1.0), g);
  for (double v : ones.values) CHECK(v == 1.0);

  const Grid2D g3(0.0, 1.0, 0.0, 1.0, 5, 5);
  const ScalarField xs = sample(Expr::x1(), g3);
  CHECK(xs.at(0, 2) == 0.0);
  CHECK(xs.at(2, 2) == doctest::Approx(0.5));
  CHECK(xs.at(4, 2) == doctest::Approx(1.0));

  const ScalarField sines = sample(sin(Expr::x1()), g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) CHECK(sines.at(i, j) == std::sin(g.x(i)));
}

TEST_CASE("sampling a non-finite expression names the node") {
  const Grid2D g(0.0, 1.0, 0.0, 1.0, 5, 5);
  const Expr bad = Expr::constant(1.0) / (Expr::x1() - 0.5);
  CHECK_THROWS_WITH_AS(sample(bad, g) /* pole at x1 = 0.5 */,
                       doctest::Contains("node (2, 0)"), std::runtime_error);
}

TEST_CASE("trapezoid integration") {
  const Grid2D g(0.0, 1.0, 0.0, 1.0, 21, 21);
  CHECK(integrate(sample(Expr::constant(1.0), g)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate(sample(Expr::x1(), g)) == doctest::Approx(0.5).epsilon(1e-14));

  // sin(pi x1) sin(pi x2) integrates to 4 / pi^2; error is O(h^2).
  const double pi = 3.14159265358979323846;
  auto f = [&](const Grid2D& grid) {
    return integrate(sample(sin(pi * Expr::x1()) * sin(pi * Expr::x2()), grid));
  };
  const double exact = 4.0 / (pi * pi);
  const double err1 = std::abs(f(Grid2D(0, 1, 0, 1, 21, 21)) - exact);
  const double err2 = std::abs(f(Grid2D(0, 1, 0, 1, 41, 41)) - exact);
  CHECK(err1 / err2 > 3.5);
  CHECK(err1 / err2 < 4.5);
}

TEST_CASE("csv round trip preserves doubles bit for bit") {
  const auto dir = std::filesystem::temp_directory_path() / "fvk_grid_test";
  std::filesystem::create_directories(dir);
  const Grid2D g(0.0, 1.0, 0.0, 1.0, 6, 5);

  Rng rng(3);
  ScalarField f(g);
  for (double& v : f.values) v = rng.uniform(-1.0, 1.0) / 3.0;
  f.values[7] = 2.0 / 3.0;
  const auto spath = (dir / "scalar.csv").string();
  write_csv(spath, f, "v");
  const ScalarField f2 = read_scalar_csv(spath, g);
  for (int k = 0; k < f.size(); ++k) CHECK(f2[k] == f[k]);

  Vector2Field w(g);
  for (auto& v : w.values) v = Eigen::Vector2d(rng.uniform(-1, 1), rng.uniform(-1, 1)) / 7.0;
  const auto vpath = (dir / "vec.csv").string();
  write_csv(vpath, w, "w");
  const Vector2Field w2 = read_vector2_csv(vpath, g);
  for (int k = 0; k < w.size(); ++k) CHECK(w2[k] == w[k]);
}

TEST_CASE("format_double produces shortest round-trip strings") {
  CHECK(format_double(20.0 / 3.0) == "6.666666666666667");
  CHECK(format_double(-2.0 / 3.0) == "-0.6666666666666666");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.1");
}
