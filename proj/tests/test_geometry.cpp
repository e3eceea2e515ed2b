#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "kernelskel/geometry.hpp"
#include "kernelskel/kernels.hpp"
#include "test_support.hpp"

using namespace kernelskel;

TEST_CASE("random points are reproducible") {
  Box b = Box::centered_cube(2, 0.5);
  Box unit({0.0, 0.0}, {1.0, 1.0});
  PointSet a = random_uniform_points(unit, 4, 7);
  PointSet c = random_uniform_points(unit, 4, 7);
  CHECK(a.size() == 4);
  CHECK(a.coords == c.coords);
  PointSet d = random_uniform_points(unit, 4, 8);
  CHECK(a.coords != d.coords);
  (void)b;
}

TEST_CASE("grid points fill a shell") {
  ShellRegion shell(Box::centered_cube(2, 9.0), Box::centered_cube(2, 3.0));
  PointSet ps = grid_points(shell, 100);
  CHECK(ps.size() >= 100);
  for (long i = 0; i < ps.size(); ++i) {
    const double* p = ps.point(i);
    const double m = std::max(std::fabs(p[0]), std::fabs(p[1]));
    CHECK(m >= 3.0);
    CHECK(m <= 9.0);
  }
}

TEST_CASE("adaptive grid splits points across the near band") {
  ShellRegion shell(Box::centered_cube(2, 9.0), Box::centered_cube(2, 1.1));
  Box band = Box::centered_cube(2, 2.0);
  PointSet ps = adaptive_grid_points(shell, 15000, 0.5, band);
  long near = 0;
  for (long i = 0; i < ps.size(); ++i)
    if (band.contains(ps.point(i))) ++near;
  const long far = ps.size() - near;
  CHECK(near > 6500);
  CHECK(near < 8500);
  CHECK(far > 6500);
  CHECK(far < 8500);
  for (long i = 0; i < ps.size(); ++i) CHECK(shell.contains(ps.point(i), 1e-12));
}

TEST_CASE("surface grid lies on the inner boundary") {
  ShellRegion shell(Box::centered_cube(2, 9.0), Box::centered_cube(2, 3.0));
  PointSet ps = surface_grid_points(shell, 4);
  REQUIRE(ps.size() == 4);
  for (long i = 0; i < 4; ++i) {
    const double* p = ps.point(i);
    const bool on_face = std::fabs(std::fabs(p[0]) - 3.0) < 1e-12 ||
                         std::fabs(std::fabs(p[1]) - 3.0) < 1e-12;
    CHECK(on_face);
    CHECK(shell.contains(p, 1e-12));
  }
  PointSet many = surface_grid_points(shell, 101);
  CHECK(many.size() == 101);
  ShellRegion shell3(Box::centered_cube(3, 9.0), Box::centered_cube(3, 3.0));
  PointSet ps3 = surface_grid_points(shell3, 300);
  CHECK(ps3.size() == 300);
  for (long i = 0; i < ps3.size(); ++i) CHECK(shell3.contains(ps3.point(i), 1e-12));
}

TEST_CASE("membership closure across all generation modes") {
  Xoshiro256ss rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const double inner_h = 0.5 + rng.uniform01();
    const double outer_h = inner_h + 0.5 + 2.0 * rng.uniform01();
    ShellRegion shell(Box::centered_cube(d, outer_h), Box::centered_cube(d, inner_h));
    Region region;
    if (trial % 3 == 0)
      region = Box::centered_cube(d, outer_h);
    else
      region = shell;
    const long n = 1 + static_cast<long>(rng.below(40));
    GenMode mode;
    switch (trial % 4) {
      case 0:
        mode = ModeRandomUniform{n, rng.next()};
        break;
      case 1:
        mode = ModeGridApprox{n};
        break;
      case 2:
        if (std::holds_alternative<Box>(region)) region = shell;
        mode = ModeSurfaceGrid{n};
        break;
      default:
        if (std::holds_alternative<Box>(region)) region = shell;
        mode = ModeAdaptiveGrid{std::max<long>(n, 4), 0.5,
                                Box::centered_cube(d, 0.5 * (inner_h + outer_h))};
        break;
    }
    PointSet ps = generate_points(region, mode);
    CHECK(ps.size() >= 1);
    for (long i = 0; i < ps.size(); ++i) {
      if (!region_contains(region, ps.point(i), 1e-12)) {
        CAPTURE(trial);
        CHECK(false);
        break;
      }
    }
  }
}

TEST_CASE("generation error cases") {
  ShellRegion degenerate(Box::centered_cube(2, 3.0), Box::centered_cube(2, 3.0));
  CHECK_THROWS(grid_points(degenerate, 10));
  CHECK_THROWS(random_uniform_points(Box::centered_cube(2, 1.0), 0, 1));
  CHECK_THROWS(generate_points(Box::centered_cube(2, 1.0), ModeSurfaceGrid{4}));
}

TEST_CASE("admissibility predicate") {
  Box a({0.0, 0.0}, {1.0, 1.0});
  Box b({2.0, 0.0}, {3.0, 1.0});
  Box c({1.0, 0.0}, {2.0, 1.0});
  CHECK(admissible(a, b, Admissibility::Strong));
  CHECK(admissible(a, b, Admissibility::Weak));
  CHECK_FALSE(admissible(a, c, Admissibility::Strong));
  CHECK(admissible(a, c, Admissibility::Weak));
  CHECK_FALSE(admissible(a, a, Admissibility::Strong));
  CHECK_FALSE(admissible(a, a, Admissibility::Weak));
  Box d3({0, 0, 0}, {1, 1, 1});
  CHECK_THROWS(admissible(a, d3, Admissibility::Weak));

  // symmetry over random sibling-style boxes
  Xoshiro256ss rng(99);
  for (int t = 0; t < 300; ++t) {
    const int d = 1 + static_cast<int>(rng.below(3));
    std::vector<double> lo1(d), lo2(d), hi1(d), hi2(d);
    for (int k = 0; k < d; ++k) {
      lo1[k] = static_cast<double>(rng.below(5));
      lo2[k] = static_cast<double>(rng.below(5));
      hi1[k] = lo1[k] + 1.0;
      hi2[k] = lo2[k] + 1.0;
    }
    Box x(lo1, hi1), y(lo2, hi2);
    for (auto kind : {Admissibility::Strong, Admissibility::Weak})
      CHECK(admissible(x, y, kind) == admissible(y, x, kind));
    CHECK(eta_admissible(x, y, 1.0) == eta_admissible(y, x, 1.0));
  }
}

TEST_CASE("eta admissibility matches non-adjacency for unit boxes") {
  Box a({0.0, 0.0}, {1.0, 1.0});
  Box far({2.0, 0.0}, {3.0, 1.0});
  Box touch({1.0, 0.0}, {2.0, 1.0});
  CHECK(eta_admissible(a, far, 1.0));
  CHECK_FALSE(eta_admissible(a, touch, 1.0));
}

TEST_CASE("translate basics") {
  PointSet ps;
  ps.dim = 2;
  ps.coords = {1.0, 1.0};
  Point shift{{-1.0, -1.0}};
  PointSet out = translate(ps, shift);
  CHECK(out.point(0)[0] == 0.0);
  CHECK(out.point(0)[1] == 0.0);
  Point zero{{0.0, 0.0}};
  PointSet same = translate(ps, zero);
  CHECK(same.coords == ps.coords);
}

TEST_CASE("kernel evaluation is translation invariant to a few ulps") {
  Xoshiro256ss rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(2));
    PointSet x = random_uniform_points(Box::centered_cube(d, 1.0), 5, rng.next());
    PointSet y = random_uniform_points(
        ShellRegion(Box::centered_cube(d, 9.0), Box::centered_cube(d, 3.0)), 5, rng.next());
    Point t;
    t.coords.resize(d);
    for (int k = 0; k < d; ++k) t.coords[k] = rng.uniform(-1.0, 1.0);
    PointSet xt = translate(x, t);
    PointSet yt = translate(y, t);
    for (auto kernel : {Kernel::inverse_distance(d), Kernel::multiquadric(d)}) {
      Matrix a = assemble(kernel, x, y);
      Matrix b = assemble(kernel, xt, yt);
      for (long j = 0; j < a.cols(); ++j)
        for (long i = 0; i < a.rows(); ++i) {
          const double ulp = std::fabs(a(i, j)) * 2.220446049250313e-16;
          CHECK(std::fabs(a(i, j) - b(i, j)) <= 4.0 * ulp);
        }
    }
  }
}

TEST_CASE("point set files round-trip") {
  PointSet ps = random_uniform_points(Box::centered_cube(3, 2.0), 17, 5);
  const std::string path = (std::filesystem::temp_directory_path() / "ks_pointset.txt").string();
  write_pointset(path, ps);
  PointSet back = read_pointset(path);
  REQUIRE(back.size() == ps.size());
  REQUIRE(back.dim == ps.dim);
  for (long i = 0; i < ps.size(); ++i)
    for (int k = 0; k < ps.dim; ++k) CHECK(back.point(i)[k] == doctest::Approx(ps.point(i)[k]).epsilon(1e-15));
  std::remove(path.c_str());
}
