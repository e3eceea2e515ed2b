#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kernelskel/kernels.hpp"
#include "kernelskel/linalg.hpp"
#include "test_support.hpp"

using namespace kernelskel;

TEST_CASE("inverse distance block entries") {
  PointSet x, y;
  x.dim = y.dim = 3;
  x.coords = {0, 0, 0};
  y.coords = {3, 4, 0};
  Matrix a = assemble(Kernel::inverse_distance(3), x, y);
  REQUIRE(a.rows() == 1);
  REQUIRE(a.cols() == 1);
  CHECK(a(0, 0) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("multiquadric at zero distance") {
  PointSet x, y;
  x.dim = y.dim = 2;
  x.coords = {0, 0};
  y.coords = {0, 0};
  Matrix a = assemble(Kernel::multiquadric(2), x, y);
  CHECK(a(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("coincident points rejected for singular kernels") {
  PointSet x, y;
  x.dim = y.dim = 2;
  x.coords = {0.5, 0.5, 1.0, 1.0};
  y.coords = {2.0, 2.0, 0.5, 0.5};
  CHECK_THROWS_WITH_AS(assemble(Kernel::inverse_distance(2), x, y),
                       doctest::Contains("X[0], Y[1]"), std::invalid_argument);
  CHECK_NOTHROW(assemble(Kernel::multiquadric(2), x, y));
}

TEST_CASE("hand-built degenerate data evaluates its product form") {
  // rank 1, psi = phi = 1, coefficient 2: every entry is 2
  auto pair = kstest::far_pair(2);
  auto data = std::make_shared<DegenerateData>();
  data->rank = 1;
  data->seed = 0;
  data->source_box = pair.source;
  data->target_box = pair.target.outer;
  data->exponents = {{0, 0}};
  data->weight = {2.0};
  Kernel k = Kernel::degenerate(2, data);
  PointSet x = random_uniform_points(pair.source, 3, 1);
  PointSet y = random_uniform_points(pair.target, 4, 2);
  Matrix a = assemble(k, x, y);
  for (long j = 0; j < 4; ++j)
    for (long i = 0; i < 3; ++i) CHECK(a(i, j) == 2.0);
  CHECK(singular_values(a)[1] <= 1e-14 * singular_values(a)[0]);
}

TEST_CASE("constant degenerate kernel gives a rank-1 constant block") {
  auto pair = kstest::far_pair(2);
  Kernel k = make_degenerate(pair, 1, 3);
  PointSet x = random_uniform_points(pair.source, 3, 10);
  PointSet y = random_uniform_points(pair.target, 4, 11);
  Matrix a = assemble(k, x, y);
  // first Chebyshev term is constant: every entry equals +-1/2
  for (long j = 0; j < a.cols(); ++j)
    for (long i = 0; i < a.rows(); ++i) CHECK(std::fabs(a(i, j)) == doctest::Approx(0.5));
  auto sv = singular_values(a);
  CHECK(sv[0] > 0.9);
  CHECK(sv[1] < 1e-14 * sv[0]);
}

TEST_CASE("degenerate kernel has the prescribed numerical rank") {
  auto pair = kstest::far_pair(2);
  Kernel k = make_degenerate(pair, 5, 42);
  PointSet x = random_uniform_points(pair.source, 50, 1);
  PointSet y = random_uniform_points(pair.target, 60, 2);
  Matrix a = assemble(k, x, y);
  auto sv = singular_values(a);
  CHECK(sv[4] > 1e-8 * sv[0]);
  CHECK(sv[5] < 1e-12 * sv[0]);

  // factor-form evaluation agrees with the assembled block
  Matrix psi = degenerate_psi(k, x);
  Matrix phi = degenerate_phi_weighted(k, y);
  Matrix prod = matmul(psi, phi, true, false);
  CHECK(frobenius_diff(prod, a) <= 1e-13 * frobenius_norm(a));
}

TEST_CASE("assemble matches the symmetric transpose") {
  Xoshiro256ss rng(7);
  PointSet x = random_uniform_points(Box::centered_cube(3, 1.0), 20, rng.next());
  PointSet y = random_uniform_points(
      ShellRegion(Box::centered_cube(3, 9.0), Box::centered_cube(3, 3.0)), 25, rng.next());
  for (auto k : {Kernel::inverse_distance(3), Kernel::multiquadric(3)}) {
    Matrix a = assemble(k, x, y);
    Matrix b = assemble(k, y, x);
    CHECK(frobenius_diff(a, b.transpose()) == 0.0);
  }
}

TEST_CASE("translation invariance of assembled blocks") {
  Xoshiro256ss rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(2));
    PointSet x = random_uniform_points(Box::centered_cube(d, 1.0), 8, rng.next());
    PointSet y = random_uniform_points(
        ShellRegion(Box::centered_cube(d, 9.0), Box::centered_cube(d, 3.0)), 9, rng.next());
    Point t;
    t.coords.resize(d);
    for (int kk = 0; kk < d; ++kk) t.coords[kk] = rng.uniform(-2.0, 2.0);
    for (auto k : {Kernel::inverse_distance(d), Kernel::multiquadric(d)}) {
      Matrix a = assemble(k, x, y);
      Matrix b = assemble(k, translate(x, t), translate(y, t));
      double worst = 0.0;
      for (long j = 0; j < a.cols(); ++j)
        for (long i = 0; i < a.rows(); ++i) worst = std::max(worst, std::fabs(a(i, j) - b(i, j)));
      CHECK(worst <= 8.0 * 2.220446049250313e-16 * max_abs(a));
    }
  }
}

TEST_CASE("kernel parsing") {
  CHECK(parse_kernel("inv-dist", 2).name() == "inv-dist");
  CHECK(parse_kernel("multiquadric", 3).name() == "multiquadric");
  auto pair = kstest::far_pair(2);
  Kernel k = parse_kernel("degenerate:r=7:seed=3", 2, &pair);
  CHECK(k.name() == "degenerate:r=7:seed=3");
  CHECK_THROWS(parse_kernel("degenerate:r=7:seed=3", 2));
  CHECK_THROWS(parse_kernel("nope", 2));
}
