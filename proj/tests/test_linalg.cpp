#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "kernelskel/kernels.hpp"
#include "kernelskel/linalg.hpp"
#include "test_support.hpp"

using namespace kernelskel;

namespace {

constexpr double kBoundSlack = 1.0 + 1e-8;

// direct residual of an ID: row i of a - u(i,:) * a(skeleton,:)
double worst_row_residual(const Matrix& a, const IdResult& id) {
  Matrix aj = a.select_rows(id.skeleton);
  Matrix approx = matmul(id.u, aj);
  double worst = 0.0;
  for (long i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (long j = 0; j < a.cols(); ++j) {
      const double d = a(i, j) - approx(i, j);
      s += d * d;
    }
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

double max_entry_without_identity_rows(const IdResult& id) {
  double m = 0.0;
  for (long i = 0; i < id.u.rows(); ++i)
    for (long j = 0; j < id.u.cols(); ++j) m = std::max(m, std::fabs(id.u(i, j)));
  return m;
}

}  // namespace

TEST_CASE("srrqr on a diagonal matrix keeps the dominant columns") {
  Matrix a(3, 3);
  a(0, 0) = 3;
  a(1, 1) = 2;
  a(2, 2) = 1;
  auto res = srrqr(a, 2.0, Stop::fixed_rank(2), true);
  REQUIRE(res.rank == 2);
  CHECK(res.perm[0] == 0);
  CHECK(res.perm[1] == 1);
  CHECK(res.max_t == 0.0);
  // reconstruction of the two selected columns
  Matrix sel = matmul(res.q, res.r11);
  CHECK(std::fabs(std::fabs(sel(0, 0)) - 3.0) < 1e-14);
}

TEST_CASE("srrqr threshold on a rank-1 matrix") {
  Matrix a(3, 3);
  for (long i = 0; i < 3; ++i)
    for (long j = 0; j < 3; ++j) a(i, j) = 1.0;
  auto res = srrqr(a, 2.0, Stop::threshold(1e-10));
  CHECK(res.rank == 1);
  for (double g : res.residual_col_norms) CHECK(g <= 1e-10);
}

TEST_CASE("srrqr rejects bad input") {
  Matrix a(2, 2);
  a(0, 0) = std::nan("");
  CHECK_THROWS(srrqr(a, 2.0, Stop::threshold(1e-8)));
  Matrix b(2, 2);
  CHECK_THROWS(srrqr(b, 0.5, Stop::threshold(1e-8)));
  CHECK_THROWS(srrqr(Matrix(), 2.0, Stop::threshold(1e-8)));
}

TEST_CASE("kahan matrix: plain pivoted qr violates the entry bound, srrqr repairs it") {
  const long n = 96;
  Matrix a = kstest::kahan_matrix(n, 0.285);
  // entry bound so large that the swap phase never runs = classical QRCP
  auto plain = srrqr(a, 1e30, Stop::fixed_rank(n - 1));
  CHECK(plain.swap_count == 0);
  CHECK(plain.max_t > 1e3);

  auto strong = srrqr(a, 2.0, Stop::fixed_rank(n - 1), true);
  CHECK(strong.swap_count > 0);
  CHECK(strong.max_t <= 2.0 * kBoundSlack);
  // factorization still reconstructs the selected columns
  Matrix sel_cols = a.select_cols(
      std::vector<long>(strong.perm.begin(), strong.perm.begin() + strong.rank));
  Matrix rec = matmul(strong.q, strong.r11);
  CHECK(frobenius_diff(sel_cols, rec) <= 1e-12 * frobenius_norm(a));
}

TEST_CASE("srrqr entry bound holds across random spectra") {
  Xoshiro256ss rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const long n = 20 + static_cast<long>(rng.below(100));
    const long m = 20 + static_cast<long>(rng.below(100));
    const double cond = std::pow(10.0, static_cast<double>(rng.below(13)));
    const long k = std::min({n, m, 12 + static_cast<long>(rng.below(20))});
    Matrix a = kstest::matrix_with_spectrum(n, m, kstest::geometric_spectrum(k, cond), rng.next());
    auto res = srrqr(a, 2.0, Stop::threshold(1e-10 * frobenius_norm(a)), true);
    CHECK(res.max_t <= 2.0 * kBoundSlack);
    if (res.rank > 0) {
      Matrix sel = a.select_cols(
          std::vector<long>(res.perm.begin(), res.perm.begin() + res.rank));
      CHECK(frobenius_diff(sel, matmul(res.q, res.r11)) <= 1e-12 * frobenius_norm(a));
    }
  }
}

TEST_CASE("id of a rank-1 outer product") {
  Xoshiro256ss rng(3);
  Matrix a(5, 4);
  std::vector<double> u(5), v(4);
  for (auto& x : u) x = rng.uniform(-1, 1);
  for (auto& x : v) x = rng.uniform(-1, 1);
  for (long i = 0; i < 5; ++i)
    for (long j = 0; j < 4; ++j) a(i, j) = u[i] * v[j];
  auto id = id_rows(a, 2.0, Stop::threshold(1e-12));
  CHECK(id.skeleton.size() == 1);
  CHECK(worst_row_residual(a, id) <= 1e-12);
}

TEST_CASE("id of the identity keeps every row at a loose threshold") {
  Matrix a = Matrix::identity(4);
  auto id = id_rows(a, 2.0, Stop::threshold(0.5));
  CHECK(id.skeleton.size() == 4);
}

TEST_CASE("id skeleton rows carry exact identity blocks") {
  Matrix a = kstest::gaussian_matrix(30, 20, 5);
  auto id = id_rows(a, 2.0, Stop::fixed_rank(8));
  REQUIRE(id.skeleton.size() == 8);
  for (size_t l = 0; l < id.skeleton.size(); ++l)
    for (long c = 0; c < id.u.cols(); ++c)
      CHECK(id.u(id.skeleton[l], c) == (static_cast<long>(l) == c ? 1.0 : 0.0));
  CHECK(max_entry_without_identity_rows(id) <= 2.0 * kBoundSlack);
}

TEST_CASE("id threshold rank is never below the svd count") {
  // kernel block: far-apart 3D geometry
  Xoshiro256ss rng(17);
  PointSet x = random_uniform_points(Box::centered_cube(3, 1.0), 200, rng.next());
  PointSet y = random_uniform_points(kstest::far_shell(3), 300, rng.next());
  Matrix a = assemble(Kernel::inverse_distance(3), x, y);
  const double eps = 1e-6 * std::sqrt(300.0);
  auto id = id_rows(a, 2.0, Stop::threshold(eps));
  CHECK(worst_row_residual(a, id) <= eps * (1 + 1e-9));
  // any ID with row residuals <= eps has Frobenius error <= sqrt(n) eps,
  // so every singular value above that must be captured by the skeleton
  auto sv = singular_values(a);
  long count = 0;
  for (double s : sv)
    if (s > eps * std::sqrt(200.0)) ++count;
  CHECK(static_cast<long>(id.skeleton.size()) >= count);
}

TEST_CASE("rank is monotone in the threshold") {
  Matrix a = kstest::matrix_with_spectrum(60, 80, kstest::geometric_spectrum(40, 1e12), 23);
  long prev = 1000;
  for (double eps : {1e-10, 1e-8, 1e-6, 1e-4, 1e-2}) {
    auto id = id_rows(a, 2.0, Stop::threshold(eps * frobenius_norm(a)));
    CHECK(static_cast<long>(id.skeleton.size()) <= prev);
    prev = static_cast<long>(id.skeleton.size());
  }
}

TEST_CASE("ls_project basics") {
  Matrix a = kstest::gaussian_matrix(6, 9, 31);
  Matrix u = ls_project(a, a);
  CHECK(frobenius_diff(u, Matrix::identity(6)) < 1e-12);

  Matrix eye = Matrix::identity(2);
  Matrix basis(1, 2);
  basis(0, 0) = 1.0;
  Matrix u2 = ls_project(basis, eye);
  CHECK(u2(0, 0) == doctest::Approx(1.0));
  CHECK(u2(1, 0) == doctest::Approx(0.0));
  Matrix resid = matmul(u2, basis);
  double row2 = 0.0;
  for (long j = 0; j < 2; ++j) {
    const double d = eye(1, j) - resid(1, j);
    row2 += d * d;
  }
  CHECK(std::sqrt(row2) == doctest::Approx(1.0));
}

TEST_CASE("ls_project is frobenius-optimal against random perturbations") {
  Xoshiro256ss rng(77);
  Matrix a = kstest::gaussian_matrix(30, 50, rng.next());
  Matrix basis = kstest::gaussian_matrix(10, 50, rng.next());
  Matrix u = ls_project(basis, a);
  Matrix best = matmul(u, basis);
  const double err = frobenius_diff(a, best);
  for (int t = 0; t < 1000; ++t) {
    Matrix up = u;
    const long i = static_cast<long>(rng.below(30));
    const long j = static_cast<long>(rng.below(10));
    up(i, j) += rng.uniform(-0.5, 0.5);
    CHECK(frobenius_diff(a, matmul(up, basis)) >= err - 1e-12);
  }
}

TEST_CASE("ls_project flags rank deficiency and returns a least squares fit") {
  Matrix basis(2, 4);
  for (long j = 0; j < 4; ++j) {
    basis(0, j) = j + 1.0;
    basis(1, j) = 2.0 * (j + 1.0);  // parallel rows
  }
  Matrix a = kstest::gaussian_matrix(5, 4, 13);
  bool deficient = false;
  Matrix u = ls_project(basis, a, &deficient);
  CHECK(deficient);
  // residual must match projection onto the 1-d row space
  Matrix b1(1, 4);
  for (long j = 0; j < 4; ++j) b1(0, j) = basis(0, j);
  Matrix u1 = ls_project(b1, a);
  CHECK(frobenius_diff(matmul(u, basis), matmul(u1, b1)) < 1e-10);
}

TEST_CASE("truncated svd basics") {
  Matrix a(3, 3);
  a(0, 0) = 3;
  a(1, 1) = 2;
  a(2, 2) = 1;
  auto svd = truncated_svd(a, 2);
  CHECK(svd.sigma[0] == doctest::Approx(3.0));
  CHECK(svd.sigma[1] == doctest::Approx(2.0));
  Matrix us(3, 2);
  for (long j = 0; j < 2; ++j)
    for (long i = 0; i < 3; ++i) us(i, j) = svd.u(i, j) * svd.sigma[j];
  Matrix approx = matmul(us, svd.v, false, true);
  CHECK(frobenius_diff(a, approx) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("truncated svd reproduces a rank-1 matrix") {
  Xoshiro256ss rng(41);
  Matrix a(12, 7);
  std::vector<double> u(12), v(7);
  for (auto& x : u) x = rng.uniform(-1, 1);
  for (auto& x : v) x = rng.uniform(-1, 1);
  for (long i = 0; i < 12; ++i)
    for (long j = 0; j < 7; ++j) a(i, j) = u[i] * v[j];
  auto svd = truncated_svd(a, 1);
  Matrix us(12, 1);
  for (long i = 0; i < 12; ++i) us(i, 0) = svd.u(i, 0) * svd.sigma[0];
  CHECK(frobenius_diff(a, matmul(us, svd.v, false, true)) <= 1e-13 * frobenius_norm(a));
}

TEST_CASE("eckart-young: svd error never exceeds the id error at equal rank") {
  Xoshiro256ss rng(19);
  PointSet x = random_uniform_points(Box::centered_cube(2, 1.0), 40, rng.next());
  PointSet y = random_uniform_points(kstest::far_shell(2), 60, rng.next());
  Matrix a = assemble(Kernel::multiquadric(2), x, y);
  for (long r : {3L, 6L, 10L}) {
    auto id = id_rows(a, 2.0, Stop::fixed_rank(r));
    Matrix id_approx = matmul(id.u, a.select_rows(id.skeleton));
    auto svd = truncated_svd(a, r);
    Matrix us(a.rows(), r);
    for (long j = 0; j < r; ++j)
      for (long i = 0; i < a.rows(); ++i) us(i, j) = svd.u(i, j) * svd.sigma[j];
    Matrix svd_approx = matmul(us, svd.v, false, true);
    CHECK(frobenius_diff(a, svd_approx) <= frobenius_diff(a, id_approx) * (1 + 1e-12));
  }
}

TEST_CASE("aca on an exact rank-1 matrix stops at rank 1") {
  Matrix a(8, 5);
  for (long i = 0; i < 8; ++i)
    for (long j = 0; j < 5; ++j) a(i, j) = (i + 1.0) * (j + 2.0);
  auto row = [&](long i, double* out) {
    for (long j = 0; j < 5; ++j) out[j] = a(i, j);
  };
  auto col = [&](long j, double* out) {
    for (long i = 0; i < 8; ++i) out[i] = a(i, j);
  };
  auto res = aca(row, col, 8, 5, Stop::fixed_rank(3));
  CHECK(res.rank == 1);
  CHECK(res.zero_pivot_stop);
  CHECK(frobenius_diff(a, matmul(res.u, res.v)) <= 1e-12 * frobenius_norm(a));
}

TEST_CASE("aca pivot walk on the identity") {
  Matrix a = Matrix::identity(2);
  auto row = [&](long i, double* out) {
    for (long j = 0; j < 2; ++j) out[j] = a(i, j);
  };
  auto col = [&](long j, double* out) {
    for (long i = 0; i < 2; ++i) out[i] = a(i, j);
  };
  auto res = aca(row, col, 2, 2, Stop::fixed_rank(2));
  REQUIRE(res.rank == 2);
  CHECK(res.row_pivots[0] == 0);
  CHECK(res.col_pivots[0] == 0);
  CHECK(res.row_pivots[1] == 1);
  CHECK(res.col_pivots[1] == 1);
  CHECK(frobenius_diff(a, matmul(res.u, res.v)) <= 1e-14);
}

TEST_CASE("aca interpolates exactly at its pivots") {
  Xoshiro256ss rng(29);
  PointSet x = random_uniform_points(Box::centered_cube(3, 1.0), 80, rng.next());
  PointSet y = random_uniform_points(kstest::far_shell(3), 90, rng.next());
  Matrix a = assemble(Kernel::inverse_distance(3), x, y);
  auto row = [&](long i, double* out) {
    for (long j = 0; j < a.cols(); ++j) out[j] = a(i, j);
  };
  auto col = [&](long j, double* out) {
    for (long i = 0; i < a.rows(); ++i) out[i] = a(i, j);
  };
  auto res = aca(row, col, a.rows(), a.cols(), Stop::fixed_rank(15));
  Matrix approx = matmul(res.u, res.v);
  const double scale = max_abs(a);
  for (long p : res.row_pivots)
    for (long j = 0; j < a.cols(); ++j) CHECK(std::fabs(a(p, j) - approx(p, j)) <= 1e-12 * scale);
  for (long p : res.col_pivots)
    for (long i = 0; i < a.rows(); ++i) CHECK(std::fabs(a(i, p) - approx(i, p)) <= 1e-12 * scale);
}

TEST_CASE("aca error tracks the svd at matched rank on a far-field block") {
  Xoshiro256ss rng(101);
  PointSet x = random_uniform_points(Box::centered_cube(3, 1.0), 500, rng.next());
  PointSet y = random_uniform_points(kstest::far_shell(3), 800, rng.next());
  Matrix a = assemble(Kernel::inverse_distance(3), x, y);
  auto id = id_rows(a, 2.0, Stop::threshold(1e-6 * std::sqrt(800.0)));
  const long r = static_cast<long>(id.skeleton.size());
  auto row = [&](long i, double* out) {
    for (long j = 0; j < a.cols(); ++j) out[j] = a(i, j);
  };
  auto col = [&](long j, double* out) {
    for (long i = 0; i < a.rows(); ++i) out[i] = a(i, j);
  };
  auto res = aca(row, col, a.rows(), a.cols(), Stop::fixed_rank(r));
  auto svd = truncated_svd(a, res.rank);
  Matrix us(a.rows(), res.rank);
  for (long j = 0; j < res.rank; ++j)
    for (long i = 0; i < a.rows(); ++i) us(i, j) = svd.u(i, j) * svd.sigma[j];
  const double aca_err = frobenius_diff(a, matmul(res.u, res.v));
  const double svd_err = frobenius_diff(a, matmul(us, svd.v, false, true));
  CHECK(aca_err <= 100.0 * std::max(svd_err, 1e-16 * frobenius_norm(a)));
}

TEST_CASE("matrix binary files round-trip") {
  Matrix a = kstest::gaussian_matrix(9, 4, 71);
  const std::string path = (std::filesystem::temp_directory_path() / "ks_matrix.bin").string();
  write_matrix(path, a);
  Matrix b = read_matrix(path);
  CHECK(frobenius_diff(a, b) == 0.0);
  std::remove(path.c_str());
}
