#ifndef KERNELSKEL_LINALG_HPP
#define KERNELSKEL_LINALG_HPP

#include <functional>
#include <vector>

#include "kernelskel/matrix.hpp"

namespace kernelskel {

// Stopping rule shared by the rank-revealing routines: either run until all
// residual column norms drop to eps, or to a fixed rank.
struct Stop {
  enum class Kind { Threshold, FixedRank } kind;
  double eps = 0.0;
  long rank = 0;

  static Stop threshold(double eps) { return {Kind::Threshold, eps, 0}; }
  static Stop fixed_rank(long r) { return {Kind::FixedRank, 0.0, r}; }
};

// Strong rank-revealing QR of A (column selection):
//   A P = Q [R11 R12; 0 R22],  T = R11^{-1} R12,  max |T_ij| <= C (1 + 1e-8).
struct SrrqrResult {
  std::vector<long> perm;   // column permutation, first `rank` entries selected
  long rank = 0;
  Matrix q;                 // n x rank, filled only when requested
  Matrix r11;               // rank x rank upper triangular
  Matrix r12;               // rank x (m - rank)
  Matrix t;                 // R11^{-1} R12
  std::vector<double> residual_col_norms;  // 2-norms of R22 columns
  int swap_count = 0;
  double max_t = 0.0;       // max |T_ij| at exit
};

// Greedy column-pivoted QR to the stop condition, then Gu/Eisenstat-style
// swaps: exchange a selected column i and a rejected column j while the
// determinant gain rho_ij = sqrt(T_ij^2 + (gamma_j / omega_i)^2) exceeds the
// entry bound. In threshold mode, rank extension and swapping alternate until
// both the residual bound and the entry bound hold.
// Ties in pivot selection go to the lowest index. Takes A by value and works
// in place.
SrrqrResult srrqr(Matrix a, double entry_bound, Stop stop, bool want_q = false);

// Interpolative decomposition of the rows of A: A ~= U A(skeleton, :) with
// identity rows of U at the skeleton positions and |U_ij| <= C (1 + 1e-8).
// Threshold mode guarantees || A(i,:) - U(i,:) A(skeleton,:) ||_2 <= eps.
struct IdResult {
  std::vector<long> skeleton;
  Matrix u;            // n x rank
  double epsilon;      // threshold used (threshold mode) or achieved residual
  double entry_bound;
};

IdResult id_rows(const Matrix& a, double entry_bound, Stop stop);

// Least-squares solve: argmin_S || m S - f ||_F via Householder QR; falls
// back to a minimum-norm solution through a Jacobi SVD of the reduced
// triangle when m is rank-deficient at the relative tolerance rank_tol.
// rank_tol = 0 keeps every direction with a nonzero pivot.
Matrix ls_solve(const Matrix& m, const Matrix& f, bool* rank_deficient = nullptr,
                double rank_tol = 1e-12);

// Row-space projection: argmin_U || a - U basis_rows ||_F  (= a basis_rows^+).
Matrix ls_project(const Matrix& basis_rows, const Matrix& a, bool* rank_deficient = nullptr);

// Thin SVD truncated to rank r, one-sided Jacobi (QR-preprocessed when tall).
struct SvdResult {
  Matrix u;                   // n x r
  std::vector<double> sigma;  // non-increasing
  Matrix v;                   // m x r,  A ~= U diag(sigma) V^T
};

SvdResult truncated_svd(const Matrix& a, long r);

// All singular values, non-increasing. Oracle-grade accuracy.
std::vector<double> singular_values(const Matrix& a);

// Partially pivoted adaptive cross approximation over entry oracles:
// row_oracle(i, out) fills row i (length ncols), col_oracle(j, out) fills
// column j. Never materializes the full matrix.
struct AcaResult {
  long rank = 0;
  std::vector<long> row_pivots, col_pivots;
  Matrix u;  // n x rank
  Matrix v;  // rank x m
  bool zero_pivot_stop = false;
};

using EntryOracle = std::function<void(long, double*)>;

AcaResult aca(const EntryOracle& row_oracle, const EntryOracle& col_oracle, long nrows,
              long ncols, Stop stop);

}  // namespace kernelskel

#endif
