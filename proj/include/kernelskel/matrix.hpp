#ifndef KERNELSKEL_MATRIX_HPP
#define KERNELSKEL_MATRIX_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace kernelskel {

// Dense column-major double matrix. Column-major because the factorization
// code works column-wise (pivoted QR, column norm updates, triangular solves).
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(long rows, long cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {}

  static Matrix identity(long n);

  long rows() const { return rows_; }
  long cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(long i, long j) { return data_[static_cast<size_t>(j) * rows_ + i]; }
  double operator()(long i, long j) const { return data_[static_cast<size_t>(j) * rows_ + i]; }

  double* col(long j) { return data_.data() + static_cast<size_t>(j) * rows_; }
  const double* col(long j) const { return data_.data() + static_cast<size_t>(j) * rows_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Matrix transpose() const;

  // rows picked by index, in the given order
  Matrix select_rows(const std::vector<long>& idx) const;
  Matrix select_cols(const std::vector<long>& idx) const;

  void swap_cols(long a, long b);

  bool all_finite() const;

 private:
  long rows_, cols_;
  std::vector<double> data_;
};

// c = alpha * op(a) * op(b) + beta * c, shapes checked.
// Parallel over columns of c; bitwise identical for any thread count.
void gemm(const Matrix& a, const Matrix& b, Matrix& c, bool trans_a = false,
          bool trans_b = false, double alpha = 1.0, double beta = 0.0);
Matrix matmul(const Matrix& a, const Matrix& b, bool trans_a = false, bool trans_b = false);

// y = beta * y + alpha * op(a) * x
void gemv(const Matrix& a, const double* x, double* y, bool trans = false,
          double alpha = 1.0, double beta = 0.0);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
double column_norm(const Matrix& a, long j);

// ||a - b||_F
double frobenius_diff(const Matrix& a, const Matrix& b);

double dot(const double* x, const double* y, long n);
double norm2(const double* x, long n);

// Binary fixture format: magic "KSMX", int64 rows, int64 cols, then
// row-major IEEE doubles.
void write_matrix(const std::string& path, const Matrix& m);
Matrix read_matrix(const std::string& path);

}  // namespace kernelskel

#endif
