#include "kernelskel/matrix.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "kernelskel/util.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kernelskel {

Matrix Matrix::identity(long n) {
  Matrix m(n, n);
  for (long i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (long j = 0; j < cols_; ++j) {
    const double* c = col(j);
    for (long i = 0; i < rows_; ++i) t(j, i) = c[i];
  }
  return t;
}

Matrix Matrix::select_rows(const std::vector<long>& idx) const {
  Matrix out(static_cast<long>(idx.size()), cols_);
  for (long j = 0; j < cols_; ++j) {
    const double* src = col(j);
    double* dst = out.col(j);
    for (size_t i = 0; i < idx.size(); ++i) dst[i] = src[idx[i]];
  }
  return out;
}

Matrix Matrix::select_cols(const std::vector<long>& idx) const {
  Matrix out(rows_, static_cast<long>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j)
    std::memcpy(out.col(static_cast<long>(j)), col(idx[j]), sizeof(double) * rows_);
  return out;
}

void Matrix::swap_cols(long a, long b) {
  if (a == b) return;
  double* ca = col(a);
  double* cb = col(b);
  for (long i = 0; i < rows_; ++i) std::swap(ca[i], cb[i]);
}

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

double dot(const double* x, const double* y, long n) {
  // four accumulators to break the serial fma chain; fixed summation order
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  long i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double norm2(const double* x, long n) { return std::sqrt(dot(x, x, n)); }

namespace {

// column j of op(m) written into scratch; avoids transposing whole matrices
void fetch_col(const Matrix& m, bool trans, long j, std::vector<double>& scratch) {
  if (!trans) {
    const double* c = m.col(j);
    scratch.assign(c, c + m.rows());
  } else {
    scratch.resize(m.cols());
    for (long i = 0; i < m.cols(); ++i) scratch[i] = m(j, i);
  }
}

}  // namespace

void gemm(const Matrix& a, const Matrix& b, Matrix& c, bool trans_a, bool trans_b,
          double alpha, double beta) {
  const long m = trans_a ? a.cols() : a.rows();
  const long k = trans_a ? a.rows() : a.cols();
  const long kb = trans_b ? b.cols() : b.rows();
  const long n = trans_b ? b.rows() : b.cols();
  if (k != kb) throw std::invalid_argument("gemm: inner dimensions disagree");
  if (c.rows() != m || c.cols() != n) throw std::invalid_argument("gemm: output shape mismatch");

  const int nt = num_threads();
#pragma omp parallel num_threads(nt) if (nt > 1)
  {
    std::vector<double> bj;
#pragma omp for schedule(static)
    for (long j = 0; j < n; ++j) {
      fetch_col(b, trans_b, j, bj);
      double* cj = c.col(j);
      if (beta == 0.0)
        std::memset(cj, 0, sizeof(double) * m);
      else if (beta != 1.0)
        for (long i = 0; i < m; ++i) cj[i] *= beta;
      if (!trans_a) {
        // cj += alpha * a * bj  (axpy per column of a)
        for (long l = 0; l < k; ++l) {
          const double w = alpha * bj[l];
          if (w == 0.0) continue;
          const double* al = a.col(l);
          for (long i = 0; i < m; ++i) cj[i] += w * al[i];
        }
      } else {
        // cj[i] = alpha * dot(a.col(i), bj)
        for (long i = 0; i < m; ++i) cj[i] += alpha * dot(a.col(i), bj.data(), k);
      }
    }
  }
}

Matrix matmul(const Matrix& a, const Matrix& b, bool trans_a, bool trans_b) {
  Matrix c(trans_a ? a.cols() : a.rows(), trans_b ? b.rows() : b.cols());
  gemm(a, b, c, trans_a, trans_b, 1.0, 0.0);
  return c;
}

void gemv(const Matrix& a, const double* x, double* y, bool trans, double alpha, double beta) {
  const long m = trans ? a.cols() : a.rows();
  if (beta == 0.0)
    std::memset(y, 0, sizeof(double) * m);
  else if (beta != 1.0)
    for (long i = 0; i < m; ++i) y[i] *= beta;
  if (!trans) {
    for (long j = 0; j < a.cols(); ++j) {
      const double w = alpha * x[j];
      if (w == 0.0) continue;
      const double* aj = a.col(j);
      for (long i = 0; i < a.rows(); ++i) y[i] += w * aj[i];
    }
  } else {
    for (long j = 0; j < a.cols(); ++j) y[j] += alpha * dot(a.col(j), x, a.rows());
  }
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  const double* p = a.data();
  const size_t n = static_cast<size_t>(a.rows()) * a.cols();
  for (size_t i = 0; i < n; ++i) s += p[i] * p[i];
  return std::sqrt(s);
}

double max_abs(const Matrix& a) {
  double s = 0.0;
  const double* p = a.data();
  const size_t n = static_cast<size_t>(a.rows()) * a.cols();
  for (size_t i = 0; i < n; ++i) s = std::max(s, std::fabs(p[i]));
  return s;
}

double column_norm(const Matrix& a, long j) { return norm2(a.col(j), a.rows()); }

double frobenius_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("frobenius_diff: shape mismatch");
  double s = 0.0;
  const double* pa = a.data();
  const double* pb = b.data();
  const size_t n = static_cast<size_t>(a.rows()) * a.cols();
  for (size_t i = 0; i < n; ++i) {
    const double d = pa[i] - pb[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void write_matrix(const std::string& path, const Matrix& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_matrix: cannot open " + path);
  f.write("KSMX", 4);
  int64_t dims[2] = {m.rows(), m.cols()};
  f.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  std::vector<double> row(m.cols());
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) row[j] = m(i, j);
    f.write(reinterpret_cast<const char*>(row.data()), sizeof(double) * row.size());
  }
}

Matrix read_matrix(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_matrix: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (std::memcmp(magic, "KSMX", 4) != 0) throw std::runtime_error("read_matrix: bad magic in " + path);
  int64_t dims[2];
  f.read(reinterpret_cast<char*>(dims), sizeof(dims));
  Matrix m(dims[0], dims[1]);
  std::vector<double> row(m.cols());
  for (long i = 0; i < m.rows(); ++i) {
    f.read(reinterpret_cast<char*>(row.data()), sizeof(double) * row.size());
    for (long j = 0; j < m.cols(); ++j) m(i, j) = row[j];
  }
  if (!f) throw std::runtime_error("read_matrix: truncated file " + path);
  return m;
}

}  // namespace kernelskel
