#include "proxcert/kernels.hpp"

#include <algorithm>
#include <vector>

namespace proxcert::kernels {
namespace {

inline double row_dot(const double* row, const double* x, Eigen::Index n) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) acc += row[j] * x[j];
  return acc;
}

inline double block_sum(const double* x, const double* y, Eigen::Index begin, Eigen::Index end) {
  double acc = 0.0;
  for (Eigen::Index i = begin; i < end; ++i) acc += x[i] * y[i];
  return acc;
}

}  // namespace

void gemv(const RowMatrix& A, const Vector& x, Vector& out) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  out.resize(m);
  const double* a = A.data();
  const double* xp = x.data();
  double* o = out.data();
#pragma omp parallel for schedule(static) if (m >= kParallelRowThreshold)
  for (Eigen::Index i = 0; i < m; ++i) o[i] = row_dot(a + i * n, xp, n);
}

void gemv_minus(const RowMatrix& A, const Vector& x, const Vector& b, Vector& out) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  out.resize(m);
  const double* a = A.data();
  const double* xp = x.data();
  const double* bp = b.data();
  double* o = out.data();
#pragma omp parallel for schedule(static) if (m >= kParallelRowThreshold)
  for (Eigen::Index i = 0; i < m; ++i) o[i] = row_dot(a + i * n, xp, n) - bp[i];
}

double dot(const Vector& x, const Vector& y) {
  const Eigen::Index n = x.size();
  const Eigen::Index nblocks = (n + kDotBlock - 1) / kDotBlock;
  if (nblocks <= 1) return block_sum(x.data(), y.data(), 0, n);
  std::vector<double> partial(static_cast<std::size_t>(nblocks));
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < nblocks; ++b) {
    partial[static_cast<std::size_t>(b)] =
        block_sum(x.data(), y.data(), b * kDotBlock, std::min(n, (b + 1) * kDotBlock));
  }
  double acc = 0.0;
  for (double p : partial) acc += p;
  return acc;
}

namespace serial {

void gemv(const RowMatrix& A, const Vector& x, Vector& out) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  out.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) out[i] = row_dot(A.data() + i * n, x.data(), n);
}

void gemv_minus(const RowMatrix& A, const Vector& x, const Vector& b, Vector& out) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  out.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) out[i] = row_dot(A.data() + i * n, x.data(), n) - b[i];
}

double dot(const Vector& x, const Vector& y) {
  const Eigen::Index n = x.size();
  double acc = 0.0;
  for (Eigen::Index b = 0; b * kDotBlock < n; ++b)
    acc += block_sum(x.data(), y.data(), b * kDotBlock, std::min(n, (b + 1) * kDotBlock));
  return acc;
}

}  // namespace serial
}  // namespace proxcert::kernels
