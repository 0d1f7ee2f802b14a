#pragma once

#include <Eigen/Dense>

namespace proxcert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Row-major storage so each output entry of a matrix-vector product reads one
// contiguous row.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace kernels {

// Dense kernels used on every oracle evaluation. The OpenMP versions and the
// serial reference versions perform the same floating-point operations in the
// same order, so their outputs are bitwise identical regardless of thread
// count. Tests rely on that.

/// Rows at or above this count are split across threads.
inline constexpr Eigen::Index kParallelRowThreshold = 256;

/// Fixed reduction block for dot(); independent of the thread count.
inline constexpr Eigen::Index kDotBlock = 1024;

/// out = A * x
void gemv(const RowMatrix& A, const Vector& x, Vector& out);

/// out = A * x - b
void gemv_minus(const RowMatrix& A, const Vector& x, const Vector& b, Vector& out);

/// Blocked dot product; block partial sums are combined in block order.
double dot(const Vector& x, const Vector& y);

namespace serial {

void gemv(const RowMatrix& A, const Vector& x, Vector& out);
void gemv_minus(const RowMatrix& A, const Vector& x, const Vector& b, Vector& out);
double dot(const Vector& x, const Vector& y);

}  // namespace serial
}  // namespace kernels
}  // namespace proxcert
