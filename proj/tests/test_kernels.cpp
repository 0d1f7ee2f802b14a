#include <doctest.h>

#include <cstring>

#include "proxcert/harness.hpp"
#include "proxcert/kernels.hpp"

using namespace proxcert;

namespace {

bool bitwise_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

TEST_CASE("gemv matches hand values") {
  RowMatrix A(2, 3);
  A << 1, 2, 3, 4, 5, 6;
  Vector x(3);
  x << 1, -1, 2;
  Vector out;
  kernels::gemv(A, x, out);
  CHECK(out[0] == 5.0);
  CHECK(out[1] == 11.0);
  Vector b(2);
  b << 5, 1;
  kernels::gemv_minus(A, x, b, out);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 10.0);
}

TEST_CASE("dot matches hand value") {
  Vector x(3), y(3);
  x << 1, 2, 3;
  y << 4, -5, 6;
  CHECK(kernels::dot(x, y) == 12.0);
  CHECK(kernels::serial::dot(x, y) == 12.0);
}

TEST_CASE("parallel kernels are bitwise identical to the serial reference") {
  Rng rng(11);
  for (Eigen::Index m : {1, 7, 255, 256, 300, 1025}) {
    for (Eigen::Index n : {1, 13, 200}) {
      const RowMatrix A = rng.normal_matrix(m, n);
      const Vector x = rng.normal_vector(n);
      const Vector b = rng.normal_vector(m);
      Vector p, s;
      kernels::gemv(A, x, p);
      kernels::serial::gemv(A, x, s);
      CHECK(bitwise_equal(p, s));
      kernels::gemv_minus(A, x, b, p);
      kernels::serial::gemv_minus(A, x, b, s);
      CHECK(bitwise_equal(p, s));
    }
  }
  for (Eigen::Index n : {0, 1, 1023, 1024, 1025, 5000}) {
    const Vector x = rng.normal_vector(n);
    const Vector y = rng.normal_vector(n);
    const double p = kernels::dot(x, y);
    const double s = kernels::serial::dot(x, y);
    CHECK(std::memcmp(&p, &s, sizeof p) == 0);
    CHECK(p == doctest::Approx(x.dot(y)).epsilon(1e-12));
  }
}

TEST_CASE("gemv agrees with Eigen's product") {
  Rng rng(3);
  const RowMatrix A = rng.normal_matrix(40, 17);
  const Vector x = rng.normal_vector(17);
  Vector out;
  kernels::gemv(A, x, out);
  CHECK((out - A * x).norm() <= 1e-12 * (1.0 + (A * x).norm()));
}
