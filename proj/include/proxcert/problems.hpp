#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "proxcert/kernels.hpp"

namespace proxcert {

/// FNV-1a (64 bit) over a canonical little-endian byte stream.
class ContentHasher {
 public:
  void add_bytes(const unsigned char* data, std::size_t n);
  void add(std::string_view tag);
  void add(std::uint64_t v);
  void add(double v);
  void add(const Vector& v);
  void add(const RowMatrix& m);
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

/// Convex, L-smooth f with declared constants. mu = 0 means "not strongly
/// convex, or unknown".
class SmoothOracle {
 public:
  virtual ~SmoothOracle() = default;

  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual void hash_into(ContentHasher& h) const = 0;

  double lipschitz() const { return lipschitz_; }
  double strong_convexity() const { return strong_convexity_; }

 protected:
  SmoothOracle(double lipschitz, double strong_convexity);

 private:
  double lipschitz_;
  double strong_convexity_;
};

/// f(x) = 1/2 x'Qx - b'x
class QuadraticSmooth final : public SmoothOracle {
 public:
  QuadraticSmooth(RowMatrix Q, Vector b, double lipschitz, double strong_convexity);

  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Eigen::Index dim() const override { return b_.size(); }
  void hash_into(ContentHasher& h) const override;

  const RowMatrix& Q() const { return Q_; }
  const Vector& b() const { return b_; }

 private:
  RowMatrix Q_;
  Vector b_;
};

/// f(x) = 1/2 ||Ax - b||^2
class LeastSquaresSmooth final : public SmoothOracle {
 public:
  LeastSquaresSmooth(RowMatrix A, Vector b, double lipschitz, double strong_convexity);

  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Eigen::Index dim() const override { return A_.cols(); }
  void hash_into(ContentHasher& h) const override;

  const RowMatrix& A() const { return A_; }
  const Vector& b() const { return b_; }

 private:
  RowMatrix A_;
  RowMatrix At_;
  Vector b_;
};

/// Proper, closed, convex g with a computable prox. value() returns +inf
/// outside the effective domain.
class ProxOracle {
 public:
  virtual ~ProxOracle() = default;

  virtual double value(const Vector& x) const = 0;
  /// argmin_u g(u) + ||u - v||^2 / (2t)
  virtual Vector prox(const Vector& v, double t) const = 0;
  virtual std::string name() const = 0;
  virtual void hash_into(ContentHasher& h) const = 0;
};

class ZeroProx final : public ProxOracle {
 public:
  double value(const Vector&) const override { return 0.0; }
  Vector prox(const Vector& v, double t) const override;
  std::string name() const override { return "zero"; }
  void hash_into(ContentHasher& h) const override;
};

/// g(x) = lam ||x||_1
class L1Prox final : public ProxOracle {
 public:
  explicit L1Prox(double lam);
  double value(const Vector& x) const override;
  Vector prox(const Vector& v, double t) const override;
  std::string name() const override { return "l1"; }
  void hash_into(ContentHasher& h) const override;
  double lam() const { return lam_; }

 private:
  double lam_;
};

/// Indicator of the box [lo, hi].
class BoxProx final : public ProxOracle {
 public:
  BoxProx(Vector lo, Vector hi);
  double value(const Vector& x) const override;
  Vector prox(const Vector& v, double t) const override;
  std::string name() const override { return "box"; }
  void hash_into(ContentHasher& h) const override;
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }

 private:
  Vector lo_;
  Vector hi_;
};

/// g(x) = (c/2) ||x||^2
class SquaredL2Prox final : public ProxOracle {
 public:
  explicit SquaredL2Prox(double c);
  double value(const Vector& x) const override;
  Vector prox(const Vector& v, double t) const override;
  std::string name() const override { return "squared_l2"; }
  void hash_into(ContentHasher& h) const override;

 private:
  double c_;
};

/// F = f + g over R^dim, optionally carrying a known minimizer and optimum.
/// Immutable once built; safe to share between concurrent runs.
class CompositeProblem {
 public:
  CompositeProblem(std::shared_ptr<const SmoothOracle> smooth,
                   std::shared_ptr<const ProxOracle> nonsmooth,
                   std::optional<Vector> known_minimizer = std::nullopt,
                   std::optional<double> known_optimum = std::nullopt);

  const SmoothOracle& smooth() const { return *smooth_; }
  const ProxOracle& nonsmooth() const { return *nonsmooth_; }
  std::shared_ptr<const SmoothOracle> smooth_ptr() const { return smooth_; }
  std::shared_ptr<const ProxOracle> nonsmooth_ptr() const { return nonsmooth_; }

  Eigen::Index dim() const { return smooth_->dim(); }
  double lipschitz() const { return smooth_->lipschitz(); }
  double strong_convexity() const { return smooth_->strong_convexity(); }

  /// F(x) = f(x) + g(x); +inf outside dom g.
  double objective(const Vector& x) const;

  const std::optional<Vector>& known_minimizer() const { return known_minimizer_; }
  const std::optional<double>& known_optimum() const { return known_optimum_; }

  /// Hash of the defining data (oracle kinds, matrices, vectors, constants).
  std::uint64_t content_hash() const { return hash_; }

  /// Copy with the given reference attached; the invariants are re-checked.
  CompositeProblem with_reference(Vector x_star, double f_star) const;

 private:
  std::shared_ptr<const SmoothOracle> smooth_;
  std::shared_ptr<const ProxOracle> nonsmooth_;
  std::optional<Vector> known_minimizer_;
  std::optional<double> known_optimum_;
  std::uint64_t hash_ = 0;
};

/// Throws InvalidInput unless every coordinate is finite.
void require_finite(const Vector& v, std::string_view what);

// --- constructors ---------------------------------------------------------

/// f = 1/2 x'Qx - b'x, g = 0. L and mu are the eigenvalue extremes of Q.
CompositeProblem quadratic_problem(const Matrix& Q, const Vector& b);

/// Same smooth part restricted to the box [lo, hi].
CompositeProblem box_quadratic_problem(const Matrix& Q, const Vector& b, const Vector& lo,
                                       const Vector& hi);

/// f = 1/2 ||Ax - b||^2, g = lam ||x||_1.
CompositeProblem lasso_problem(const Matrix& A, const Vector& b, double lam);

// --- prox operators -------------------------------------------------------

Vector prox_l1(const Vector& v, double t);
Vector prox_box(const Vector& v, const Vector& lo, const Vector& hi);
Vector prox_zero(const Vector& v, double t);

/// Largest eigenvalue of A'A by power iteration (relative tolerance 1e-10,
/// at most 10000 iterations).
double power_iteration_gram(const RowMatrix& A);

/// max_i |fd_i - grad_i| / (1 + |grad_i|) with central differences of step h.
double finite_difference_gradient_check(const SmoothOracle& oracle, const Vector& x, double h);

}  // namespace proxcert
