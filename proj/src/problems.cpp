#include "proxcert/problems.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "proxcert/errors.hpp"

namespace proxcert {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double t, std::string_view what) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw InvalidInput(std::string(what) + " must be a positive finite real");
}

struct Spectrum {
  RowMatrix Q;
  double lipschitz = 0.0;
  double strong_convexity = 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig;
};

// Validates a symmetric PSD matrix and reads L, mu off its eigenvalue extremes.
Spectrum analyze_quadratic(const Matrix& Q, const Vector& b) {
  if (Q.rows() == 0 || Q.rows() != Q.cols())
    throw InvalidInput("Q must be a nonempty square matrix");
  if (Q.rows() != b.size()) throw InvalidInput("dim(Q) must equal dim(b)");
  if (!Q.allFinite()) throw InvalidInput("Q has non-finite entries");
  require_finite(b, "b");

  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidInput("Q is not symmetric");

  Spectrum out;
  const Matrix sym = 0.5 * (Q + Q.transpose());
  out.eig.compute(sym);
  const double lmin = out.eig.eigenvalues()(0);
  const double lmax = out.eig.eigenvalues()(sym.rows() - 1);
  const double tol = 1e-10 * std::max(1.0, std::abs(lmax));
  if (lmin < -tol) throw InvalidInput("Q is indefinite (eigenvalue " + std::to_string(lmin) + ")");
  out.lipschitz = std::max(lmax, 0.0);
  out.strong_convexity = lmin > tol ? std::min(lmin, out.lipschitz) : 0.0;
  out.Q = sym;
  return out;
}

}  // namespace

// --- hashing ----------------------------------------------------------------

void ContentHasher::add_bytes(const unsigned char* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    state_ ^= data[i];
    state_ *= 0x100000001b3ULL;
  }
}

void ContentHasher::add(std::string_view tag) {
  add(static_cast<std::uint64_t>(tag.size()));
  add_bytes(reinterpret_cast<const unsigned char*>(tag.data()), tag.size());
}

void ContentHasher::add(std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffU);
  add_bytes(bytes, 8);
}

void ContentHasher::add(double v) { add(std::bit_cast<std::uint64_t>(v)); }

void ContentHasher::add(const Vector& v) {
  add(static_cast<std::uint64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) add(v[i]);
}

void ContentHasher::add(const RowMatrix& m) {
  add(static_cast<std::uint64_t>(m.rows()));
  add(static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) add(m(i, j));
}

// --- smooth oracles -----------------------------------------------------------

SmoothOracle::SmoothOracle(double lipschitz, double strong_convexity)
    : lipschitz_(lipschitz), strong_convexity_(strong_convexity) {
  if (!std::isfinite(lipschitz) || !std::isfinite(strong_convexity) || strong_convexity < 0.0 ||
      lipschitz < strong_convexity)
    throw InvalidInput("smooth oracle requires L >= mu >= 0");
}

QuadraticSmooth::QuadraticSmooth(RowMatrix Q, Vector b, double lipschitz, double strong_convexity)
    : SmoothOracle(lipschitz, strong_convexity), Q_(std::move(Q)), b_(std::move(b)) {
  if (Q_.rows() != Q_.cols() || Q_.rows() != b_.size())
    throw InvalidInput("quadratic oracle dimensions disagree");
}

double QuadraticSmooth::value(const Vector& x) const {
  Vector Qx;
  kernels::gemv(Q_, x, Qx);
  return 0.5 * kernels::dot(x, Qx) - kernels::dot(b_, x);
}

Vector QuadraticSmooth::gradient(const Vector& x) const {
  Vector g;
  kernels::gemv_minus(Q_, x, b_, g);
  return g;
}

void QuadraticSmooth::hash_into(ContentHasher& h) const {
  h.add("quadratic");
  h.add(Q_);
  h.add(b_);
  h.add(lipschitz());
  h.add(strong_convexity());
}

LeastSquaresSmooth::LeastSquaresSmooth(RowMatrix A, Vector b, double lipschitz,
                                       double strong_convexity)
    : SmoothOracle(lipschitz, strong_convexity),
      A_(std::move(A)),
      At_(A_.transpose()),
      b_(std::move(b)) {
  if (A_.rows() != b_.size()) throw InvalidInput("rows(A) must equal dim(b)");
}

double LeastSquaresSmooth::value(const Vector& x) const {
  Vector r;
  kernels::gemv_minus(A_, x, b_, r);
  return 0.5 * kernels::dot(r, r);
}

Vector LeastSquaresSmooth::gradient(const Vector& x) const {
  Vector r;
  kernels::gemv_minus(A_, x, b_, r);
  Vector g;
  kernels::gemv(At_, r, g);
  return g;
}

void LeastSquaresSmooth::hash_into(ContentHasher& h) const {
  h.add("least_squares");
  h.add(A_);
  h.add(b_);
  h.add(lipschitz());
  h.add(strong_convexity());
}

// --- prox oracles -------------------------------------------------------------

Vector ZeroProx::prox(const Vector& v, double t) const { return prox_zero(v, t); }

void ZeroProx::hash_into(ContentHasher& h) const { h.add("zero"); }

L1Prox::L1Prox(double lam) : lam_(lam) {
  if (!(lam > 0.0) || !std::isfinite(lam)) throw InvalidInput("lam must be positive");
}

double L1Prox::value(const Vector& x) const { return lam_ * x.lpNorm<1>(); }

Vector L1Prox::prox(const Vector& v, double t) const {
  require_positive(t, "prox parameter t");
  return prox_l1(v, lam_ * t);
}

void L1Prox::hash_into(ContentHasher& h) const {
  h.add("l1");
  h.add(lam_);
}

BoxProx::BoxProx(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw InvalidInput("box bounds have different dimensions");
  for (Eigen::Index i = 0; i < lo_.size(); ++i)
    if (lo_[i] > hi_[i]) throw InvalidInput("box bound lo > hi at coordinate " + std::to_string(i));
}

double BoxProx::value(const Vector& x) const {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] < lo_[i] || x[i] > hi_[i]) return kInf;
  return 0.0;
}

Vector BoxProx::prox(const Vector& v, double /*t*/) const { return prox_box(v, lo_, hi_); }

void BoxProx::hash_into(ContentHasher& h) const {
  h.add("box");
  h.add(lo_);
  h.add(hi_);
}

SquaredL2Prox::SquaredL2Prox(double c) : c_(c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("squared-l2 weight must be positive");
}

double SquaredL2Prox::value(const Vector& x) const { return 0.5 * c_ * x.squaredNorm(); }

Vector SquaredL2Prox::prox(const Vector& v, double t) const {
  require_positive(t, "prox parameter t");
  return v / (1.0 + t * c_);
}

void SquaredL2Prox::hash_into(ContentHasher& h) const {
  h.add("squared_l2");
  h.add(c_);
}

Vector prox_l1(const Vector& v, double t) {
  require_positive(t, "prox parameter t");
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out[i] = std::copysign(std::max(std::abs(v[i]) - t, 0.0), v[i]);
  return out;
}

Vector prox_box(const Vector& v, const Vector& lo, const Vector& hi) {
  if (v.size() != lo.size() || v.size() != hi.size())
    throw InvalidInput("prox_box dimensions disagree");
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (lo[i] > hi[i]) throw InvalidInput("box bound lo > hi at coordinate " + std::to_string(i));
    out[i] = std::clamp(v[i], lo[i], hi[i]);
  }
  return out;
}

Vector prox_zero(const Vector& v, double t) {
  require_positive(t, "prox parameter t");
  return v;
}

// --- composite problem ----------------------------------------------------------

void require_finite(const Vector& v, std::string_view what) {
  if (!v.allFinite()) throw InvalidInput(std::string(what) + " has non-finite coordinates");
}

CompositeProblem::CompositeProblem(std::shared_ptr<const SmoothOracle> smooth,
                                   std::shared_ptr<const ProxOracle> nonsmooth,
                                   std::optional<Vector> known_minimizer,
                                   std::optional<double> known_optimum)
    : smooth_(std::move(smooth)),
      nonsmooth_(std::move(nonsmooth)),
      known_minimizer_(std::move(known_minimizer)),
      known_optimum_(known_optimum) {
  if (!smooth_ || !nonsmooth_) throw InvalidInput("problem needs both oracles");
  if (smooth_->dim() < 1) throw InvalidInput("problem dimension must be positive");

  if (known_minimizer_) {
    const Vector& xs = *known_minimizer_;
    if (xs.size() != dim()) throw InvalidInput("known minimizer has the wrong dimension");
    require_finite(xs, "known minimizer");
    const double s = lipschitz() > 0.0 ? 1.0 / (2.0 * lipschitz()) : 1.0;
    const Vector z = nonsmooth_->prox(xs - s * smooth_->gradient(xs), s);
    const double residual = (xs - z).norm() / s;
    if (residual > 1e-8 * (1.0 + xs.norm()))
      throw InvalidInput("known minimizer is not stationary (gradient mapping norm " +
                         std::to_string(residual) + ")");
  }
  if (known_optimum_) {
    if (!std::isfinite(*known_optimum_)) throw InvalidInput("known optimum must be finite");
    if (known_minimizer_) {
      const double fx = objective(*known_minimizer_);
      if (std::abs(fx - *known_optimum_) > 1e-10 * (1.0 + std::abs(*known_optimum_)))
        throw InvalidInput("known optimum disagrees with F(known minimizer)");
    }
  }

  ContentHasher h;
  h.add("composite");
  smooth_->hash_into(h);
  nonsmooth_->hash_into(h);
  hash_ = h.digest();
}

double CompositeProblem::objective(const Vector& x) const {
  const double gx = nonsmooth_->value(x);
  if (gx == kInf) return kInf;
  return smooth_->value(x) + gx;
}

CompositeProblem CompositeProblem::with_reference(Vector x_star, double f_star) const {
  return CompositeProblem(smooth_, nonsmooth_, std::move(x_star), f_star);
}

// --- constructors ---------------------------------------------------------------

CompositeProblem quadratic_problem(const Matrix& Q, const Vector& b) {
  Spectrum sp = analyze_quadratic(Q, b);
  auto smooth = std::make_shared<QuadraticSmooth>(sp.Q, b, sp.lipschitz, sp.strong_convexity);
  auto zero = std::make_shared<ZeroProx>();

  std::optional<Vector> x_star;
  if (sp.strong_convexity > 0.0) {
    const Matrix Qc = sp.Q;
    Eigen::LLT<Matrix> llt(Qc);
    Vector x = llt.solve(b);
    // One step of iterative refinement.
    x += llt.solve(b - Qc * x);
    x_star = std::move(x);
  } else {
    // Semidefinite: minimum-norm stationary point, when b lies in range(Q).
    const auto& lam = sp.eig.eigenvalues();
    const Matrix& V = sp.eig.eigenvectors();
    const double tol = 1e-10 * std::max(1.0, sp.lipschitz);
    Vector coeff = V.transpose() * b;
    for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff[i] = lam[i] > tol ? coeff[i] / lam[i] : 0.0;
    Vector x = V * coeff;
    if ((sp.Q * x - b).norm() <= 1e-10 * (1.0 + b.norm())) x_star = std::move(x);
  }

  if (!x_star) return CompositeProblem(smooth, zero);
  const double f_star = smooth->value(*x_star);
  return CompositeProblem(smooth, zero, std::move(x_star), f_star);
}

CompositeProblem box_quadratic_problem(const Matrix& Q, const Vector& b, const Vector& lo,
                                       const Vector& hi) {
  Spectrum sp = analyze_quadratic(Q, b);
  if (lo.size() != b.size() || hi.size() != b.size())
    throw InvalidInput("box bounds must match dim(b)");
  auto smooth = std::make_shared<QuadraticSmooth>(sp.Q, b, sp.lipschitz, sp.strong_convexity);
  return CompositeProblem(smooth, std::make_shared<BoxProx>(lo, hi));
}

double power_iteration_gram(const RowMatrix& A) {
  const Eigen::Index n = A.cols();
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53 + 0.5;
  v.normalize();

  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    const Vector w = A.transpose() * (A * v);
    const double next = v.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    const bool done = it > 0 && std::abs(next - lambda) <= 1e-10 * std::abs(next);
    lambda = next;
    if (done) break;
  }
  return lambda;
}

CompositeProblem lasso_problem(const Matrix& A, const Vector& b, double lam) {
  if (!(lam > 0.0) || !std::isfinite(lam)) throw InvalidInput("lam must be positive");
  if (A.rows() == 0 || A.cols() == 0) throw InvalidInput("A must be nonempty");
  if (A.rows() != b.size()) throw InvalidInput("rows(A) must equal dim(b)");
  if (!A.allFinite()) throw InvalidInput("A has non-finite entries");
  require_finite(b, "b");

  RowMatrix Ar = A;
  double lipschitz = power_iteration_gram(Ar);
  double mu = 0.0;
  if (A.cols() <= A.rows()) {
    const Matrix gram = A.transpose() * A;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues()(0);
    const double lmax = eig.eigenvalues()(gram.rows() - 1);
    // Power iteration approaches lambda_max from below; keep the larger value.
    lipschitz = std::max(lipschitz, lmax);
    mu = lmin > 1e-10 * lipschitz ? std::min(lmin, lipschitz) : 0.0;
  }
  auto smooth = std::make_shared<LeastSquaresSmooth>(std::move(Ar), b, lipschitz, mu);
  return CompositeProblem(smooth, std::make_shared<L1Prox>(lam));
}

double finite_difference_gradient_check(const SmoothOracle& oracle, const Vector& x, double h) {
  require_positive(h, "finite-difference step h");
  require_finite(x, "x");
  const Vector g = oracle.gradient(x);
  double worst = 0.0;
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = oracle.value(probe);
    probe[i] = x[i] - h;
    const double fm = oracle.value(probe);
    probe[i] = x[i];
    const double fd = (fp - fm) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / (1.0 + std::abs(g[i])));
  }
  return worst;
}

}  // namespace proxcert
