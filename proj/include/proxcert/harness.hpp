#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "proxcert/certificates.hpp"
#include "proxcert/problems.hpp"
#include "proxcert/solvers.hpp"

namespace proxcert {

/// Reproducible source of randomness for problem generators.
///
/// The bit stream is std::mt19937_64 (64-bit Mersenne Twister, whose output
/// sequence is fixed by the C++ standard). Uniforms take the top 53 bits;
/// normals use the Box-Muller transform and consume two uniforms each.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform on [0, 1).
  double uniform();
  /// Standard normal.
  double normal();
  Vector normal_vector(Eigen::Index n);
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);
  /// Haar-like orthogonal matrix from the QR factorization of a Gaussian matrix.
  Matrix orthogonal(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to derive per-instance seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

enum class ProblemKind { quadratic, lasso, box_quadratic };

std::string_view to_string(ProblemKind k);
std::optional<ProblemKind> parse_problem_kind(std::string_view name);

/// Parameters of a generated instance.
///  quadratic:     dim x dim, eigenvalues geometric in [1/cond, 1], b = Q x_true with ||x_true|| = 1
///  lasso:         rows x dim; rows >= dim gives singular values^2 in [1/cond, 1],
///                 rows < dim a Gaussian fat matrix (mu = 0); g = lam ||x||_1
///  box_quadratic: the quadratic above restricted to [-1/2, 1/2]^dim with an
///                 unconstrained minimizer partly outside the box
struct ProblemSpec {
  ProblemKind kind = ProblemKind::quadratic;
  Eigen::Index dim = 20;
  Eigen::Index rows = 0;  // lasso only; 0 means square
  double cond = 10.0;
  double lam = 0.1;
  std::uint64_t seed = 1;

  std::string label() const;
};

CompositeProblem make_problem(const ProblemSpec& spec);

struct SuiteEntry {
  ProblemSpec spec;
  CompositeProblem problem;
};

/// Quadratics (cond in {1, 10, 100, 1000} x dim in {2, 20, 200}), lasso with
/// square full-rank and fat matrices, and box-constrained quadratics.
std::vector<ProblemSpec> suite_specs(std::uint64_t seed);
std::vector<SuiteEntry> generate_suite(std::uint64_t seed);

enum class ReferenceMethod { closed_form, long_run };

struct ReferenceSolution {
  Vector x_star;
  double f_star = 0.0;
  ReferenceMethod method = ReferenceMethod::closed_form;
  double residual = 0.0;  // ||G_s(x*)|| at s = 1/(2L)
  std::size_t iterations = 0;
  std::uint64_t problem_hash = 0;
};

/// Residual threshold 1e-12 (1 + ||x*||).
inline constexpr double kReferenceResidualRel = 1e-12;

/// Closed form when the problem already carries its minimizer (strongly
/// convex quadratics); otherwise a monotone accelerated run with alpha = 3,
/// s = 1/(2L) until the residual criterion holds. Throws ReferenceUnavailable
/// when the budget runs out first.
ReferenceSolution reference_solution(const CompositeProblem& problem, std::size_t budget = 200000);

/// The problem with x*, F* attached. Throws InvalidInput when the reference
/// was computed for a different problem.
CompositeProblem with_reference(const CompositeProblem& problem, const ReferenceSolution& ref);

struct FitWindow {
  std::size_t begin = 0;  // inclusive
  std::size_t end = 0;    // exclusive
  std::size_t size() const { return end > begin ? end - begin : 0; }
};

struct RateFit {
  double rho_hat = 0.0;  // gap_k ~ C (1 + rho_hat)^{-k}
  FitWindow window;
  double r_squared = 0.0;
  bool endpoint = false;  // two-point estimate instead of a regression
};

inline constexpr std::size_t kMinFitWindow = 50;

/// Least-squares line through (k, log gap_k) for k in the window. The window
/// is cut at the first nonpositive gap; fewer than kMinFitWindow usable points
/// throws FitUnavailable.
RateFit fit_linear_rate(const std::vector<double>& gaps, FitWindow window);

/// Last 60% of the prefix of gaps that stay above the rounding floor
/// 1e-12 (1 + |F*|) max(k, 1).
FitWindow default_fit_window(const std::vector<double>& gaps, double f_star);

/// fit_linear_rate over default_fit_window.
RateFit fit_gaps(const std::vector<double>& gaps, double f_star);

/// Two-point rate (gap_b / gap_{e-1})^{1/(e-1-b)} - 1 over the window cut at
/// the first nonpositive gap. Needs at least two usable points.
RateFit endpoint_rate(const std::vector<double>& gaps, FitWindow window);

/// fit_gaps when the window is long enough; otherwise endpoint_rate over the
/// whole usable prefix (fast-converging runs reach the rounding floor early).
RateFit empirical_rate(const std::vector<double>& gaps, double f_star);

/// Gap column of a trace (requires gaps to be recorded).
std::vector<double> gap_sequence(const Trace& trace);

/// First k with gap_k <= tol, if any.
std::optional<std::size_t> first_crossing(const std::vector<double>& gaps, double tol);

struct ComparisonTable {
  std::vector<std::string> labels;
  std::vector<SolverConfig> configs;
  std::vector<std::vector<double>> gaps;  // per solver, indexed by k
  std::vector<std::optional<RateFit>> fits;
  double f_star = 0.0;
  double rho_lower_bound = 0.0;  // alpha = 3 and s = 1/(2L) unless a mapm config says otherwise
  double sqrt_mu_over_l = 0.0;

  std::size_t rows() const;
};

/// One run per config (runs execute concurrently); gaps are measured against
/// the problem's reference, computed if the problem does not carry one.
ComparisonTable compare_solvers(const CompositeProblem& problem,
                                const std::vector<SolverConfig>& configs, const Vector& x0);

}  // namespace proxcert
