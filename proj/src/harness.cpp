#include "proxcert/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <exception>
#include <numbers>
#include <sstream>

#include "proxcert/errors.hpp"

namespace proxcert {

// --- randomness ---------------------------------------------------------------------

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  // 1 - u keeps the argument of log in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector Rng::normal_vector(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
  return v;
}

Matrix Rng::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
  return m;
}

Matrix Rng::orthogonal(Eigen::Index n) {
  const Matrix g = normal_matrix(n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// --- generators -----------------------------------------------------------------------

std::string_view to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::quadratic: return "quadratic";
    case ProblemKind::lasso: return "lasso";
    case ProblemKind::box_quadratic: return "box-quadratic";
  }
  return "unknown";
}

std::optional<ProblemKind> parse_problem_kind(std::string_view name) {
  if (name == "quadratic") return ProblemKind::quadratic;
  if (name == "lasso") return ProblemKind::lasso;
  if (name == "box-quadratic" || name == "box_quadratic") return ProblemKind::box_quadratic;
  return std::nullopt;
}

std::string ProblemSpec::label() const {
  std::ostringstream os;
  os << to_string(kind) << "(dim=" << dim;
  if (kind == ProblemKind::lasso) os << ",rows=" << (rows == 0 ? dim : rows) << ",lam=" << lam;
  if (kind != ProblemKind::lasso || rows == 0 || rows >= dim) os << ",cond=" << cond;
  os << ",seed=" << seed << ")";
  return os.str();
}

namespace {

// Geometric spectrum from 1 down to 1/cond.
Vector geometric_spectrum(Eigen::Index n, double cond) {
  Vector lam(n);
  for (Eigen::Index i = 0; i < n; ++i)
    lam[i] = n == 1 ? 1.0 : std::pow(cond, -static_cast<double>(i) / static_cast<double>(n - 1));
  return lam;
}

Matrix spectral_quadratic(Rng& rng, Eigen::Index n, double cond) {
  if (cond == 1.0) return Matrix::Identity(n, n);
  const Matrix U = rng.orthogonal(n);
  Matrix Q = U * geometric_spectrum(n, cond).asDiagonal() * U.transpose();
  return 0.5 * (Q + Q.transpose());
}

void check_spec(const ProblemSpec& spec) {
  if (spec.dim < 1) throw InvalidInput("dim must be >= 1");
  if (spec.dim > 2000) throw InvalidInput("dim above 2000 is outside the dense desk-scale range");
  if (spec.rows < 0 || spec.rows > 2000) throw InvalidInput("rows must be in [0, 2000]");
  if (!(spec.cond >= 1.0) || !std::isfinite(spec.cond)) throw InvalidInput("cond must be >= 1");
}

}  // namespace

CompositeProblem make_problem(const ProblemSpec& spec) {
  check_spec(spec);
  Rng rng(spec.seed);
  const Eigen::Index n = spec.dim;
  switch (spec.kind) {
    case ProblemKind::quadratic: {
      const Matrix Q = spectral_quadratic(rng, n, spec.cond);
      Vector x_true = rng.normal_vector(n);
      x_true /= x_true.norm();
      return quadratic_problem(Q, Q * x_true);
    }
    case ProblemKind::box_quadratic: {
      const Matrix Q = spectral_quadratic(rng, n, spec.cond);
      const Vector x_true = rng.normal_vector(n);
      return box_quadratic_problem(Q, Q * x_true, Vector::Constant(n, -0.5),
                                   Vector::Constant(n, 0.5));
    }
    case ProblemKind::lasso: {
      const Eigen::Index m = spec.rows == 0 ? n : spec.rows;
      Matrix A;
      if (m >= n) {
        const Matrix U = rng.orthogonal(m);
        const Matrix V = rng.orthogonal(n);
        const Vector sv = geometric_spectrum(n, spec.cond).cwiseSqrt();
        A = U.leftCols(n) * sv.asDiagonal() * V.transpose();
      } else {
        A = rng.normal_matrix(m, n) / std::sqrt(static_cast<double>(m));
      }
      Vector x_true = Vector::Zero(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const bool active = rng.uniform() < 0.2;
        const double v = rng.normal();
        if (active) x_true[i] = v;
      }
      const Vector b = A * x_true + 0.05 * rng.normal_vector(m);
      return lasso_problem(A, b, spec.lam);
    }
  }
  throw InvalidInput("unknown problem kind");
}

std::vector<ProblemSpec> suite_specs(std::uint64_t seed) {
  std::vector<ProblemSpec> specs;
  auto push = [&](ProblemSpec s) {
    s.seed = mix_seed(seed, specs.size());
    specs.push_back(s);
  };
  for (double cond : {1.0, 10.0, 100.0, 1000.0})
    for (Eigen::Index dim : {2, 20, 200})
      push({ProblemKind::quadratic, dim, 0, cond, 0.1, 0});
  // Square full-rank lasso (mu > 0).
  push({ProblemKind::lasso, 10, 10, 10.0, 0.1, 0});
  push({ProblemKind::lasso, 50, 50, 100.0, 0.1, 0});
  // Fat lasso (mu = 0).
  push({ProblemKind::lasso, 30, 10, 1.0, 0.1, 0});
  push({ProblemKind::lasso, 40, 20, 1.0, 0.1, 0});
  push({ProblemKind::lasso, 100, 50, 1.0, 0.1, 0});
  for (double cond : {10.0, 100.0})
    for (Eigen::Index dim : {5, 50})
      push({ProblemKind::box_quadratic, dim, 0, cond, 0.1, 0});
  return specs;
}

std::vector<SuiteEntry> generate_suite(std::uint64_t seed) {
  std::vector<SuiteEntry> out;
  for (const ProblemSpec& s : suite_specs(seed)) out.push_back({s, make_problem(s)});
  return out;
}

// --- reference solutions ------------------------------------------------------------

ReferenceSolution reference_solution(const CompositeProblem& problem, std::size_t budget) {
  if (budget < 1000) throw ConfigError("reference budget must be at least 1000 iterations");
  const double s = half_inverse_step(problem);
  auto residual_at = [&](const Vector& x) { return gradient_mapping(problem, s, x).G.norm(); };
  auto threshold = [](const Vector& x) { return kReferenceResidualRel * (1.0 + x.norm()); };

  ReferenceSolution ref;
  ref.problem_hash = problem.content_hash();

  Vector start = Vector::Zero(problem.dim());
  if (problem.known_minimizer() && problem.known_optimum()) {
    const Vector& xs = *problem.known_minimizer();
    const double res = residual_at(xs);
    if (res <= threshold(xs)) {
      ref.x_star = xs;
      ref.f_star = *problem.known_optimum();
      ref.method = ReferenceMethod::closed_form;
      ref.residual = res;
      return ref;
    }
    start = xs;
  }

  SolverConfig cfg;
  cfg.variant = Variant::mapm;
  cfg.alpha = 3.0;
  cfg.step = s;
  SolverState state = initial_state(problem, start);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it <= budget; ++it) {
    if (it % 10 == 0 || it == budget) {
      const double res = residual_at(state.y);
      best = std::min(best, res);
      if (res <= threshold(state.y)) {
        ref.x_star = state.y;
        ref.f_star = state.f_y;
        ref.method = ReferenceMethod::long_run;
        ref.residual = res;
        ref.iterations = it;
        return ref;
      }
    }
    if (it == budget) break;
    state = advance(problem, cfg, state, gradient_mapping(problem, s, state.x));
  }
  std::ostringstream os;
  os << "reference solution unavailable: residual " << best << " after " << budget
     << " iterations";
  throw ReferenceUnavailable(os.str());
}

CompositeProblem with_reference(const CompositeProblem& problem, const ReferenceSolution& ref) {
  if (ref.problem_hash != problem.content_hash())
    throw InvalidInput("reference solution belongs to a different problem");
  return problem.with_reference(ref.x_star, ref.f_star);
}

// --- rate fitting -------------------------------------------------------------------

RateFit fit_linear_rate(const std::vector<double>& gaps, FitWindow window) {
  window.end = std::min(window.end, gaps.size());
  std::size_t end = window.begin;
  while (end < window.end && gaps[end] > 0.0 && std::isfinite(gaps[end])) ++end;
  window.end = std::max(end, window.begin);
  const std::size_t n = window.size();
  if (n < kMinFitWindow)
    throw FitUnavailable("rate fit needs " + std::to_string(kMinFitWindow) +
                         " positive gaps, window has " + std::to_string(n));

  double mk = 0.0;
  double ml = 0.0;
  for (std::size_t k = window.begin; k < window.end; ++k) {
    mk += static_cast<double>(k);
    ml += std::log(gaps[k]);
  }
  mk /= static_cast<double>(n);
  ml /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t k = window.begin; k < window.end; ++k) {
    const double dx = static_cast<double>(k) - mk;
    const double dy = std::log(gaps[k]) - ml;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  RateFit fit;
  fit.window = window;
  fit.rho_hat = std::exp(-slope) - 1.0;
  fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return fit;
}

FitWindow default_fit_window(const std::vector<double>& gaps, double f_star) {
  std::size_t usable = 0;
  while (usable < gaps.size()) {
    const double floor =
        1e-12 * (1.0 + std::abs(f_star)) * static_cast<double>(std::max<std::size_t>(usable, 1));
    if (!(gaps[usable] > floor) || !std::isfinite(gaps[usable])) break;
    ++usable;
  }
  const std::size_t width = (6 * usable + 9) / 10;
  return {usable - width, usable};
}

RateFit fit_gaps(const std::vector<double>& gaps, double f_star) {
  return fit_linear_rate(gaps, default_fit_window(gaps, f_star));
}

RateFit endpoint_rate(const std::vector<double>& gaps, FitWindow window) {
  window.end = std::min(window.end, gaps.size());
  std::size_t end = window.begin;
  while (end < window.end && gaps[end] > 0.0 && std::isfinite(gaps[end])) ++end;
  window.end = std::max(end, window.begin);
  if (window.size() < 2)
    throw FitUnavailable("endpoint rate needs two positive gaps, window has " +
                         std::to_string(window.size()));
  const double steps = static_cast<double>(window.size() - 1);
  RateFit fit;
  fit.window = window;
  fit.rho_hat = std::exp((std::log(gaps[window.begin]) - std::log(gaps[window.end - 1])) / steps) - 1.0;
  fit.r_squared = std::numeric_limits<double>::quiet_NaN();
  fit.endpoint = true;
  return fit;
}

RateFit empirical_rate(const std::vector<double>& gaps, double f_star) {
  const FitWindow window = default_fit_window(gaps, f_star);
  if (window.size() >= kMinFitWindow) return fit_linear_rate(gaps, window);
  return endpoint_rate(gaps, {0, window.end});
}

std::vector<double> gap_sequence(const Trace& trace) {
  std::vector<double> gaps;
  gaps.reserve(trace.records.size());
  for (const IterationRecord& r : trace.records) {
    if (!r.gap) throw InvalidInput("trace has no gap column (no reference optimum)");
    gaps.push_back(*r.gap);
  }
  return gaps;
}

std::optional<std::size_t> first_crossing(const std::vector<double>& gaps, double tol) {
  for (std::size_t k = 0; k < gaps.size(); ++k)
    if (gaps[k] <= tol) return k;
  return std::nullopt;
}

// --- comparisons --------------------------------------------------------------------

std::size_t ComparisonTable::rows() const {
  std::size_t n = 0;
  for (const auto& g : gaps) n = std::max(n, g.size());
  return n;
}

ComparisonTable compare_solvers(const CompositeProblem& problem,
                                const std::vector<SolverConfig>& configs, const Vector& x0) {
  if (configs.empty()) throw ConfigError("compare_solvers needs at least one config");
  for (const SolverConfig& c : configs) validate_config(problem, c);

  CompositeProblem bound = problem;
  if (!problem.known_minimizer() || !problem.known_optimum())
    bound = with_reference(problem, reference_solution(problem));

  ComparisonTable table;
  table.configs = configs;
  table.f_star = *bound.known_optimum();
  const std::size_t n = configs.size();
  std::vector<Trace> traces(n);
  std::vector<std::exception_ptr> errors(n);

#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      SolverConfig cfg = configs[i];
      cfg.record_certificates = false;
      cfg.record_iterates = false;
      traces[i] = run(bound, cfg, x0);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t i = 0; i < n; ++i) {
    std::string label(to_string(configs[i].variant));
    const auto clash = std::count_if(configs.begin(), configs.begin() + static_cast<long>(i),
                                     [&](const SolverConfig& c) { return c.variant == configs[i].variant; });
    if (clash > 0) label += "_" + std::to_string(clash + 1);
    table.labels.push_back(label);
    table.gaps.push_back(gap_sequence(traces[i]));
    try {
      table.fits.emplace_back(empirical_rate(table.gaps.back(), table.f_star));
    } catch (const FitUnavailable&) {
      table.fits.emplace_back(std::nullopt);
    }
  }

  const double L = bound.lipschitz();
  const double mu = bound.strong_convexity();
  double alpha = 3.0;
  double s = half_inverse_step(bound);
  for (const SolverConfig& c : configs) {
    if (c.variant == Variant::mapm) {
      alpha = c.alpha;
      s = c.step;
      break;
    }
  }
  table.rho_lower_bound =
      rho_lower_bound(EnergyContext::make(alpha, s, mu, L, *bound.known_minimizer(), table.f_star));
  table.sqrt_mu_over_l = std::sqrt(mu / L);
  return table;
}

}  // namespace proxcert
