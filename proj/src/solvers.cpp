#include "proxcert/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "proxcert/certificates.hpp"
#include "proxcert/errors.hpp"

namespace proxcert {

// --- trace.hpp helpers ------------------------------------------------------------

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::ista: return "ista";
    case Variant::apm: return "apm";
    case Variant::mapm: return "mapm";
    case Variant::strongly_convex_apm: return "strongly_convex_apm";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  if (name == "ista") return Variant::ista;
  if (name == "apm") return Variant::apm;
  if (name == "mapm") return Variant::mapm;
  if (name == "strongly_convex_apm" || name == "strongly-convex-apm")
    return Variant::strongly_convex_apm;
  return std::nullopt;
}

std::string_view to_string(CertName n) {
  switch (n) {
    case CertName::energy_nonincreasing: return "energy_nonincreasing";
    case CertName::prop1: return "prop1";
    case CertName::prop2: return "prop2";
    case CertName::descent_lemma: return "descent_lemma";
    case CertName::inertial_identity: return "inertial_identity";
    case CertName::theorem1_envelope: return "theorem1_envelope";
    case CertName::theorem2_envelope: return "theorem2_envelope";
  }
  return "unknown";
}

std::optional<CertName> parse_cert_name(std::string_view name) {
  for (auto n : {CertName::energy_nonincreasing, CertName::prop1, CertName::prop2,
                 CertName::descent_lemma, CertName::inertial_identity,
                 CertName::theorem1_envelope, CertName::theorem2_envelope})
    if (to_string(n) == name) return n;
  return std::nullopt;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::not_applicable: return "not_applicable";
  }
  return "unknown";
}

bool Trace::has_iterates() const {
  return !records.empty() &&
         std::all_of(records.begin(), records.end(), [&](const IterationRecord& r) {
           return r.x.size() == dim && r.y.size() == dim && r.grad_map.size() == dim;
         });
}

// --- steppers -------------------------------------------------------------------------

double half_inverse_step(const CompositeProblem& problem) {
  if (!(problem.lipschitz() > 0.0)) throw ConfigError("s = 1/(2L) needs L > 0");
  return 1.0 / (2.0 * problem.lipschitz());
}

SolverState initial_state(const CompositeProblem& problem, const Vector& x0) {
  if (x0.size() != problem.dim())
    throw InvalidInput("x0 has dimension " + std::to_string(x0.size()) + ", problem has " +
                       std::to_string(problem.dim()));
  require_finite(x0, "x0");
  SolverState st;
  st.x = x0;
  st.y = x0;
  st.f_y = problem.objective(x0);
  return st;
}

GradientMapping gradient_mapping(const CompositeProblem& problem, double s, const Vector& x) {
  GradientMapping gm;
  gm.z = problem.nonsmooth().prox(x - s * problem.smooth().gradient(x), s);
  gm.G = (x - gm.z) / s;
  return gm;
}

void validate_config(const CompositeProblem& problem, const SolverConfig& config) {
  const double s = config.step;
  if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("step size s must be positive");
  const double L = problem.lipschitz();
  if (L > 0.0 && s > 1.0 / L)
    throw ConfigError("step size s = " + std::to_string(s) + " exceeds 1/L = " +
                      std::to_string(1.0 / L));
  if ((config.variant == Variant::apm || config.variant == Variant::mapm) &&
      !(config.alpha >= 3.0 && std::isfinite(config.alpha)))
    throw ConfigError("alpha must be >= 3 for accelerated variants");
  if (config.variant == Variant::strongly_convex_apm && !(problem.strong_convexity() > 0.0))
    throw ConfigError("strongly_convex_apm needs mu > 0");
  if (!(config.grad_map_tol >= 0.0)) throw ConfigError("gradient-mapping tolerance must be >= 0");
}

double strongly_convex_momentum(double mu, double lipschitz) {
  if (!(mu > 0.0)) throw ConfigError("strongly_convex_apm needs mu > 0");
  const double q = std::sqrt(mu / lipschitz);
  return (1.0 - q) / (1.0 + q);
}

SolverState advance(const CompositeProblem& problem, const SolverConfig& config,
                    const SolverState& state, const GradientMapping& gm) {
  SolverState next;
  next.k = state.k + 1;
  next.z = gm.z;
  const double k = static_cast<double>(state.k);
  const double alpha = config.alpha;

  switch (config.variant) {
    case Variant::ista:
      next.y = gm.z;
      next.x = gm.z;
      next.f_y = problem.objective(gm.z);
      break;
    case Variant::apm:
      next.y = gm.z;
      next.x = next.y + (k / (k + alpha)) * (next.y - state.y);
      next.f_y = problem.objective(gm.z);
      break;
    case Variant::mapm: {
      const double f_z = problem.objective(gm.z);
      // Ties accept the prox point; the comparison uses the cached F(y_k).
      next.accepted = f_z <= state.f_y;
      next.y = next.accepted ? gm.z : state.y;
      next.f_y = next.accepted ? f_z : state.f_y;
      next.x = next.y + (k / (k + alpha)) * (next.y - state.y) +
               ((k + alpha - 1.0) / (k + alpha)) * (gm.z - next.y);
      break;
    }
    case Variant::strongly_convex_apm: {
      const double beta =
          strongly_convex_momentum(problem.strong_convexity(), problem.lipschitz());
      next.y = gm.z;
      next.x = next.y + beta * (next.y - state.y);
      next.f_y = problem.objective(gm.z);
      break;
    }
  }
  return next;
}

SolverState ista_step(const CompositeProblem& problem, double s, const SolverState& state) {
  SolverConfig cfg;
  cfg.variant = Variant::ista;
  cfg.step = s;
  return advance(problem, cfg, state, gradient_mapping(problem, s, state.x));
}

SolverState apm_step(const CompositeProblem& problem, const SolverConfig& config,
                     const SolverState& state) {
  if (config.variant != Variant::apm) throw ConfigError("apm_step needs variant apm");
  if (!(config.alpha >= 3.0)) throw ConfigError("alpha must be >= 3 for apm");
  return advance(problem, config, state, gradient_mapping(problem, config.step, state.x));
}

SolverState mapm_step(const CompositeProblem& problem, const SolverConfig& config,
                      const SolverState& state) {
  if (config.variant != Variant::mapm) throw ConfigError("mapm_step needs variant mapm");
  if (!(config.alpha >= 3.0)) throw ConfigError("alpha must be >= 3 for mapm");
  return advance(problem, config, state, gradient_mapping(problem, config.step, state.x));
}

SolverState strongly_convex_apm_step(const CompositeProblem& problem, double s,
                                     const SolverState& state) {
  SolverConfig cfg;
  cfg.variant = Variant::strongly_convex_apm;
  cfg.step = s;
  if (!(problem.strong_convexity() > 0.0))
    throw ConfigError("strongly_convex_apm needs mu > 0");
  return advance(problem, cfg, state, gradient_mapping(problem, s, state.x));
}

Trace run(const CompositeProblem& problem, const SolverConfig& config, const Vector& x0) {
  validate_config(problem, config);
  SolverState state = initial_state(problem, x0);

  const bool certify = config.record_certificates && problem.known_minimizer().has_value() &&
                       problem.known_optimum().has_value();
  const bool keep_iterates = config.record_iterates || certify;
  const std::optional<double> f_star = problem.known_optimum();

  Trace trace;
  trace.variant = config.variant;
  trace.alpha = config.alpha;
  trace.step = config.step;
  trace.dim = problem.dim();
  trace.problem_hash = problem.content_hash();

  while (true) {
    GradientMapping gm = gradient_mapping(problem, config.step, state.x);
    IterationRecord rec;
    rec.k = state.k;
    rec.f_y = state.f_y;
    if (f_star) rec.gap = state.f_y - *f_star;
    rec.grad_map_norm = gm.G.norm();
    rec.accepted = state.accepted;
    if (keep_iterates) {
      rec.x = state.x;
      rec.y = state.y;
      rec.grad_map = gm.G;
    }
    const bool converged = config.grad_map_tol > 0.0 && rec.grad_map_norm <= config.grad_map_tol;
    trace.records.push_back(std::move(rec));
    if (converged || state.k >= config.max_iters) break;
    state = advance(problem, config, state, gm);
  }

  if (certify) {
    const double alpha = config.variant == Variant::mapm || config.variant == Variant::apm
                             ? config.alpha
                             : 3.0;
    const EnergyContext ctx = EnergyContext::from_problem(problem, alpha, config.step);
    if (config.variant == Variant::mapm) {
      const std::vector<double> energies = trace_energies(ctx, trace);
      for (std::size_t i = 0; i < energies.size(); ++i) trace.records[i].energy = energies[i];
    }
    for (CertificateReport& rep : certify_trace(problem, ctx, trace))
      trace.records[rep.k].certificates.push_back(rep);
    if (!config.record_iterates) {
      for (IterationRecord& rec : trace.records) {
        rec.x.resize(0);
        rec.y.resize(0);
        rec.grad_map.resize(0);
      }
    }
  }
  return trace;
}

}  // namespace proxcert
