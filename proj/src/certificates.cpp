#include "proxcert/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "proxcert/errors.hpp"
#include "proxcert/solvers.hpp"

namespace proxcert {
namespace {

CertificateReport make_report(std::size_t k, CertName name, double lhs, double rhs,
                              double tolerance) {
  CertificateReport r;
  r.k = k;
  r.name = name;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.verdict = r.slack >= -tolerance ? Verdict::pass : Verdict::fail;
  return r;
}

CertificateReport not_applicable(std::size_t k, CertName name) {
  CertificateReport r;
  r.k = k;
  r.name = name;
  r.verdict = Verdict::not_applicable;
  return r;
}

double weighted_sum(const std::array<double, 3>& c, const std::array<double, 3>& w) {
  return c[0] * w[0] + c[1] * w[1] + c[2] * w[2];
}

}  // namespace

EnergyContext EnergyContext::make(double alpha, double s, double mu, double lipschitz,
                                  Vector x_star, double f_star) {
  if (!(alpha >= 3.0) || !std::isfinite(alpha)) throw ConfigError("energy context needs alpha >= 3");
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz))
    throw ConfigError("energy context needs L > 0");
  if (!(s > 0.0) || s > 1.0 / lipschitz) throw ConfigError("energy context needs 0 < s <= 1/L");
  if (!(mu >= 0.0) || mu > lipschitz) throw ConfigError("energy context needs L >= mu >= 0");
  require_finite(x_star, "x*");
  if (!std::isfinite(f_star)) throw InvalidInput("F* must be finite");
  EnergyContext ctx;
  ctx.alpha = alpha;
  ctx.s = s;
  ctx.mu = mu;
  ctx.lipschitz = lipschitz;
  ctx.x_star = std::move(x_star);
  ctx.f_star = f_star;
  return ctx;
}

EnergyContext EnergyContext::from_problem(const CompositeProblem& problem, double alpha, double s) {
  if (!problem.known_minimizer() || !problem.known_optimum())
    throw ReferenceUnavailable("problem carries no reference minimizer/optimum");
  return make(alpha, s, problem.strong_convexity(), problem.lipschitz(),
              *problem.known_minimizer(), *problem.known_optimum());
}

double inequality_tolerance(double lhs, double rhs, double extra_scale) {
  return kInequalityRelTol * (1.0 + std::abs(lhs) + std::abs(rhs) + std::abs(extra_scale));
}

Vector phi(const EnergyContext& ctx, std::size_t k, const Vector& x_k, const Vector& y_k) {
  if (x_k.size() != y_k.size() || x_k.size() != ctx.x_star.size())
    throw InvalidInput("phi: dimension mismatch");
  return static_cast<double>(k) * (x_k - y_k) + (ctx.alpha - 1.0) * (x_k - ctx.x_star);
}

double theta(const EnergyContext& ctx, std::size_t k) {
  const double kd = static_cast<double>(k);
  return kd * (kd + ctx.alpha - 1.0) * ctx.s;
}

double energy(const EnergyContext& ctx, std::size_t k, const Vector& x_k, const Vector& y_k,
              double f_yk) {
  double gap = f_yk - ctx.f_star;
  if (gap < -kGapFloorRel * (1.0 + std::abs(ctx.f_star)))
    throw DataCorruption("F(y_" + std::to_string(k) + ") - F* = " + std::to_string(gap) +
                         " is below the rounding floor; the reference optimum is wrong");
  gap = std::max(gap, 0.0);
  const double th = theta(ctx, k);
  const double kinetic = 0.5 * phi(ctx, k, x_k, y_k).squaredNorm();
  return th > 0.0 ? kinetic + th * gap : kinetic;
}

std::array<double, 3> energy_weights(const EnergyContext& ctx, const Vector& x_k,
                                     const Vector& y_k, const Vector& G) {
  return {(ctx.s * G).squaredNorm(), (x_k - y_k).squaredNorm(), (x_k - ctx.x_star).squaredNorm()};
}

std::array<double, 3> decrease_coefficients(const EnergyContext& ctx, std::size_t k) {
  const double kd = static_cast<double>(k);
  const double a = ctx.alpha;
  const double ms = ctx.mu * ctx.s;
  const double m = kd + a - 1.0;
  return {(1.0 - ctx.s * ctx.lipschitz) * m * m / 2.0, ms * kd * m / 2.0,
          ms * (a - 1.0) * m / 2.0};
}

std::array<double, 3> bound_coefficients(const EnergyContext& ctx, std::size_t k,
                                         const BoundParams& p) {
  if (!(ctx.mu > 0.0)) throw ConfigError("energy upper bound needs mu > 0");
  if (!(p.omega > 0.0 && p.lambda > 0.0 && p.sigma > 0.0))
    throw InvalidInput("omega, lambda, sigma must be positive");
  const double kd = static_cast<double>(k);
  const double a = ctx.alpha;
  const double ms = ctx.mu * ctx.s;
  const double m = kd + a - 1.0;
  const double grad_factor =
      1.0 + 1.0 / p.lambda + p.sigma + (1.0 - ms * (2.0 - ctx.s * ctx.lipschitz)) / ms;
  return {m * m / 2.0 * grad_factor, kd * kd / 2.0 * (1.0 + p.omega + p.lambda),
          (a - 1.0) * (a - 1.0) / 2.0 * (1.0 + 1.0 / p.omega + 1.0 / p.sigma)};
}

double prop1_rhs(const EnergyContext& ctx, std::size_t k, const Vector& x_k, const Vector& y_k,
                 const Vector& G) {
  return -weighted_sum(decrease_coefficients(ctx, k), energy_weights(ctx, x_k, y_k, G));
}

std::optional<double> prop2_rhs(const EnergyContext& ctx, std::size_t k, const Vector& x_k,
                                const Vector& y_k, const Vector& G, const BoundParams& params) {
  if (!(ctx.mu > 0.0)) return std::nullopt;
  return weighted_sum(bound_coefficients(ctx, k, params), energy_weights(ctx, x_k, y_k, G));
}

double comparison_rho(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || a.size() != b.size())
    throw InvalidInput("comparison_rho needs two nonempty lists of equal length");
  double rho = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0.0) || !(b[i] > 0.0) || !std::isfinite(a[i]) || !std::isfinite(b[i]))
      throw InvalidInput("comparison_rho entries must be positive and finite");
    rho = std::min(rho, a[i] / b[i]);
  }
  return rho;
}

double rho_lower_bound(const EnergyContext& ctx) {
  const double ms = ctx.mu * ctx.s;
  const double sl = ctx.s * ctx.lipschitz;
  const double first = ms * std::max(0.0, 1.0 - sl) / (1.0 + ms * (sl + 2.0));
  return std::min(first, ms / 2.0);
}

std::size_t k_alpha(const EnergyContext& ctx) {
  return static_cast<std::size_t>(std::ceil(ctx.alpha - 1.0));
}

std::optional<double> theorem2_envelope(const EnergyContext& ctx, std::size_t k, double dist0) {
  if (k == 0) return std::nullopt;
  const double kd = static_cast<double>(k);
  const double am1 = ctx.alpha - 1.0;
  return am1 * am1 * dist0 * dist0 / (2.0 * ctx.s * kd * (kd + am1));
}

std::optional<double> theorem1_envelope(const EnergyContext& ctx, std::size_t k, double dist0) {
  const std::size_t ka = k_alpha(ctx);
  if (k < ka || k == 0) return std::nullopt;
  const double rho = rho_lower_bound(ctx);
  const double decay = std::pow(1.0 + rho, -static_cast<double>(k - ka));
  return *theorem2_envelope(ctx, k, dist0) * decay;
}

double classical_apm_envelope(double alpha, double s, std::size_t k, double dist0) {
  const double kp1 = static_cast<double>(k) + 1.0;
  return (alpha - 1.0) * (alpha - 1.0) * dist0 * dist0 / (2.0 * s * kp1 * kp1);
}

InequalitySides descent_lemma(const CompositeProblem& problem, double s, double mu,
                              const Vector& x, const Vector& y, std::optional<double> f_y) {
  const GradientMapping gm = gradient_mapping(problem, s, x);
  const Vector d = x - y;
  InequalitySides out;
  out.lhs = problem.objective(gm.z);
  out.rhs = (f_y ? *f_y : problem.objective(y)) + gm.G.dot(d) -
            s * (2.0 - s * problem.lipschitz()) / 2.0 * gm.G.squaredNorm() -
            mu / 2.0 * d.squaredNorm();
  return out;
}

double inertial_residual(double alpha, double s, std::size_t k, const Vector& x_k,
                         const Vector& y_k, const Vector& x_next, const Vector& y_next,
                         const Vector& G) {
  const double kd = static_cast<double>(k);
  const Vector r = (kd + 1.0) * (x_next - y_next) - kd * (x_k - y_k) +
                   (alpha - 1.0) * (x_next - x_k) + (kd + alpha - 1.0) * s * G;
  return r.norm();
}

double per_iteration_rho(const EnergyContext& ctx, std::size_t k, const BoundParams& params) {
  const auto a = decrease_coefficients(ctx, k);
  const auto b = bound_coefficients(ctx, k, params);
  std::vector<double> as;
  std::vector<double> bs;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(b[i] > 0.0)) continue;  // weight known to vanish (k = 0 term)
    if (!(a[i] > 0.0)) return 0.0;
    as.push_back(a[i]);
    bs.push_back(b[i]);
  }
  return comparison_rho(as, bs);
}

Contraction contraction(const EnergyContext& ctx, std::size_t k, double energy_k,
                        double energy_next, const BoundParams& params) {
  Contraction c;
  c.rho_k = per_iteration_rho(ctx, k, params);
  c.lhs = (1.0 + c.rho_k) * energy_next;
  c.rhs = energy_k;
  return c;
}

std::vector<double> trace_energies(const EnergyContext& ctx, const Trace& trace) {
  if (!trace.has_iterates()) throw InvalidInput("trace has no recorded iterates");
  std::vector<double> out;
  out.reserve(trace.records.size());
  for (const IterationRecord& r : trace.records) out.push_back(energy(ctx, r.k, r.x, r.y, r.f_y));
  return out;
}

std::vector<CertificateReport> certify_trace(const CompositeProblem& problem,
                                             const EnergyContext& ctx, const Trace& trace,
                                             const BoundParams& params) {
  if (!trace.has_iterates()) throw InvalidInput("trace has no recorded iterates");
  if (trace.problem_hash != problem.content_hash())
    throw InvalidInput("trace was produced on a different problem");
  if (trace.dim != problem.dim() || ctx.x_star.size() != problem.dim())
    throw InvalidInput("trace dimension does not match the problem");

  const auto& recs = trace.records;
  const bool monotone = trace.variant == Variant::mapm;
  const bool inertial = monotone || trace.variant == Variant::apm;
  const bool strongly_convex = ctx.mu > 0.0;
  const bool linear_regime = strongly_convex && ctx.s < 1.0 / ctx.lipschitz;
  const double dist0 = (recs.front().x - ctx.x_star).norm();
  const std::size_t ka = k_alpha(ctx);

  std::vector<double> energies;
  if (monotone) energies = trace_energies(ctx, trace);

  std::vector<CertificateReport> out;
  out.reserve(recs.size() * 7);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const IterationRecord& r = recs[i];
    const std::size_t k = r.k;

    {
      const InequalitySides d = descent_lemma(problem, trace.step, ctx.mu, r.x, r.y, r.f_y);
      out.push_back(make_report(k, CertName::descent_lemma, d.lhs, d.rhs,
                                inequality_tolerance(d.lhs, d.rhs)));
    }

    const double gap = r.f_y - ctx.f_star;
    if (monotone && k >= 1) {
      const double env = *theorem2_envelope(ctx, k, dist0);
      out.push_back(make_report(k, CertName::theorem2_envelope, gap, env,
                                inequality_tolerance(gap, env)));
    } else {
      out.push_back(not_applicable(k, CertName::theorem2_envelope));
    }
    if (monotone && linear_regime && k >= ka) {
      const double env = *theorem1_envelope(ctx, k, dist0);
      out.push_back(make_report(k, CertName::theorem1_envelope, gap, env,
                                inequality_tolerance(gap, env)));
    } else {
      out.push_back(not_applicable(k, CertName::theorem1_envelope));
    }

    if (i + 1 == recs.size()) break;
    const IterationRecord& nx = recs[i + 1];

    if (monotone) {
      const double e0 = energies[i];
      const double e1 = energies[i + 1];
      out.push_back(make_report(k, CertName::energy_nonincreasing, e1, e0,
                                inequality_tolerance(e1, e0)));
      const double diff = e1 - e0;
      const double p1 = prop1_rhs(ctx, k, r.x, r.y, r.grad_map);
      out.push_back(make_report(k, CertName::prop1, diff, p1,
                                inequality_tolerance(diff, p1, std::abs(e0) + std::abs(e1))));
      if (strongly_convex) {
        const double p2 = *prop2_rhs(ctx, k, r.x, r.y, r.grad_map, params);
        out.push_back(make_report(k, CertName::prop2, e1, p2, inequality_tolerance(e1, p2)));
      } else {
        out.push_back(not_applicable(k, CertName::prop2));
      }
    } else {
      out.push_back(not_applicable(k, CertName::energy_nonincreasing));
      out.push_back(not_applicable(k, CertName::prop1));
      out.push_back(not_applicable(k, CertName::prop2));
    }

    if (inertial) {
      const double res =
          inertial_residual(trace.alpha, trace.step, k, r.x, r.y, nx.x, nx.y, r.grad_map);
      out.push_back(make_report(k, CertName::inertial_identity, res, 0.0,
                                kIdentityRelTol * (1.0 + r.x.norm())));
    } else {
      out.push_back(not_applicable(k, CertName::inertial_identity));
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const CertificateReport& a, const CertificateReport& b) {
    return std::tie(a.k, a.name) < std::tie(b.k, b.name);
  });
  return out;
}

}  // namespace proxcert
