// Acceptance checks: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "proxcert/certificates.hpp"
#include "proxcert/errors.hpp"
#include "proxcert/harness.hpp"
#include "proxcert/problems.hpp"
#include "proxcert/solvers.hpp"

using namespace proxcert;

namespace {

constexpr std::uint64_t kSuiteSeed = 2024;

struct Line {
  int id;
  bool ok;
  std::string text;
};

std::vector<Line> lines;

void report(int id, const char* title, bool ok, const std::string& detail) {
  lines.push_back({id, ok, std::string(title) + ": " + detail});
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

SolverConfig mapm_config(double step, std::size_t iters, bool iterates) {
  SolverConfig c;
  c.variant = Variant::mapm;
  c.alpha = 3.0;
  c.step = step;
  c.max_iters = iters;
  c.record_iterates = iterates;
  return c;
}

struct Bound {
  ProblemSpec spec;
  CompositeProblem problem;  // carries x*, F*
};

// 1. Every mapm trace on the suite has F(y_{k+1}) <= F(y_k) as computed.
void monotonicity() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t violations = 0, steps = 0;
  const auto suite = generate_suite(kSuiteSeed);
  for (const SuiteEntry& e : suite) {
    const Trace t = run(e.problem, mapm_config(half_inverse_step(e.problem), 2000, false),
                        Vector::Zero(e.problem.dim()));
    for (std::size_t k = 1; k < t.records.size(); ++k, ++steps)
      violations += !(t.records[k].f_y <= t.records[k - 1].f_y);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(1, "monotonicity", violations == 0 && secs < 30.0 && suite.size() >= 20,
         fmt("%.0f problems, %.0f steps, %.0f violations, %.2f s", double(suite.size()),
             double(steps), double(violations), secs));
}

std::vector<Bound> bound_suite() {
  std::vector<Bound> out;
  for (const SuiteEntry& e : generate_suite(kSuiteSeed))
    out.push_back({e.spec, with_reference(e.problem, reference_solution(e.problem))});
  return out;
}

struct Counts {
  std::size_t checked = 0;
  std::size_t failed = 0;
  double worst = 0.0;  // most negative normalized slack
  void add(const CertificateReport& r) {
    if (!r.applicable()) return;
    ++checked;
    if (!r.pass()) ++failed;
    const double rel = r.slack / (1.0 + std::abs(r.lhs) + std::abs(r.rhs));
    worst = std::min(worst, rel);
  }
  std::string str() const {
    return fmt("%.0f checks, %.0f violations, worst relative slack %.3g", double(checked),
               double(failed), worst);
  }
};

// 2-5 and 8 run on the same certified traces.
void certified_suite(const std::vector<Bound>& suite) {
  Counts energy, prop1, prop1_critical, thm1, thm1_corollary, thm2;
  std::size_t prop2_checks = 0, prop2_fail = 0;
  std::size_t inertial_checks = 0, inertial_fail = 0;
  double inertial_worst = 0.0;
  std::size_t rate_checked = 0, rate_fail = 0, rate_endpoint = 0;
  double rate_margin = INFINITY;
  std::size_t strongly_convex = 0, convex = 0;

  const double grid[] = {0.25, 0.5, 1.0, 2.0};

  for (const Bound& b : suite) {
    const CompositeProblem& p = b.problem;
    const double s = half_inverse_step(p);
    const EnergyContext ctx = EnergyContext::from_problem(p, 3.0, s);
    const Trace t = run(p, mapm_config(s, 2000, true), Vector::Zero(p.dim()));

    // 8. Inertial identity on every suite problem.
    for (std::size_t i = 0; i + 1 < t.records.size(); ++i) {
      const auto& r = t.records[i];
      const auto& n = t.records[i + 1];
      const double res = inertial_residual(3.0, s, r.k, r.x, r.y, n.x, n.y, r.grad_map);
      const double tol = kIdentityRelTol * (1.0 + r.x.norm());
      ++inertial_checks;
      inertial_fail += !(res <= tol);
      inertial_worst = std::max(inertial_worst, res / tol);
    }

    const auto reports = certify_trace(p, ctx, t);
    const bool sc = p.strong_convexity() > 0.0;
    (sc ? strongly_convex : convex) += 1;
    const double dist0 = (t.records.front().x - ctx.x_star).norm();
    for (const CertificateReport& r : reports) {
      if (sc && r.k < 1000) {
        if (r.name == CertName::energy_nonincreasing) energy.add(r);
        if (r.name == CertName::prop1) prop1.add(r);
      }
      if (sc && r.name == CertName::theorem1_envelope && r.k >= 2) thm1.add(r);
      if (!sc && r.name == CertName::theorem2_envelope && r.k >= 1) thm2.add(r);
    }

    if (sc) {
      // 5. The envelope with the corollary constant mu / (4L + 5mu), k_alpha = 2.
      const double mu = p.strong_convexity(), L = p.lipschitz();
      const double rho = mu / (4.0 * L + 5.0 * mu);
      for (const auto& r : t.records) {
        if (r.k < 2) continue;
        const double k = static_cast<double>(r.k);
        const double env = 4.0 * dist0 * dist0 / (2.0 * s * k * (k + 2.0)) * std::pow(1.0 + rho, -(k - 2.0));
        const double gap = r.f_y - ctx.f_star;
        CertificateReport rep{r.k, CertName::theorem1_envelope, gap, env, env - gap,
                              env - gap >= -inequality_tolerance(gap, env) ? Verdict::pass
                                                                           : Verdict::fail};
        thm1_corollary.add(rep);
      }

      // 4. Prop. 2 over the parameter grid, first 1000 iterations.
      const std::vector<double> E = trace_energies(ctx, t);
      for (double w : grid)
        for (double l : grid)
          for (double sg : grid) {
            const BoundParams bp{w, l, sg};
            for (std::size_t i = 0; i < 1000 && i + 1 < t.records.size(); ++i) {
              const auto& r = t.records[i];
              const double rhs = *prop2_rhs(ctx, r.k, r.x, r.y, r.grad_map, bp);
              ++prop2_checks;
              prop2_fail += !(E[i + 1] - rhs <= inequality_tolerance(E[i + 1], rhs));
            }
          }

      // 10 (second half). Empirical rate against the certified constant.
      const RateFit fit = empirical_rate(gap_sequence(t), ctx.f_star);
      const double lb = rho_lower_bound(ctx);
      ++rate_checked;
      rate_endpoint += fit.endpoint;
      rate_fail += !(fit.rho_hat >= lb - 1e-6);
      rate_margin = std::min(rate_margin, fit.rho_hat - lb);

      // 3 (second half). At s = 1/L the decrement is bounded by the mu-terms alone.
      const double s_crit = 1.0 / L;
      const EnergyContext crit = EnergyContext::from_problem(p, 3.0, s_crit);
      const Trace tc = run(p, mapm_config(s_crit, 1000, true), Vector::Zero(p.dim()));
      for (const CertificateReport& r : certify_trace(p, crit, tc))
        if (r.name == CertName::prop1) prop1_critical.add(r);
    }
  }

  report(2, "energy nonincreasing", energy.failed == 0 && energy.checked > 0,
         fmt("%.0f strongly convex traces; ", double(strongly_convex)) + energy.str());
  report(3, "energy decrease bound", prop1.failed == 0 && prop1_critical.failed == 0 &&
                                         prop1.checked > 0 && prop1_critical.checked > 0,
         "s=1/(2L): " + prop1.str() + "; s=1/L: " + prop1_critical.str());
  report(4, "energy upper bound over 4^3 grid", prop2_fail == 0 && prop2_checks > 0,
         fmt("%.0f checks, %.0f violations", double(prop2_checks), double(prop2_fail)));
  report(5, "linear envelope", thm1.failed == 0 && thm1_corollary.failed == 0 && thm1.checked > 0,
         "certificate: " + thm1.str() + "; corollary constant: " + thm1_corollary.str());
  report(6, "sublinear envelope (mu = 0)", thm2.failed == 0 && thm2.checked > 0,
         fmt("%.0f traces; ", double(convex)) + thm2.str());
  report(8, "inertial identity", inertial_fail == 0 && inertial_checks > 0,
         fmt("%.0f checks, %.0f violations, max residual/tolerance %.3g", double(inertial_checks),
             double(inertial_fail), inertial_worst));

  // 10. Rate-fit oracle.
  std::vector<double> geo(200);
  for (std::size_t k = 0; k < geo.size(); ++k) geo[k] = 3.0 * std::pow(1.25, -static_cast<double>(k));
  const RateFit g = fit_linear_rate(geo, {0, geo.size()});
  const double rel = std::abs(g.rho_hat - 0.25) / 0.25;
  report(10, "rate fit", rel <= 1e-10 && rate_fail == 0,
         fmt("geometric relative error %.3g; ", rel) +
             fmt("%.0f strongly convex fits (%.0f two-point), %.0f below bound, min rho_hat - bound %.3g",
                 double(rate_checked), double(rate_endpoint), double(rate_fail), rate_margin));
}

// 7. mapm collapses to apm when every prox point is accepted.
void collapse() {
  const CompositeProblem p = make_problem({ProblemKind::quadratic, 20, 0, 2.0, 0.1, 5});
  const double s = 1e-5;
  SolverConfig cm = mapm_config(s, 500, true);
  SolverConfig ca = cm;
  ca.variant = Variant::apm;
  const Vector x0 = Vector::Zero(p.dim());
  const Trace m = run(p, cm, x0);
  const Trace a = run(p, ca, x0);
  std::size_t rejected = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    rejected += !m.records[i].accepted;
    const auto& rm = m.records[i];
    const auto& ra = a.records[i];
    const double dx = (rm.x - ra.x).norm() / std::max(ra.x.norm(), 1e-300);
    const double dy = (rm.y - ra.y).norm() / std::max(ra.y.norm(), 1e-300);
    worst = std::max({worst, dx, dy});
  }
  report(7, "algebraic collapse", rejected == 0 && worst <= 1e-12 && m.records.size() == 501,
         fmt("quadratic dim 20 cond 2, s = %.0e, k <= 500: %.0f rejections, max relative difference %.3g",
             s, double(rejected), worst));
}

// 9. Equality case of the descent inequality.
void descent_witness() {
  Vector b(1);
  b << 0.0;
  const CompositeProblem p = quadratic_problem(Matrix::Identity(1, 1), b);
  Vector x(1), y(1);
  x << 1.0;
  y << 0.0;
  const InequalitySides d = descent_lemma(p, 1.0, 1.0, x, y);
  const double slack = d.rhs - d.lhs;
  report(9, "descent inequality equality witness", std::abs(slack) <= 1e-12,
         fmt("lhs %.3g, rhs %.3g, slack %.3g", d.lhs, d.rhs, slack));
}

// 11. The known-mu variant is at least as fast as the monotone method at mu/L = 0.01.
void known_mu_ordering() {
  const CompositeProblem p = make_problem({ProblemKind::quadratic, 200, 0, 100.0, 0.1, 1});
  SolverConfig sc;
  sc.variant = Variant::strongly_convex_apm;
  sc.step = 1.0 / p.lipschitz();
  sc.max_iters = 2000;
  const ComparisonTable t =
      compare_solvers(p, {sc, mapm_config(half_inverse_step(p), 2000, false)}, Vector::Zero(p.dim()));
  const bool ok = t.fits[0] && t.fits[1] && t.fits[0]->rho_hat >= t.fits[1]->rho_hat;
  report(11, "known-mu variant ordering", ok,
         fmt("mu/L = %.3g: rho_hat known-mu %.4g vs monotone %.4g (sqrt(mu/L) = %.3g)",
             t.sqrt_mu_over_l * t.sqrt_mu_over_l, t.fits[0] ? t.fits[0]->rho_hat : NAN,
             t.fits[1] ? t.fits[1]->rho_hat : NAN, t.sqrt_mu_over_l));
}

// 12. Nonexpansiveness and optimality probes for every prox operator.
void prox_suite() {
  const Eigen::Index n = 6;
  const std::vector<std::shared_ptr<const ProxOracle>> ops = {
      std::make_shared<ZeroProx>(), std::make_shared<L1Prox>(0.5),
      std::make_shared<BoxProx>(Vector::Constant(n, -0.5), Vector::Constant(n, 0.75)),
      std::make_shared<SquaredL2Prox>(2.0)};
  Rng rng(kSuiteSeed);
  std::size_t cases = 0, fails = 0;
  for (const auto& g : ops) {
    for (int trial = 0; trial < 1000; ++trial, ++cases) {
      const Vector u = 2.0 * rng.normal_vector(n);
      const Vector v = 2.0 * rng.normal_vector(n);
      const double t = 1e-3 + rng.uniform();
      const Vector pu = g->prox(u, t);
      const Vector pv = g->prox(v, t);
      bool ok = (pu - pv).norm() <= (u - v).norm() + 1e-12 && std::isfinite(g->value(pu));
      const double best = g->value(pu) + (pu - u).squaredNorm() / (2.0 * t);
      for (int probe = 0; probe < 100 && ok; ++probe) {
        const Vector w = probe % 2 == 0 ? Vector(pu + 0.1 * rng.normal_vector(n))
                                        : Vector(2.0 * rng.normal_vector(n));
        ok = best <= g->value(w) + (w - u).squaredNorm() / (2.0 * t) + 1e-12;
      }
      fails += !ok;
    }
  }
  report(12, "prox properties", fails == 0,
         fmt("%.0f operators, %.0f cases (100 probes each), %.0f failures", double(ops.size()),
             double(cases), double(fails)));
}

}  // namespace

int main() {
  try {
    monotonicity();
    const std::vector<Bound> suite = bound_suite();
    certified_suite(suite);
    collapse();
    descent_witness();
    known_mu_ordering();
    prox_suite();
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.id < b.id; });
  int failures = 0;
  for (const Line& l : lines) {
    std::printf("%s %2d %s\n", l.ok ? "PASS" : "FAIL", l.id, l.text.c_str());
    failures += !l.ok;
  }
  std::printf("%s: %d of %zu criteria failing\n", failures == 0 ? "ALL PASS" : "FAILURES", failures,
              lines.size());
  return failures == 0 ? 0 : 1;
}
