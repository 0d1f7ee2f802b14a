#pragma once

#include <cstddef>
#include <optional>

#include "proxcert/problems.hpp"
#include "proxcert/trace.hpp"

namespace proxcert {

struct SolverConfig {
  Variant variant = Variant::mapm;
  double alpha = 3.0;  // ignored by ista and strongly_convex_apm
  double step = 0.0;   // s; must satisfy 0 < s <= 1/L
  std::size_t max_iters = 1000;
  double grad_map_tol = 0.0;  // stop once ||G_s(x_k)|| <= tol; 0 disables the test
  bool record_certificates = false;
  bool record_iterates = false;
};

/// The canonical step s = 1/(2L).
double half_inverse_step(const CompositeProblem& problem);

struct SolverState {
  std::size_t k = 0;
  Vector x;
  Vector y;
  std::optional<Vector> z;  // prox point of the last step
  double f_y = 0.0;         // cached F(y_k)
  bool accepted = true;
};

/// x_0 = y_0 = x0, f_y = F(x0).
SolverState initial_state(const CompositeProblem& problem, const Vector& x0);

struct GradientMapping {
  Vector z;  // prox_{sg}(x - s grad f(x))
  Vector G;  // (x - z) / s
};

GradientMapping gradient_mapping(const CompositeProblem& problem, double s, const Vector& x);

/// Throws ConfigError when the configuration breaks a method hypothesis for
/// this problem.
void validate_config(const CompositeProblem& problem, const SolverConfig& config);

SolverState ista_step(const CompositeProblem& problem, double s, const SolverState& state);
SolverState apm_step(const CompositeProblem& problem, const SolverConfig& config,
                     const SolverState& state);
SolverState mapm_step(const CompositeProblem& problem, const SolverConfig& config,
                      const SolverState& state);
SolverState strongly_convex_apm_step(const CompositeProblem& problem, double s,
                                     const SolverState& state);

/// Momentum (1 - sqrt(mu/L)) / (1 + sqrt(mu/L)).
double strongly_convex_momentum(double mu, double lipschitz);

/// One step of `config.variant` reusing a gradient mapping already evaluated
/// at state.x.
SolverState advance(const CompositeProblem& problem, const SolverConfig& config,
                    const SolverState& state, const GradientMapping& gm);

/// Runs from x_0 = y_0 = x0 and records k = 0, 1, ... until max_iters or the
/// gradient-mapping tolerance. With record_certificates and a problem that
/// carries x* and F*, each record also gets its energy and certificates.
Trace run(const CompositeProblem& problem, const SolverConfig& config, const Vector& x0);

}  // namespace proxcert
