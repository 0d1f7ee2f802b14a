#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "proxcert/problems.hpp"
#include "proxcert/trace.hpp"

namespace proxcert {

/// Constants the Lyapunov analysis of the monotone method is stated in.
struct EnergyContext {
  double alpha = 3.0;
  double s = 0.0;
  double mu = 0.0;
  double lipschitz = 0.0;
  Vector x_star;
  double f_star = 0.0;

  /// Validates alpha >= 3, 0 < s <= 1/L, L >= mu >= 0.
  static EnergyContext make(double alpha, double s, double mu, double lipschitz, Vector x_star,
                            double f_star);
  /// Takes mu, L, x*, F* from a problem that carries a reference.
  static EnergyContext from_problem(const CompositeProblem& problem, double alpha, double s);
};

/// Free parameters of the energy upper bound. Defaults are the values the
/// linear-rate argument fixes.
struct BoundParams {
  double omega = 0.5;
  double lambda = 0.5;
  double sigma = 1.0;
};

// Relative slack used by every inequality certificate.
inline constexpr double kInequalityRelTol = 1e-8;
// Relative bound on the inertial identity residual.
inline constexpr double kIdentityRelTol = 1e-10;
// Floor below which F(y_k) - F* is treated as a wrong reference rather than rounding.
inline constexpr double kGapFloorRel = 1e-9;

/// 1e-8 * (1 + |lhs| + |rhs| + extra_scale)
double inequality_tolerance(double lhs, double rhs, double extra_scale = 0.0);

/// k (x_k - y_k) + (alpha - 1)(x_k - x*)
Vector phi(const EnergyContext& ctx, std::size_t k, const Vector& x_k, const Vector& y_k);

/// k (k + alpha - 1) s
double theta(const EnergyContext& ctx, std::size_t k);

/// 1/2 ||phi_k||^2 + theta_k (F(y_k) - F*). A gap below the rounding floor
/// throws DataCorruption; smaller negative gaps are clamped to zero.
double energy(const EnergyContext& ctx, std::size_t k, const Vector& x_k, const Vector& y_k,
              double f_yk);

/// Squared norms the energy estimates are written in:
/// (||s G||^2, ||x_k - y_k||^2, ||x_k - x*||^2).
std::array<double, 3> energy_weights(const EnergyContext& ctx, const Vector& x_k,
                                     const Vector& y_k, const Vector& G);

/// Coefficients a with E_{k+1} - E_k <= -sum a_i W_i.
std::array<double, 3> decrease_coefficients(const EnergyContext& ctx, std::size_t k);

/// Coefficients b with E_{k+1} <= sum b_i W_i. Requires mu > 0.
std::array<double, 3> bound_coefficients(const EnergyContext& ctx, std::size_t k,
                                         const BoundParams& params = {});

/// Right-hand side of the energy decrease bound (nonpositive).
double prop1_rhs(const EnergyContext& ctx, std::size_t k, const Vector& x_k, const Vector& y_k,
                 const Vector& G);

/// Upper bound on E_{k+1}; nullopt ("not applicable") when mu = 0.
std::optional<double> prop2_rhs(const EnergyContext& ctx, std::size_t k, const Vector& x_k,
                                const Vector& y_k, const Vector& G,
                                const BoundParams& params = {});

/// min_i a_i / b_i over positive lists of equal length.
double comparison_rho(std::span<const double> a, std::span<const double> b);

/// min{ mu s (1 - sL) / (1 + mu s (sL + 2)), mu s / 2 }
double rho_lower_bound(const EnergyContext& ctx);

/// ceil(alpha - 1)
std::size_t k_alpha(const EnergyContext& ctx);

/// Linear envelope for k >= k_alpha, nullopt before.
std::optional<double> theorem1_envelope(const EnergyContext& ctx, std::size_t k, double dist0);

/// (alpha-1)^2 dist0^2 / (2 s k (k + alpha - 1)) for k >= 1, nullopt at k = 0.
std::optional<double> theorem2_envelope(const EnergyContext& ctx, std::size_t k, double dist0);

/// Classical accelerated bound (alpha-1)^2 dist0^2 / (2 s (k+1)^2) used as a
/// sanity envelope for the non-monotone method.
double classical_apm_envelope(double alpha, double s, std::size_t k, double dist0);

struct InequalitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Both sides of
///   F(x - s G_s(x)) <= F(y) + <G_s(x), x - y> - s(2 - sL)/2 ||G_s(x)||^2 - mu/2 ||x - y||^2.
/// When f_y is given it is used in place of F(y).
InequalitySides descent_lemma(const CompositeProblem& problem, double s, double mu,
                              const Vector& x, const Vector& y,
                              std::optional<double> f_y = std::nullopt);

/// Norm of (k+1)(x_{k+1}-y_{k+1}) - k(x_k-y_k) + (alpha-1)(x_{k+1}-x_k) + (k+alpha-1) s G_s(x_k).
double inertial_residual(double alpha, double s, std::size_t k, const Vector& x_k,
                         const Vector& y_k, const Vector& x_next, const Vector& y_next,
                         const Vector& G);

/// Per-iteration contraction obtained by combining the decrease and bound
/// estimates through comparison_rho: (1 + rho_k) E_{k+1} <= E_k.
struct Contraction {
  double rho_k = 0.0;
  double lhs = 0.0;  // (1 + rho_k) E_{k+1}
  double rhs = 0.0;  // E_k
};

/// rho_k = min a_i / b_i over the terms with b_i > 0 (zero if some such a_i is zero).
double per_iteration_rho(const EnergyContext& ctx, std::size_t k, const BoundParams& params = {});

Contraction contraction(const EnergyContext& ctx, std::size_t k, double energy_k,
                        double energy_next, const BoundParams& params = {});

/// Evaluates every applicable certificate on a trace with recorded iterates.
/// Non-monotone variants only get the descent lemma and, for apm, the
/// inertial identity; the rest are reported not applicable. Output is sorted
/// by (k, name).
std::vector<CertificateReport> certify_trace(const CompositeProblem& problem,
                                             const EnergyContext& ctx, const Trace& trace,
                                             const BoundParams& params = {});

/// Energies E_0..E_n of a recorded trace (mapm semantics).
std::vector<double> trace_energies(const EnergyContext& ctx, const Trace& trace);

}  // namespace proxcert
