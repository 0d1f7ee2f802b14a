#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proxcert/kernels.hpp"

namespace proxcert {

enum class Variant { ista, apm, mapm, strongly_convex_apm };

std::string_view to_string(Variant v);
/// Accepts "strongly_convex_apm" and "strongly-convex-apm".
std::optional<Variant> parse_variant(std::string_view name);

enum class CertName {
  energy_nonincreasing,
  prop1,
  prop2,
  descent_lemma,
  inertial_identity,
  theorem1_envelope,
  theorem2_envelope,
};

std::string_view to_string(CertName n);
std::optional<CertName> parse_cert_name(std::string_view name);

enum class Verdict { pass, fail, not_applicable };

std::string_view to_string(Verdict v);

struct CertificateReport {
  std::size_t k = 0;
  CertName name = CertName::energy_nonincreasing;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  Verdict verdict = Verdict::not_applicable;

  bool pass() const { return verdict == Verdict::pass; }
  bool applicable() const { return verdict != Verdict::not_applicable; }
};

/// One row of a run trace. `accepted` tells whether y_k came from the prox
/// point of the previous step (always true except for rejected mapm steps).
struct IterationRecord {
  std::size_t k = 0;
  double f_y = 0.0;
  std::optional<double> gap;
  double grad_map_norm = 0.0;
  bool accepted = true;
  std::optional<double> energy;
  std::vector<CertificateReport> certificates;

  // Present only when iterates are recorded.
  Vector x;
  Vector y;
  Vector grad_map;
};

struct Trace {
  Variant variant = Variant::mapm;
  double alpha = 3.0;
  double step = 0.0;
  Eigen::Index dim = 0;
  std::uint64_t problem_hash = 0;
  std::vector<IterationRecord> records;

  bool has_iterates() const;
};

}  // namespace proxcert
