#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "proxcert/harness.hpp"
#include "proxcert/trace.hpp"

namespace proxcert {

enum class TraceFormat { csv, jsonl };

std::optional<TraceFormat> parse_trace_format(std::string_view name);

inline constexpr std::string_view kCsvMagic = "# proxcert-trace v1";
inline constexpr int kSchemaVersion = 1;

/// Shortest decimal that parses back to the same double ("inf", "-inf",
/// "nan" for non-finite values).
std::string format_double(double v);
double parse_double(std::string_view text);

/// Trace plus the generator parameters of the problem it was run on, so a
/// file can be certified without restating the problem.
struct TraceFile {
  Trace trace;
  std::optional<ProblemSpec> problem;
};

/// CSV layout:
///   # proxcert-trace v1
///   # variant=mapm alpha=3 step=0.5 dim=2 problem_hash=<hex> [problem=... ]
///   k,f_y,gap,grad_map_norm,accepted,energy[,x_0..,y_0..,G_0..]
/// JSON lines: a header object, then one object per record; every line has
/// schema_version.
void write_trace(std::ostream& os, const TraceFile& file, TraceFormat format);

/// Detects the format from the first line. Throws TraceFormatError on
/// version mismatches or malformed rows.
TraceFile read_trace(std::istream& is);

/// One line per report: k,name,lhs,rhs,slack,status.
void write_reports(std::ostream& os, const std::vector<CertificateReport>& reports);

/// Rows k with one gap column per solver.
void write_comparison(std::ostream& os, const ComparisonTable& table, TraceFormat format);

/// rho_hat per solver, rho_lower_bound and sqrt(mu/L).
void write_comparison_summary(std::ostream& os, const ComparisonTable& table);

/// key=value pairs of a problem spec, as used in trace headers.
std::map<std::string, std::string> problem_fields(const ProblemSpec& spec);
ProblemSpec problem_from_fields(const std::map<std::string, std::string>& fields);

}  // namespace proxcert
