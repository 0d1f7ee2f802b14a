#include "proxcert/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "proxcert/certificates.hpp"
#include "proxcert/errors.hpp"
#include "proxcert/harness.hpp"
#include "proxcert/solvers.hpp"
#include "proxcert/trace_io.hpp"

namespace proxcert {

namespace {

constexpr const char* kProblemNames = "quadratic, lasso, box-quadratic, suite";
constexpr const char* kSolverNames = "ista, apm, mapm, strongly_convex_apm";

struct ProblemOptions {
  std::string name = "quadratic";
  ProblemSpec spec;
  std::size_t index = 0;
};

struct SolverOptions {
  std::string solver = "mapm";
  double alpha = 3.0;
  std::string step_mode = "half-inverse-L";
  std::size_t max_iters = 1000;
  double tol = 0.0;
};

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-')
    throw ConfigError("invalid " + what + " '" + text + "'");
  return v;
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    return parse_double(text);
  } catch (const TraceFormatError&) {
    throw ConfigError("invalid " + what + " '" + text + "'");
  }
}

ProblemSpec resolve_problem(const ProblemOptions& opts) {
  ProblemSpec spec = opts.spec;
  if (const char* env = std::getenv("PROXCERT_SEED"); env && *env)
    spec.seed = parse_u64(env, "PROXCERT_SEED");
  if (opts.name == "suite") {
    const auto specs = suite_specs(spec.seed);
    if (opts.index >= specs.size())
      throw ConfigError("suite index " + std::to_string(opts.index) + " out of range (suite has " +
                        std::to_string(specs.size()) + " problems)");
    return specs[opts.index];
  }
  const auto kind = parse_problem_kind(opts.name);
  if (!kind)
    throw ConfigError("unknown problem '" + opts.name + "'; valid problems: " + kProblemNames);
  spec.kind = *kind;
  return spec;
}

Variant resolve_variant(const std::string& name) {
  const auto v = parse_variant(name);
  if (!v) throw ConfigError("unknown solver '" + name + "'; valid solvers: " + kSolverNames);
  return *v;
}

double resolve_step(const std::string& mode, const CompositeProblem& problem) {
  if (mode == "half-inverse-L") return half_inverse_step(problem);
  if (mode == "inverse-L") {
    if (!(problem.lipschitz() > 0.0)) throw ConfigError("s = 1/L needs L > 0");
    return 1.0 / problem.lipschitz();
  }
  constexpr std::string_view prefix = "explicit:";
  if (mode.rfind(prefix, 0) == 0) {
    const double s = parse_real(mode.substr(prefix.size()), "step size");
    if (!(s > 0.0)) throw ConfigError("explicit step size must be positive");
    return s;
  }
  throw ConfigError("unknown step mode '" + mode +
                    "'; valid modes: half-inverse-L, inverse-L, explicit:<value>");
}

SolverConfig resolve_solver(const SolverOptions& opts, const CompositeProblem& problem) {
  SolverConfig cfg;
  cfg.variant = resolve_variant(opts.solver);
  cfg.alpha = opts.alpha;
  cfg.step = resolve_step(opts.step_mode, problem);
  cfg.max_iters = opts.max_iters;
  cfg.grad_map_tol = opts.tol;
  validate_config(problem, cfg);
  return cfg;
}

void add_problem_options(CLI::App& app, ProblemOptions& p) {
  app.add_option("--problem", p.name, std::string("Problem generator: ") + kProblemNames)
      ->capture_default_str();
  app.add_option("--dim", p.spec.dim, "Dimension")->capture_default_str();
  app.add_option("--rows", p.spec.rows, "Rows of A for lasso (0 = square)")->capture_default_str();
  app.add_option("--cond", p.spec.cond, "Condition number L/mu")->capture_default_str();
  app.add_option("--lam", p.spec.lam, "l1 weight for lasso")->capture_default_str();
  app.add_option("--seed", p.spec.seed, "Generator seed (PROXCERT_SEED overrides)")
      ->capture_default_str();
  app.add_option("--index", p.index, "Instance index when --problem suite")->capture_default_str();
}

void add_solver_options(CLI::App& app, SolverOptions& s) {
  app.add_option("--solver", s.solver, std::string("Solver: ") + kSolverNames)
      ->capture_default_str();
  app.add_option("--alpha", s.alpha, "Momentum parameter (>= 3)")->capture_default_str();
  app.add_option("--step-mode", s.step_mode, "half-inverse-L, inverse-L or explicit:<value>")
      ->capture_default_str();
  app.add_option("--max-iters", s.max_iters, "Iteration budget")->capture_default_str();
  app.add_option("--tol", s.tol, "Stop when the gradient mapping norm is <= tol")
      ->capture_default_str();
}

TraceFormat resolve_format(const std::string& name) {
  const auto f = parse_trace_format(name);
  if (!f) throw ConfigError("unknown format '" + name + "'; valid formats: csv, jsonl");
  return *f;
}

// Writes to the file when a path is given, else to the fallback stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot open '" + path + "' for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

CompositeProblem attach_reference(const CompositeProblem& problem, std::size_t budget) {
  if (problem.known_minimizer() && problem.known_optimum()) return problem;
  return with_reference(problem, reference_solution(problem, budget));
}

// --- run -----------------------------------------------------------------------------

struct RunArgs {
  ProblemOptions problem;
  SolverOptions solver;
  std::string output;
  std::string format = "csv";
  bool record_iterates = false;
  bool no_reference = false;
  std::size_t reference_budget = 200000;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  const TraceFormat format = resolve_format(a.format);
  const ProblemSpec spec = resolve_problem(a.problem);
  CompositeProblem problem = make_problem(spec);
  SolverConfig cfg = resolve_solver(a.solver, problem);
  cfg.record_iterates = a.record_iterates;

  if (!a.no_reference) {
    try {
      problem = attach_reference(problem, a.reference_budget);
      cfg.record_certificates = true;  // fills the energy column
    } catch (const ReferenceUnavailable& e) {
      err << "warning: " << e.what() << "; gap and energy columns left empty\n";
    }
  }

  TraceFile file{run(problem, cfg, Vector::Zero(problem.dim())), spec};
  Sink sink(a.output, out);
  write_trace(sink.get(), file, format);
  return kExitOk;
}

// --- certify -------------------------------------------------------------------------

struct CertifyArgs {
  ProblemOptions problem;
  std::string trace_path;
  std::string report;
  std::size_t reference_budget = 200000;
  double fstar_shift = 0.0;
};

int cmd_certify(const CertifyArgs& a, bool problem_given, std::ostream& out, std::ostream& err) {
  std::ifstream in(a.trace_path);
  if (!in) throw ConfigError("cannot open trace '" + a.trace_path + "'");
  const TraceFile file = read_trace(in);
  if (!file.trace.has_iterates())
    throw ConfigError("trace has no recorded iterates; rerun with --record-iterates");

  ProblemSpec spec;
  if (problem_given) {
    spec = resolve_problem(a.problem);
  } else if (file.problem) {
    spec = *file.problem;
  } else {
    throw ConfigError("trace does not describe its problem; pass --problem and its parameters");
  }
  const CompositeProblem problem = make_problem(spec);
  if (file.trace.problem_hash != problem.content_hash())
    throw ConfigError("trace was produced on a different problem than " + spec.label());

  const ReferenceSolution ref = reference_solution(problem, a.reference_budget);
  const CompositeProblem bound = with_reference(problem, ref);
  const Trace& trace = file.trace;
  const bool accelerated = trace.variant == Variant::apm || trace.variant == Variant::mapm;
  const EnergyContext ctx =
      EnergyContext::make(accelerated ? trace.alpha : 3.0, trace.step, bound.strong_convexity(),
                          bound.lipschitz(), ref.x_star, ref.f_star + a.fstar_shift);

  const std::vector<CertificateReport> reports = certify_trace(bound, ctx, trace);
  Sink sink(a.report, out);
  write_reports(sink.get(), reports);

  for (const CertificateReport& r : reports) {
    if (r.verdict == Verdict::fail) {
      err << "certificate violation: k=" << r.k << " name=" << to_string(r.name)
          << " lhs=" << format_double(r.lhs) << " rhs=" << format_double(r.rhs)
          << " slack=" << format_double(r.slack) << '\n';
      return kExitViolation;
    }
  }
  return kExitOk;
}

// --- compare -------------------------------------------------------------------------

struct CompareArgs {
  ProblemOptions problem;
  SolverOptions solver;
  std::string solvers;
  std::vector<std::string> specs;
  std::string output;
  std::string summary;
  std::string format = "csv";
};

// Applies "key=value,key=value" overrides to copies of the base options.
void apply_overrides(const std::string& text, ProblemOptions& p, SolverOptions& s) {
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("spec entry '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "solver") s.solver = value;
    else if (key == "alpha") s.alpha = parse_real(value, "alpha");
    else if (key == "step-mode") s.step_mode = value;
    else if (key == "max-iters") s.max_iters = parse_u64(value, "max-iters");
    else if (key == "tol") s.tol = parse_real(value, "tol");
    else if (key == "problem") p.name = value;
    else if (key == "dim") p.spec.dim = static_cast<Eigen::Index>(parse_u64(value, "dim"));
    else if (key == "rows") p.spec.rows = static_cast<Eigen::Index>(parse_u64(value, "rows"));
    else if (key == "cond") p.spec.cond = parse_real(value, "cond");
    else if (key == "lam") p.spec.lam = parse_real(value, "lam");
    else if (key == "seed") p.spec.seed = parse_u64(value, "seed");
    else if (key == "index") p.index = parse_u64(value, "index");
    else
      throw ConfigError("unknown spec key '" + key +
                        "'; valid keys: solver, alpha, step-mode, max-iters, tol, problem, dim, "
                        "rows, cond, lam, seed, index");
  }
}

bool same_problem(const ProblemSpec& a, const ProblemSpec& b) {
  return a.kind == b.kind && a.dim == b.dim && a.rows == b.rows && a.cond == b.cond &&
         a.lam == b.lam && a.seed == b.seed;
}

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream&) {
  const TraceFormat format = resolve_format(a.format);
  std::vector<std::pair<ProblemOptions, SolverOptions>> entries;
  if (!a.solvers.empty()) {
    std::stringstream ss(a.solvers);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (name.empty()) continue;
      SolverOptions s = a.solver;
      s.solver = name;
      entries.emplace_back(a.problem, s);
    }
  }
  for (const std::string& text : a.specs) {
    ProblemOptions p = a.problem;
    SolverOptions s = a.solver;
    apply_overrides(text, p, s);
    entries.emplace_back(p, s);
  }
  if (entries.size() < 2)
    throw ConfigError("compare needs at least two solver specs (got " +
                      std::to_string(entries.size()) + ")");

  const ProblemSpec spec = resolve_problem(entries.front().first);
  for (const auto& [p, s] : entries)
    if (!same_problem(resolve_problem(p), spec))
      throw ConfigError("compare specs refer to different problems: " + spec.label() + " vs " +
                        resolve_problem(p).label());

  const CompositeProblem problem = make_problem(spec);
  std::vector<SolverConfig> configs;
  for (const auto& [p, s] : entries) configs.push_back(resolve_solver(s, problem));

  const ComparisonTable table = compare_solvers(problem, configs, Vector::Zero(problem.dim()));
  {
    Sink sink(a.output, out);
    write_comparison(sink.get(), table, format);
  }
  std::string summary_path = a.summary;
  if (summary_path.empty() && !a.output.empty()) summary_path = a.output + ".summary.json";
  Sink sink(summary_path, out);
  write_comparison_summary(sink.get(), table);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Accelerated proximal gradient solvers with per-iteration certificates",
               "proxcert"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a solver and write its trace");
  add_problem_options(*run_cmd, run_args.problem);
  add_solver_options(*run_cmd, run_args.solver);
  run_cmd->add_option("--output,-o", run_args.output, "Trace path (default: stdout)");
  run_cmd->add_option("--format", run_args.format, "csv or jsonl")->capture_default_str();
  run_cmd->add_flag("--record-iterates", run_args.record_iterates,
                    "Store x_k, y_k and G_s(x_k) (needed by certify)");
  run_cmd->add_flag("--no-reference", run_args.no_reference,
                    "Skip the reference solve; gap and energy stay empty");
  run_cmd->add_option("--reference-budget", run_args.reference_budget,
                      "Iteration budget of the reference solve")
      ->capture_default_str();

  CertifyArgs cert_args;
  CLI::App* cert_cmd = app.add_subcommand("certify", "Check every certificate on a trace");
  cert_cmd->add_option("--trace,trace", cert_args.trace_path, "Trace written by run")->required();
  add_problem_options(*cert_cmd, cert_args.problem);
  cert_cmd->add_option("--report", cert_args.report, "Report path (default: stdout)");
  cert_cmd->add_option("--reference-budget", cert_args.reference_budget,
                       "Iteration budget of the reference solve")
      ->capture_default_str();
  cert_cmd->add_option("--fstar-shift", cert_args.fstar_shift,
                       "Add this offset to the reference optimum (fault injection)")
      ->capture_default_str();

  CompareArgs cmp_args;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "Run several solvers on one problem");
  add_problem_options(*cmp_cmd, cmp_args.problem);
  add_solver_options(*cmp_cmd, cmp_args.solver);
  cmp_cmd->add_option("--solvers", cmp_args.solvers, "Comma-separated solver names");
  cmp_cmd->add_option("--spec", cmp_args.specs,
                      "Solver spec key=value[,key=value...]; repeatable");
  cmp_cmd->add_option("--output,-o", cmp_args.output, "Gap table path (default: stdout)");
  cmp_cmd->add_option("--summary", cmp_args.summary,
                      "Summary JSON path (default: <output>.summary.json or stdout)");
  cmp_cmd->add_option("--format", cmp_args.format, "csv or jsonl")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run_args, out, err);
    if (*cert_cmd) {
      const bool problem_given = cert_cmd->count("--problem") > 0 || cert_cmd->count("--dim") > 0 ||
                                 cert_cmd->count("--rows") > 0 || cert_cmd->count("--cond") > 0 ||
                                 cert_cmd->count("--lam") > 0 || cert_cmd->count("--seed") > 0 ||
                                 cert_cmd->count("--index") > 0;
      return cmd_certify(cert_args, problem_given, out, err);
    }
    if (*cmp_cmd) return cmd_compare(cmp_args, out, err);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TraceFormatError& e) {
    err << "trace format error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataCorruption& e) {
    err << "data corruption: " << e.what() << '\n';
    return kExitViolation;
  } catch (const ReferenceUnavailable& e) {
    err << "reference unavailable: " << e.what() << '\n';
    return kExitReference;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace proxcert
