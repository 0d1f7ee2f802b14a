#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "proxcert/cli.hpp"
#include "proxcert/trace_io.hpp"

using namespace proxcert;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "proxcert");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string tmp(const std::string& name) { return std::string(PROXCERT_TEST_TMPDIR) + "/" + name; }

// Runs the installed binary through the shell and returns its exit status.
int shell(const std::string& args) {
  const std::string cmd = std::string(PROXCERT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("run writes one row per iteration") {
  const Result r = cli({"run", "--problem", "quadratic", "--cond", "100", "--dim", "20", "--seed", "1",
                        "--solver", "mapm", "--alpha", "3", "--step-mode", "half-inverse-L",
                        "--max-iters", "1000"});
  REQUIRE(r.code == 0);
  std::stringstream ss(r.out);
  const TraceFile t = read_trace(ss);
  CHECK(t.trace.records.size() == 1001);
  CHECK(t.trace.records.back().k == 1000);
  CHECK(t.trace.records.back().gap);
  CHECK(t.trace.records.back().energy);
  CHECK(count_lines(r.out) == 1004);
}

TEST_CASE("run edge cases") {
  const Result zero = cli({"run", "--max-iters", "0"});
  REQUIRE(zero.code == 0);
  std::stringstream ss(zero.out);
  CHECK(read_trace(ss).trace.records.size() == 1);

  const Result big_step = cli({"run", "--problem", "quadratic", "--step-mode", "explicit:2.0"});
  CHECK(big_step.code == 2);
  CHECK(big_step.err.find("exceeds 1/L") != std::string::npos);

  const Result bad_problem = cli({"run", "--problem", "banana"});
  CHECK(bad_problem.code == 2);
  CHECK(bad_problem.err.find("quadratic, lasso, box-quadratic, suite") != std::string::npos);

  const Result bad_solver = cli({"run", "--solver", "fista"});
  CHECK(bad_solver.code == 2);
  CHECK(bad_solver.err.find("ista, apm, mapm, strongly_convex_apm") != std::string::npos);

  CHECK(cli({"run", "--step-mode", "sometimes"}).code == 2);
  CHECK(cli({"run", "--alpha", "2"}).code == 2);
  CHECK(cli({"run", "--format", "xml"}).code == 2);
  CHECK(cli({"run", "--problem", "suite", "--index", "999"}).code == 2);
  CHECK(cli({"run", "--no-such-flag"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"run", "--solver", "strongly_convex_apm", "--problem", "lasso", "--rows", "5"}).code == 2);
}

TEST_CASE("certify a mapm trace on a strongly convex suite problem") {
  const std::string trace = tmp("cli_sc.csv");
  const std::string report = tmp("cli_sc_report.csv");
  REQUIRE(cli({"run", "--problem", "suite", "--index", "7", "--record-iterates", "--max-iters", "300",
               "-o", trace})
              .code == 0);
  const Result r = cli({"certify", trace, "--report", report});
  CHECK(r.code == 0);
  const std::string rep = slurp(report);
  CHECK(rep.rfind("k,name,lhs,rhs,slack,status\n", 0) == 0);
  CHECK(rep.find(",fail\n") == std::string::npos);
  CHECK(rep.find("theorem1_envelope") != std::string::npos);

  // The same problem given explicitly.
  CHECK(cli({"certify", "--trace", trace, "--problem", "suite", "--index", "7"}).code == 0);
  // A different problem is a configuration error.
  CHECK(cli({"certify", trace, "--problem", "suite", "--index", "8"}).code == 2);
}

TEST_CASE("certify fault injection") {
  const std::string trace = tmp("cli_fault.jsonl");
  REQUIRE(cli({"run", "--problem", "quadratic", "--cond", "10", "--record-iterates", "--format",
               "jsonl", "--max-iters", "200", "-o", trace})
              .code == 0);
  // F* too high: gaps go negative.
  const Result high = cli({"certify", trace, "--fstar-shift", "1e-3"});
  CHECK(high.code == 1);
  CHECK(high.err.find("data corruption") != std::string::npos);
  // F* too low: an inequality breaks and the first violation is named.
  const Result low = cli({"certify", trace, "--fstar-shift", "-1e-3"});
  CHECK(low.code == 1);
  CHECK(low.err.find("certificate violation: k=") != std::string::npos);

  const std::string fat = tmp("cli_fat.csv");
  REQUIRE(cli({"run", "--problem", "lasso", "--dim", "100", "--rows", "50", "--record-iterates",
               "--max-iters", "50", "-o", fat})
              .code == 0);
  const Result unavailable = cli({"certify", fat, "--reference-budget", "1000"});
  CHECK(unavailable.code == 3);
  CHECK(unavailable.err.find("reference unavailable") != std::string::npos);
}

TEST_CASE("certify refuses traces it cannot check") {
  const std::string bare = tmp("cli_bare.csv");
  REQUIRE(cli({"run", "--max-iters", "10", "-o", bare}).code == 0);
  CHECK(cli({"certify", bare}).code == 2);
  CHECK(cli({"certify", tmp("does_not_exist.csv")}).code == 2);
  {
    std::ofstream f(tmp("cli_v2.csv"));
    f << "# proxcert-trace v2\n";
  }
  CHECK(cli({"certify", tmp("cli_v2.csv")}).code == 2);
}

TEST_CASE("apm traces: theorem certificates not applicable") {
  const std::string trace = tmp("cli_apm.csv");
  REQUIRE(cli({"run", "--solver", "apm", "--record-iterates", "--max-iters", "100", "-o", trace})
              .code == 0);
  const Result r = cli({"certify", trace});
  CHECK(r.code == 0);
  CHECK(r.out.find("theorem1_envelope,0,0,0,not_applicable") != std::string::npos);
  CHECK(r.out.find("inertial_identity") != std::string::npos);
  CHECK(r.out.find("descent_lemma") != std::string::npos);
}

TEST_CASE("compare") {
  const std::string table = tmp("cli_cmp.csv");
  const Result r = cli({"compare", "--problem", "quadratic", "--cond", "100", "--solvers",
                        "ista,apm,mapm", "-o", table});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(table);
  CHECK(csv.rfind("k,ista,apm,mapm\n", 0) == 0);
  const std::string summary = slurp(table + ".summary.json");
  CHECK(summary.find("\"rho_lower_bound\"") != std::string::npos);
  CHECK(summary.find("\"sqrt_mu_over_l\"") != std::string::npos);
  CHECK(summary.find("\"rho_hat\"") != std::string::npos);

  const Result jl = cli({"compare", "--spec", "solver=apm", "--spec", "solver=mapm,alpha=4",
                         "--format", "jsonl", "--max-iters", "20", "--summary", tmp("s.json")});
  REQUIRE(jl.code == 0);
  std::stringstream ss(jl.out);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(ss, line)) {
    CHECK(line.find("\"schema_version\":1") != std::string::npos);
    CHECK(line.find("\"gap\":{\"apm\":") != std::string::npos);
    ++rows;
  }
  CHECK(rows == 21);

  CHECK(cli({"compare", "--solvers", "mapm"}).code == 2);
  CHECK(cli({"compare", "--spec", "solver=mapm", "--spec", "solver=apm,seed=3"}).code == 2);
  CHECK(cli({"compare", "--spec", "solver=mapm", "--spec", "color=blue"}).code == 2);
  CHECK(cli({"compare", "--solvers", "mapm,nope"}).code == 2);
}

TEST_CASE("PROXCERT_SEED overrides --seed") {
  const Result a = cli({"run", "--max-iters", "3", "--seed", "5"});
  ::setenv("PROXCERT_SEED", "5", 1);
  const Result b = cli({"run", "--max-iters", "3", "--seed", "99"});
  ::setenv("PROXCERT_SEED", "not-a-number", 1);
  const Result bad = cli({"run", "--max-iters", "3"});
  ::unsetenv("PROXCERT_SEED");
  CHECK(a.out == b.out);
  CHECK(bad.code == 2);
}

TEST_CASE("black-box exit codes and determinism") {
  const std::string a = tmp("bb_a.csv");
  const std::string b = tmp("bb_b.csv");
  CHECK(shell("run --problem lasso --dim 20 --rows 10 --record-iterates --max-iters 200 -o " + a) == 0);
  CHECK(shell("run --problem lasso --dim 20 --rows 10 --record-iterates --max-iters 200 -o " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(shell("certify " + a) == 0);
  CHECK(shell("certify " + a + " --fstar-shift 1") == 1);
  CHECK(shell("run --step-mode explicit:2.0") == 2);
  CHECK(shell("compare --solvers mapm") == 2);
  CHECK(shell("certify " + a + " --reference-budget 1000") == 3);
  CHECK(shell("--help") == 0);
}
