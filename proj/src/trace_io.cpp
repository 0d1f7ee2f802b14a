#include "proxcert/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "proxcert/errors.hpp"

namespace proxcert {

using nlohmann::json;

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  auto res = std::to_chars(buf, buf + sizeof buf, v, 16);
  return std::string(buf, res.ptr);
}

std::uint64_t parse_hex64(std::string_view text) {
  std::uint64_t v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v, 16);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw TraceFormatError("bad problem hash '" + std::string(text) + "'");
  return v;
}

template <class Int>
Int parse_int(std::string_view text, std::string_view what) {
  Int v{};
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw TraceFormatError("bad " + std::string(what) + " '" + std::string(text) + "'");
  return v;
}

// Doubles in JSON: numbers when finite, the format_double string otherwise.
json real_json(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double json_real(const json& j, std::string_view what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_double(j.get<std::string>());
  throw TraceFormatError("field '" + std::string(what) + "' is not a number");
}

json vector_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(real_json(v[i]));
  return arr;
}

Vector vector_from_json(const json& j, Eigen::Index dim, std::string_view what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim)
    throw TraceFormatError("field '" + std::string(what) + "' must be an array of length " +
                           std::to_string(dim));
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = json_real(j[static_cast<std::size_t>(i)], what);
  return v;
}

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw TraceFormatError(std::string("missing field '") + key + "'");
  return *it;
}

std::map<std::string, std::string> parse_meta(std::string_view line) {
  if (line.substr(0, 2) != "# ") throw TraceFormatError("missing trace metadata line");
  std::map<std::string, std::string> meta;
  for (std::string_view tok : split(line.substr(2), ' ')) {
    if (tok.empty()) continue;
    const std::size_t eq = tok.find('=');
    if (eq == std::string_view::npos)
      throw TraceFormatError("bad metadata token '" + std::string(tok) + "'");
    meta.emplace(std::string(tok.substr(0, eq)), std::string(tok.substr(eq + 1)));
  }
  return meta;
}

const std::string& meta_get(const std::map<std::string, std::string>& meta, const char* key) {
  auto it = meta.find(key);
  if (it == meta.end()) throw TraceFormatError(std::string("missing metadata '") + key + "'");
  return it->second;
}

void fill_header(Trace& trace, const std::string& variant, double alpha, double step,
                 Eigen::Index dim, std::uint64_t hash) {
  auto v = parse_variant(variant);
  if (!v) throw TraceFormatError("unknown variant '" + variant + "'");
  if (dim < 0) throw TraceFormatError("negative dimension");
  trace.variant = *v;
  trace.alpha = alpha;
  trace.step = step;
  trace.dim = dim;
  trace.problem_hash = hash;
}

// --- CSV ---------------------------------------------------------------------------

void write_csv(std::ostream& os, const TraceFile& file) {
  const Trace& t = file.trace;
  const bool iterates = t.has_iterates();
  os << kCsvMagic << '\n';
  os << "# variant=" << to_string(t.variant) << " alpha=" << format_double(t.alpha)
     << " step=" << format_double(t.step) << " dim=" << t.dim
     << " problem_hash=" << hex64(t.problem_hash);
  if (file.problem)
    for (const auto& [key, value] : problem_fields(*file.problem))
      os << " problem_" << key << '=' << value;
  os << '\n';
  os << "k,f_y,gap,grad_map_norm,accepted,energy";
  if (iterates) {
    for (const char* prefix : {"x_", "y_", "G_"})
      for (Eigen::Index i = 0; i < t.dim; ++i) os << ',' << prefix << i;
  }
  os << '\n';
  for (const IterationRecord& r : t.records) {
    os << r.k << ',' << format_double(r.f_y) << ',' << (r.gap ? format_double(*r.gap) : "")
       << ',' << format_double(r.grad_map_norm) << ',' << (r.accepted ? 1 : 0) << ','
       << (r.energy ? format_double(*r.energy) : "");
    if (iterates) {
      for (const Vector* v : {&r.x, &r.y, &r.grad_map})
        for (Eigen::Index i = 0; i < t.dim; ++i) os << ',' << format_double((*v)[i]);
    }
    os << '\n';
  }
}

TraceFile read_csv(std::istream& is) {
  TraceFile file;
  std::string line;
  if (!std::getline(is, line)) throw TraceFormatError("missing metadata line");
  const auto meta = parse_meta(strip_cr(line));
  fill_header(file.trace, meta_get(meta, "variant"), parse_double(meta_get(meta, "alpha")),
              parse_double(meta_get(meta, "step")),
              parse_int<Eigen::Index>(meta_get(meta, "dim"), "dim"),
              parse_hex64(meta_get(meta, "problem_hash")));
  std::map<std::string, std::string> pfields;
  for (const auto& [key, value] : meta)
    if (key.rfind("problem_", 0) == 0 && key != "problem_hash") pfields[key.substr(8)] = value;
  if (!pfields.empty()) file.problem = problem_from_fields(pfields);

  if (!std::getline(is, line)) throw TraceFormatError("missing column header");
  const auto header = split(strip_cr(line), ',');
  static constexpr std::string_view base[] = {"k", "f_y", "gap", "grad_map_norm", "accepted",
                                               "energy"};
  if (header.size() < 6) throw TraceFormatError("column header too short");
  for (std::size_t i = 0; i < 6; ++i)
    if (header[i] != base[i])
      throw TraceFormatError("unexpected column '" + std::string(header[i]) + "'");
  const Eigen::Index dim = file.trace.dim;
  const bool iterates = header.size() > 6;
  if (iterates && header.size() != 6 + 3 * static_cast<std::size_t>(dim))
    throw TraceFormatError("iterate columns do not match dim");

  std::size_t lineno = 2;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string_view row = strip_cr(line);
    if (row.empty()) continue;
    const auto cells = split(row, ',');
    if (cells.size() != header.size())
      throw TraceFormatError("row " + std::to_string(lineno) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()));
    IterationRecord r;
    r.k = parse_int<std::size_t>(cells[0], "k");
    r.f_y = parse_double(cells[1]);
    if (!cells[2].empty()) r.gap = parse_double(cells[2]);
    r.grad_map_norm = parse_double(cells[3]);
    if (cells[4] != "0" && cells[4] != "1") throw TraceFormatError("bad accepted flag");
    r.accepted = cells[4] == "1";
    if (!cells[5].empty()) r.energy = parse_double(cells[5]);
    if (iterates) {
      r.x.resize(dim);
      r.y.resize(dim);
      r.grad_map.resize(dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        r.x[i] = parse_double(cells[6 + i]);
        r.y[i] = parse_double(cells[6 + dim + i]);
        r.grad_map[i] = parse_double(cells[6 + 2 * dim + i]);
      }
    }
    file.trace.records.push_back(std::move(r));
  }
  return file;
}

// --- JSON lines --------------------------------------------------------------------

void write_jsonl(std::ostream& os, const TraceFile& file) {
  const Trace& t = file.trace;
  const bool iterates = t.has_iterates();
  json head = {{"schema_version", kSchemaVersion},
               {"type", "header"},
               {"variant", std::string(to_string(t.variant))},
               {"alpha", real_json(t.alpha)},
               {"step", real_json(t.step)},
               {"dim", t.dim},
               {"problem_hash", hex64(t.problem_hash)}};
  if (file.problem) head["problem"] = problem_fields(*file.problem);
  os << head.dump() << '\n';
  for (const IterationRecord& r : t.records) {
    json row = {{"schema_version", kSchemaVersion},
                {"type", "record"},
                {"k", r.k},
                {"f_y", real_json(r.f_y)},
                {"gap", r.gap ? real_json(*r.gap) : json(nullptr)},
                {"grad_map_norm", real_json(r.grad_map_norm)},
                {"accepted", r.accepted},
                {"energy", r.energy ? real_json(*r.energy) : json(nullptr)}};
    if (iterates) {
      row["x"] = vector_json(r.x);
      row["y"] = vector_json(r.y);
      row["grad_map"] = vector_json(r.grad_map);
    }
    os << row.dump() << '\n';
  }
}

void check_schema(const json& obj) {
  const json& v = require(obj, "schema_version");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
    throw TraceFormatError("unsupported schema_version " + v.dump() + " (expected " +
                           std::to_string(kSchemaVersion) + ")");
}

json parse_json_line(std::string_view line, std::size_t lineno) {
  json obj = json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object())
    throw TraceFormatError("line " + std::to_string(lineno) + " is not a JSON object");
  check_schema(obj);
  return obj;
}

TraceFile read_jsonl(std::string_view first, std::istream& is) {
  TraceFile file;
  const json head = parse_json_line(first, 1);
  if (require(head, "type") != "header") throw TraceFormatError("first line must be the header");
  try {
    fill_header(file.trace, require(head, "variant").get<std::string>(),
                json_real(require(head, "alpha"), "alpha"),
                json_real(require(head, "step"), "step"),
                require(head, "dim").get<Eigen::Index>(),
                parse_hex64(require(head, "problem_hash").get<std::string>()));
    if (auto it = head.find("problem"); it != head.end())
      file.problem = problem_from_fields(it->get<std::map<std::string, std::string>>());
  } catch (const json::exception& e) {
    throw TraceFormatError(std::string("bad header: ") + e.what());
  }

  const Eigen::Index dim = file.trace.dim;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string_view text = strip_cr(line);
    if (text.empty()) continue;
    const json row = parse_json_line(text, lineno);
    if (require(row, "type") != "record")
      throw TraceFormatError("line " + std::to_string(lineno) + " is not a record");
    IterationRecord r;
    try {
      r.k = require(row, "k").get<std::size_t>();
      r.f_y = json_real(require(row, "f_y"), "f_y");
      if (const json& g = require(row, "gap"); !g.is_null()) r.gap = json_real(g, "gap");
      r.grad_map_norm = json_real(require(row, "grad_map_norm"), "grad_map_norm");
      r.accepted = require(row, "accepted").get<bool>();
      if (const json& e = require(row, "energy"); !e.is_null()) r.energy = json_real(e, "energy");
    } catch (const json::exception& e) {
      throw TraceFormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (row.contains("x")) {
      r.x = vector_from_json(row["x"], dim, "x");
      r.y = vector_from_json(require(row, "y"), dim, "y");
      r.grad_map = vector_from_json(require(row, "grad_map"), dim, "grad_map");
    }
    file.trace.records.push_back(std::move(r));
  }
  return file;
}

}  // namespace

std::optional<TraceFormat> parse_trace_format(std::string_view name) {
  if (name == "csv") return TraceFormat::csv;
  if (name == "jsonl" || name == "json-lines") return TraceFormat::jsonl;
  return std::nullopt;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw TraceFormatError("bad number '" + std::string(text) + "'");
  return v;
}

void write_trace(std::ostream& os, const TraceFile& file, TraceFormat format) {
  if (format == TraceFormat::csv)
    write_csv(os, file);
  else
    write_jsonl(os, file);
}

TraceFile read_trace(std::istream& is) {
  std::string first;
  if (!std::getline(is, first)) throw TraceFormatError("empty trace file");
  const std::string_view line = strip_cr(first);
  if (line == kCsvMagic) return read_csv(is);
  if (line.rfind("# proxcert-trace", 0) == 0)
    throw TraceFormatError("unsupported trace version '" + std::string(line) + "' (expected '" +
                           std::string(kCsvMagic) + "')");
  if (!line.empty() && line.front() == '{') return read_jsonl(line, is);
  throw TraceFormatError("not a proxcert trace");
}

void write_reports(std::ostream& os, const std::vector<CertificateReport>& reports) {
  os << "k,name,lhs,rhs,slack,status\n";
  for (const CertificateReport& r : reports)
    os << r.k << ',' << to_string(r.name) << ',' << format_double(r.lhs) << ','
       << format_double(r.rhs) << ',' << format_double(r.slack) << ',' << to_string(r.verdict)
       << '\n';
}

void write_comparison(std::ostream& os, const ComparisonTable& table, TraceFormat format) {
  const std::size_t n = table.rows();
  if (format == TraceFormat::csv) {
    os << 'k';
    for (const std::string& label : table.labels) os << ',' << label;
    os << '\n';
    for (std::size_t k = 0; k < n; ++k) {
      os << k;
      for (const auto& g : table.gaps) os << ',' << (k < g.size() ? format_double(g[k]) : "");
      os << '\n';
    }
    return;
  }
  for (std::size_t k = 0; k < n; ++k) {
    json gaps = json::object();
    for (std::size_t j = 0; j < table.labels.size(); ++j)
      gaps[table.labels[j]] = k < table.gaps[j].size() ? real_json(table.gaps[j][k]) : json(nullptr);
    os << json{{"schema_version", kSchemaVersion}, {"k", k}, {"gap", gaps}}.dump() << '\n';
  }
}

void write_comparison_summary(std::ostream& os, const ComparisonTable& table) {
  json solvers = json::array();
  for (std::size_t j = 0; j < table.labels.size(); ++j) {
    const SolverConfig& c = table.configs[j];
    json entry = {{"label", table.labels[j]},
                  {"variant", std::string(to_string(c.variant))},
                  {"alpha", real_json(c.alpha)},
                  {"step", real_json(c.step)},
                  {"iterations", table.gaps[j].empty() ? 0 : table.gaps[j].size() - 1}};
    if (const auto& fit = table.fits[j]) {
      entry["rho_hat"] = real_json(fit->rho_hat);
      entry["fit_method"] = fit->endpoint ? "endpoint" : "regression";
      entry["r_squared"] = fit->endpoint ? json(nullptr) : real_json(fit->r_squared);
      entry["fit_window"] = {fit->window.begin, fit->window.end};
    } else {
      entry["rho_hat"] = nullptr;
    }
    solvers.push_back(std::move(entry));
  }
  json summary = {{"schema_version", kSchemaVersion},
                  {"f_star", real_json(table.f_star)},
                  {"rho_lower_bound", real_json(table.rho_lower_bound)},
                  {"sqrt_mu_over_l", real_json(table.sqrt_mu_over_l)},
                  {"solvers", std::move(solvers)}};
  os << summary.dump(2) << '\n';
}

std::map<std::string, std::string> problem_fields(const ProblemSpec& spec) {
  return {{"kind", std::string(to_string(spec.kind))},
          {"dim", std::to_string(spec.dim)},
          {"rows", std::to_string(spec.rows)},
          {"cond", format_double(spec.cond)},
          {"lam", format_double(spec.lam)},
          {"seed", std::to_string(spec.seed)}};
}

ProblemSpec problem_from_fields(const std::map<std::string, std::string>& fields) {
  auto get = [&](const char* key) -> const std::string& {
    auto it = fields.find(key);
    if (it == fields.end())
      throw TraceFormatError(std::string("problem description lacks '") + key + "'");
    return it->second;
  };
  ProblemSpec spec;
  const auto kind = parse_problem_kind(get("kind"));
  if (!kind) throw TraceFormatError("unknown problem kind '" + get("kind") + "'");
  spec.kind = *kind;
  spec.dim = parse_int<Eigen::Index>(get("dim"), "dim");
  spec.rows = parse_int<Eigen::Index>(get("rows"), "rows");
  spec.cond = parse_double(get("cond"));
  spec.lam = parse_double(get("lam"));
  spec.seed = parse_int<std::uint64_t>(get("seed"), "seed");
  return spec;
}

}  // namespace proxcert
