#include "magnon/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "magnon/chern.hpp"
#include "magnon/deformation.hpp"
#include "magnon/errors.hpp"
#include "magnon/harper.hpp"
#include "magnon/momentum.hpp"
#include "magnon/spectra.hpp"

namespace magnon {

namespace {

namespace fs = std::filesystem;

const std::vector<std::pair<Command, std::string>> kCommands = {
    {Command::Spectrum, "spectrum"}, {Command::Chern, "chern"},   {Command::Table1, "table1"},
    {Command::Butterfly, "butterfly"}, {Command::Edges, "edges"}, {Command::Effective, "effective"},
    {Command::Deform, "deform"},     {Command::DSweep, "dsweep"},
};

const std::set<std::string> kKeys = {"J",       "Delta",     "lambda",     "beta_p",      "beta_q",    "delta",
                                     "B0",      "L",         "N",          "bc",          "command",   "n_delta",
                                     "n_eta",   "max_q",     "edge_window", "threshold",  "bound_only", "long",
                                     "output"};

const std::vector<std::string> kRequired = {"Delta", "lambda", "beta_p", "beta_q", "L"};

struct Entry {
  std::string value;
  int line;   // 0 for command-line overrides
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const Entry& e, const std::string& what) {
  const std::string message = key + ": " + what + ", got '" + e.value + "'";
  if (e.line > 0) throw ParseError(message, e.line);
  throw ValidationError(message);
}

double parse_number(const std::string& text, bool& ok) {
  std::size_t used = 0;
  ok = false;
  try {
    const double v = std::stod(text, &used);
    ok = used == text.size();
    return v;
  } catch (const std::exception&) {
    return 0.0;
  }
}

// Plain numbers, or multiples of pi written as [c][*]pi[/d].
double parse_real(const std::string& key, const Entry& e) {
  std::string s;
  for (char c : e.value) {
    if (c != ' ') s += c;
  }
  bool ok = false;
  const auto pi = s.find("pi");
  if (pi == std::string::npos) {
    const double v = parse_number(s, ok);
    if (!ok) bad_value(key, e, "expected a number");
    return v;
  }
  std::string head = s.substr(0, pi);
  std::string tail = s.substr(pi + 2);
  if (!head.empty() && head.back() == '*') head.pop_back();
  double coefficient = 1.0;
  if (head == "-") {
    coefficient = -1.0;
  } else if (!head.empty()) {
    coefficient = parse_number(head, ok);
    if (!ok) bad_value(key, e, "expected a number or a multiple of pi");
  }
  double denominator = 1.0;
  if (!tail.empty()) {
    if (tail.front() != '/') bad_value(key, e, "expected a number or a multiple of pi");
    denominator = parse_number(tail.substr(1), ok);
    if (!ok || denominator == 0.0) bad_value(key, e, "expected a nonzero denominator");
  }
  return coefficient * std::numbers::pi / denominator;
}

int parse_int(const std::string& key, const Entry& e) {
  std::size_t used = 0;
  try {
    const long v = std::stol(trim(e.value), &used);
    if (used == trim(e.value).size() && v >= -2147483647L && v <= 2147483647L) return static_cast<int>(v);
  } catch (const std::exception&) {
  }
  bad_value(key, e, "expected an integer");
}

bool parse_bool(const std::string& key, const Entry& e) {
  const std::string v = trim(e.value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, e, "expected true or false");
}

std::map<std::string, Entry> read_document(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string content = trim(raw.substr(0, raw.find('#')));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (key.empty()) throw ParseError("missing key before '='", line);
    if (!kKeys.count(key)) throw ParseError("unknown key '" + key + "'", line);
    if (value.empty()) throw ParseError("missing value for '" + key + "'", line);
    if (entries.count(key)) {
      throw ParseError("duplicate key '" + key + "' (first on line " + std::to_string(entries[key].line) + ")", line);
    }
    entries[key] = Entry{value, line};
  }
  return entries;
}

void validate_for_command(const RunConfig& c) {
  c.model.validate();
  if (c.model.Delta == 0.0) throw ValidationError("Delta: must be nonzero");
  if (c.n_delta && *c.n_delta < 1) throw ValidationError("n_delta: must be positive");
  switch (c.command) {
    case Command::Spectrum:
    case Command::Chern:
    case Command::Deform:
      c.model.validate_momentum_blocks();
      break;
    case Command::Table1:
      break;
    case Command::Edges:
      if (c.model.bc != Boundary::Open) throw ValidationError("bc: edges needs bc = open");
      if (c.model.N != 2) throw ValidationError("N: edges needs N = 2");
      if (c.edge_window < 1 || 2 * c.edge_window > c.model.L) {
        throw ValidationError("edge_window: must lie in [1, L/2]");
      }
      if (!(c.threshold > 0.0 && c.threshold <= 1.0)) throw ValidationError("threshold: must lie in (0, 1]");
      break;
    case Command::Effective:
    case Command::Butterfly:
    case Command::DSweep:
      if (c.model.N != 2) throw ValidationError("N: this command needs N = 2");
      break;
  }
  if (c.command == Command::Chern && c.chern_grid() < 3) throw ValidationError("n_delta: must be at least 3");
  if (c.command == Command::Table1 && c.chern_grid() < 3) throw ValidationError("n_delta: must be at least 3");
  if (c.command == Command::Deform && c.n_eta < 2) throw ValidationError("n_eta: must be at least 2");
  if (c.command == Command::Butterfly && c.max_q < 1) throw ValidationError("max_q: must be positive");
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Collects output files in memory; nothing touches the disk until commit().
class Outputs {
 public:
  explicit Outputs(fs::path dir, std::string hash) : dir_(std::move(dir)), hash_(std::move(hash)) {}

  std::ostringstream& open(const std::string& name, const std::vector<std::string>& notes, const std::string& columns) {
    auto& [file, body] = files_.emplace_back(name, std::ostringstream{});
    body << "# manifest " << hash_ << "\n";
    for (const auto& n : notes) body << "# " << n << "\n";
    body << columns << "\n";
    return body;
  }

  void add_raw(const std::string& name, const std::string& text) {
    auto& [file, body] = files_.emplace_back(name, std::ostringstream{});
    body << text;
  }

  std::vector<fs::path> commit() {
    std::vector<fs::path> written;
    try {
      std::error_code ec;
      fs::create_directories(dir_, ec);
      if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
      for (auto& [name, body] : files_) {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + path.string() + " for writing");
        written.push_back(path);
        out << body.str();
        out.flush();
        if (!out) throw IoError("failed writing " + path.string());
      }
    } catch (...) {
      for (const auto& p : written) {
        std::error_code ignored;
        fs::remove(p, ignored);
      }
      throw;
    }
    return written;
  }

 private:
  fs::path dir_;
  std::string hash_;
  std::vector<std::pair<std::string, std::ostringstream>> files_;
};

std::string bc_note(const ModelParams& p) { return "bc=" + to_string(p.bc) + ", energies in units of J"; }

std::string format_vector(const std::vector<int>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s + ")";
}

std::string run_spectrum(const RunConfig& c, Outputs& out) {
  const BlochModel model(c.model);
  auto& csv = out.open("spectrum.csv", {bc_note(c.model) + ", no constant shift", "momentum blocks k = 2 pi alpha / L"},
                       "k_index,k,band,energy");
  const auto ks = momentum_grid(c.model.L, c.model.beta.q);
  for (std::size_t a = 0; a < ks.size(); ++a) {
    const Eigen::VectorXd e = eigenvalues_dense(model.block(ks[a], c.model.delta).matrix);
    for (Eigen::Index n = 0; n < e.size(); ++n) {
      csv << a + 1 << "," << num(ks[a]) << "," << n + 1 << "," << num(e(n)) << "\n";
    }
  }
  return "spectrum: " + std::to_string(ks.size()) + " momentum blocks of dimension " + std::to_string(model.dim());
}

std::string run_chern(const RunConfig& c, Outputs& out) {
  ChernOptions opts;
  opts.n_delta = c.chern_grid();
  const ChernResult r = chern_numbers(c.model, opts);
  double worst = 0.0;
  for (double x : r.residuals) worst = std::max(worst, x);
  auto& csv = out.open("chern.csv",
                       {"n_delta=" + std::to_string(opts.n_delta) + ", max integer residual " + num(worst),
                        "min subband gap " + num(r.min_subband_gap)},
                       "band,chern");
  for (std::size_t n = 0; n < r.cherns.size(); ++n) csv << n + 1 << "," << r.cherns[n] << "\n";
  return "chern: C = " + format_vector(r.cherns);
}

std::string run_table(const RunConfig& c, Outputs& out) {
  std::vector<int> qs{3, 5};
  if (c.long_run) qs.insert(qs.end(), {7, 9});
  ChernOptions opts;
  opts.n_delta = c.chern_grid();
  const auto table = chern_table(qs, c.model, opts);
  auto& csv = out.open("table1.csv", {"n_delta=" + std::to_string(opts.n_delta) + ", sizes L1 = 21 q, L2 = 23 q"},
                       "beta_p,beta_q,band,chern,chern_L2,converged");
  std::string summary = "table1:";
  bool failed = false;
  for (const auto& col : table) {
    if (!col.error.empty()) {
      failed = true;
      summary += " " + std::to_string(col.beta.p) + "/" + std::to_string(col.beta.q) + " failed (" + col.error + ")";
      continue;
    }
    for (std::size_t n = 0; n < col.cherns.size(); ++n) {
      csv << col.beta.p << "," << col.beta.q << "," << n + 1 << "," << col.cherns[n] << "," << col.cherns_check[n]
          << "," << (col.converged ? 1 : 0) << "\n";
    }
    summary += " " + std::to_string(col.beta.p) + "/" + std::to_string(col.beta.q) + " " + format_vector(col.cherns) +
               (col.converged ? "" : " unconverged");
  }
  if (failed) throw TopologicalObstructionError(summary);
  return summary;
}

std::string run_butterfly(const RunConfig& c, Outputs& out) {
  const auto points = butterfly(c.model, c.max_q);
  auto& csv = out.open("butterfly.csv",
                       {bc_note(c.model) + ", L=" + std::to_string(c.model.L),
                        "energies shifted by +Delta + 2 J^2 / Delta; lambda = J^2 / (Delta cos pi beta), 0 at beta = 1/2"},
                       "beta_p,beta_q,energy_shifted");
  for (const auto& p : points) csv << p.p << "," << p.q << "," << num(p.energy) << "\n";
  return "butterfly: " + std::to_string(points.size()) + " points up to q = " + std::to_string(c.max_q);
}

std::string run_edges(const RunConfig& c, Outputs& out) {
  EdgeOptions opts;
  opts.edge_window = c.edge_window;
  opts.threshold = c.threshold;
  const auto states = find_edge_states(c.model, c.model.delta, opts);
  auto& csv = out.open("edges.csv",
                       {bc_note(c.model) + ", no constant shift", "window=" + std::to_string(opts.edge_window) +
                                                                      ", threshold=" + num(opts.threshold)},
                       "energy,side,localization");
  for (const auto& s : states) csv << num(s.energy) << "," << to_string(s.side) << "," << num(s.localization) << "\n";
  return "edges: " + std::to_string(states.size()) + " in-gap edge states";
}

std::string run_effective(const RunConfig& c, Outputs& out) {
  const BandComparison cmp = compare_bound_band(c.model);
  auto& csv = out.open("effective.csv",
                       {bc_note(c.model) + ", effective energies shifted by -Delta - 2 J^2 / Delta",
                        "max deviation " + num(cmp.max_abs_deviation)},
                       "state,exact,effective,deviation");
  for (std::size_t i = 0; i < cmp.exact.size(); ++i) {
    csv << i + 1 << "," << num(cmp.exact[i]) << "," << num(cmp.effective[i]) << "," << num(cmp.deviations[i]) << "\n";
  }
  return "effective: max deviation " + num(cmp.max_abs_deviation);
}

std::string run_deform(const RunConfig& c, Outputs& out) {
  const GapTrace t = gap_trace(c.model, c.n_eta, c.chern_grid());
  std::string columns = "eta";
  for (int j = 1; j < c.model.beta.q; ++j) columns += ",gap_" + std::to_string(j) + "_" + std::to_string(j + 1);
  auto& csv = out.open("gaps.csv",
                       {"n_delta=" + std::to_string(c.chern_grid()) + ", min gap " + num(t.min_gap),
                        "max gap step " + num(t.max_gap_step) + " (bound " + num(t.step_bound) + ")"},
                       columns);
  for (std::size_t i = 0; i < t.eta_grid.size(); ++i) {
    csv << num(t.eta_grid[i]);
    for (double g : t.gaps[i]) csv << "," << num(g);
    csv << "\n";
  }
  if (!(t.min_gap > 0.0)) throw TopologicalObstructionError("deformation closes a subband gap (min gap " + num(t.min_gap) + ")");
  return "deform: min gap " + num(t.min_gap);
}

std::string run_dsweep(const RunConfig& c, Outputs& out) {
  SweepOptions opts;
  opts.bound_only = c.bound_only;
  const DeltaSweep s = delta_sweep(c.model, c.sweep_grid(), opts);
  auto& csv = out.open("dsweep.csv",
                       {bc_note(c.model) + ", no constant shift", std::string("bound_only=") + (c.bound_only ? "true" : "false")},
                       "delta,state_index,energy");
  for (std::size_t j = 0; j < s.deltas.size(); ++j) {
    for (std::size_t i = 0; i < s.energies[j].size(); ++i) {
      csv << num(s.deltas[j]) << "," << i + 1 << "," << num(s.energies[j][i]) << "\n";
    }
  }
  return "dsweep: " + std::to_string(s.deltas.size()) + " phases";
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "unknown";
}

Command parse_command(const std::string& text) {
  for (const auto& [cmd, name] : kCommands) {
    if (name == text) return cmd;
  }
  throw ValidationError("command: unknown command '" + text + "'");
}

RunConfig parse_config(const std::string& text, const ConfigOverrides& overrides) {
  std::map<std::string, Entry> entries = read_document(text);
  int last_line = 0;
  for (const auto& [key, e] : entries) last_line = std::max(last_line, e.line);
  for (const auto& [key, value] : overrides) {
    if (!kKeys.count(key)) throw ValidationError("unknown override '" + key + "'");
    entries[key] = Entry{value, 0};
  }
  for (const auto& key : kRequired) {
    if (!entries.count(key)) {
      throw ParseError("missing required key '" + key + "'", last_line + 1);
    }
  }

  RunConfig c;
  auto real = [&](const char* key, double& target) {
    if (entries.count(key)) target = parse_real(key, entries[key]);
  };
  auto integer = [&](const char* key, int& target) {
    if (entries.count(key)) target = parse_int(key, entries[key]);
  };
  real("J", c.model.J);
  real("Delta", c.model.Delta);
  real("lambda", c.model.lambda);
  real("delta", c.model.delta);
  real("B0", c.model.B0);
  integer("L", c.model.L);
  integer("N", c.model.N);
  int p = 0;
  int q = 1;
  integer("beta_p", p);
  integer("beta_q", q);
  c.model.beta = Rational{p, q};
  if (entries.count("bc")) {
    try {
      c.model.bc = parse_boundary(trim(entries["bc"].value));
    } catch (const ValidationError&) {
      bad_value("bc", entries["bc"], "expected periodic or open");
    }
  }
  if (entries.count("command")) {
    try {
      c.command = parse_command(trim(entries["command"].value));
    } catch (const ValidationError&) {
      bad_value("command", entries["command"], "unknown command");
    }
  }
  if (entries.count("n_delta")) c.n_delta = parse_int("n_delta", entries["n_delta"]);
  integer("n_eta", c.n_eta);
  integer("max_q", c.max_q);
  integer("edge_window", c.edge_window);
  real("threshold", c.threshold);
  if (entries.count("bound_only")) c.bound_only = parse_bool("bound_only", entries["bound_only"]);
  if (entries.count("long")) c.long_run = parse_bool("long", entries["long"]);
  if (entries.count("output")) c.output_dir = trim(entries["output"].value);

  validate_for_command(c);
  return c;
}

std::string describe(const RunConfig& c) {
  std::ostringstream os;
  os << "version=" << kVersion << "\n"
     << "command=" << to_string(c.command) << "\n"
     << "J=" << num(c.model.J) << "\nDelta=" << num(c.model.Delta) << "\nlambda=" << num(c.model.lambda) << "\n"
     << "beta_p=" << c.model.beta.p << "\nbeta_q=" << c.model.beta.q << "\ndelta=" << num(c.model.delta) << "\n"
     << "B0=" << num(c.model.B0) << "\nL=" << c.model.L << "\nN=" << c.model.N << "\nbc=" << to_string(c.model.bc)
     << "\n"
     << "n_delta=" << (c.command == Command::DSweep ? c.sweep_grid() : c.chern_grid()) << "\nn_eta=" << c.n_eta
     << "\nmax_q=" << c.max_q << "\nedge_window=" << c.edge_window << "\nthreshold=" << num(c.threshold)
     << "\nbound_only=" << (c.bound_only ? "true" : "false") << "\nlong=" << (c.long_run ? "true" : "false") << "\n";
  return os.str();
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ValidationError&) {
    return kExitValidation;
  } catch (const ConvergenceError&) {
    return kExitConvergence;
  } catch (const ResolutionError&) {
    return kExitConvergence;
  } catch (const TopologicalObstructionError&) {
    return kExitObstruction;
  } catch (const IoError&) {
    return kExitIo;
  } catch (const std::filesystem::filesystem_error&) {
    return kExitIo;
  } catch (...) {
    return kExitFailure;
  }
}

RunReport run(const RunConfig& config) {
  validate_for_command(config);
  const std::string canonical = describe(config);
  RunReport report;
  report.manifest_hash = fnv1a_hex(canonical);
  Outputs out(config.output_dir, report.manifest_hash);

  static const std::map<Command, std::function<std::string(const RunConfig&, Outputs&)>> pipelines = {
      {Command::Spectrum, run_spectrum}, {Command::Chern, run_chern},         {Command::Table1, run_table},
      {Command::Butterfly, run_butterfly}, {Command::Edges, run_edges},       {Command::Effective, run_effective},
      {Command::Deform, run_deform},     {Command::DSweep, run_dsweep},
  };
  report.summary = pipelines.at(config.command)(config, out);

  nlohmann::ordered_json manifest;
  manifest["version"] = kVersion;
  manifest["command"] = to_string(config.command);
  manifest["hash"] = report.manifest_hash;
  nlohmann::ordered_json params;
  std::istringstream lines(canonical);
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    const std::string key = line.substr(0, eq);
    if (key == "version" || key == "command") continue;
    params[key] = line.substr(eq + 1);
  }
  manifest["parameters"] = params;
  manifest["summary"] = report.summary;
  out.add_raw("manifest.json", manifest.dump(2) + "\n");

  report.files = out.commit();
  return report;
}

}  // namespace magnon
