#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pm/csv.hpp"
#include "pm/stein.hpp"

namespace pm::tool {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(std::stod(trim(tok)));
  return out;
}

std::vector<long long> parse_longs(const std::string& s) {
  std::vector<long long> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(std::stoll(trim(tok)));
  return out;
}

bool is_integer(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {
      "invariant-density", "cone-check",      "partition-law",
      "correlation-decay", "clt-smooth",      "clt-kantorovich",
      "stein-budget",      "rio-b2",          "coboundary-screen"};
  return kinds;
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "kind") cfg.kind = value;
      else if (key == "beta") cfg.beta = std::stod(value);
      else if (key == "alpha_sequence") cfg.alpha_sequence = value;
      else if (key == "observable") cfg.observable = value;
      else if (key == "n_grid") cfg.n_grid = parse_longs(value);
      else if (key == "k_rule") cfg.k_rule = value;
      else if (key == "samples") cfg.samples = std::stoull(value);
      else if (key == "bins") cfg.bins = std::stoi(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "threads") cfg.threads = std::stoi(value);
      else if (key == "output_path") cfg.output_path = value;
      else cfg.unknown_keys.push_back(key);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": cannot parse value for '" + key + "'");
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": value out of range for '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

std::vector<Violation> ExperimentConfig::validate() const {
  std::vector<Violation> v;
  const auto& kinds = experiment_kinds();
  const bool known_kind =
      std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
  if (!known_kind)
    v.push_back({"kind", kind, "must be one of the nine experiment kinds"});

  if (!(beta > 0.0) || !(beta < 1.0))
    v.push_back({"beta", format_double(beta), "must lie in (0,1)"});
  else if ((kind == "clt-smooth" || kind == "clt-kantorovich" ||
            kind == "stein-budget") &&
           !(beta < 1.0 / 3.0))
    v.push_back({"beta", format_double(beta),
                 "must be < 1/3 for clt-* and stein-budget kinds"});

  if (beta > 0.0 && beta < 1.0) {
    try {
      (void)sequence();
    } catch (const std::exception& e) {
      v.push_back({"alpha_sequence", alpha_sequence, e.what()});
    }
  }

  // Kinds consume different observable shapes: correlation-decay needs a
  // scalar preset, the normal-approximation kinds need a vector preset, and
  // cone-check additionally accepts "one" for the flat density.
  static const std::vector<std::string> all_presets = {
      "coord", "cos", "coord-cos", "coboundary-sin", "coord+coboundary",
      "one"};
  static const std::vector<std::string> scalar_presets = {
      "coord", "cos", "coboundary-sin"};
  static const std::vector<std::string> vector_presets = {
      "coord", "coord-cos", "coboundary-sin", "coord+coboundary"};
  static const std::vector<std::string> scalar1d_presets = {
      "coord", "coboundary-sin"};
  const auto in = [](const std::vector<std::string>& set,
                     const std::string& x) {
    return std::find(set.begin(), set.end(), x) != set.end();
  };
  if (!in(all_presets, observable))
    v.push_back({"observable", observable, "unknown observable preset"});
  else if (kind == "correlation-decay" && !in(scalar_presets, observable))
    v.push_back({"observable", observable,
                 "correlation-decay needs a scalar preset (coord, cos, "
                 "coboundary-sin)"});
  else if (kind == "clt-kantorovich" && !in(scalar1d_presets, observable))
    v.push_back({"observable", observable,
                 "clt-kantorovich needs a one-dimensional preset (coord, "
                 "coboundary-sin)"});
  else if ((kind == "clt-smooth" || kind == "stein-budget" ||
            kind == "rio-b2" || kind == "coboundary-screen") &&
           !in(vector_presets, observable))
    v.push_back({"observable", observable,
                 "this kind needs a vector preset (coord, coord-cos, "
                 "coboundary-sin, coord+coboundary)"});

  const bool needs_grid = known_kind && kind != "invariant-density" &&
                          kind != "cone-check";
  if (needs_grid && n_grid.empty())
    v.push_back({"n_grid", "", "must be a nonempty integer list"});
  for (long long n : n_grid)
    if (n < 1)
      v.push_back({"n_grid", std::to_string(n), "entries must be >= 1"});
  if (!n_grid.empty() && !std::is_sorted(n_grid.begin(), n_grid.end()))
    v.push_back({"n_grid", "", "entries must be sorted ascending"});
  if (kind == "coboundary-screen" && !n_grid.empty() && n_grid.size() < 4)
    v.push_back({"n_grid", std::to_string(n_grid.size()) + " entries",
                 "growth-exponent fit needs at least 4 grid points"});
  if (kind == "partition-law" && !n_grid.empty() && n_grid.size() < 4)
    v.push_back({"n_grid", std::to_string(n_grid.size()) + " entries",
                 "length-law fit needs at least 4 grid points"});
  if (kind == "stein-budget" && n_grid.size() > 1)
    v.push_back({"n_grid", std::to_string(n_grid.size()) + " entries",
                 "stein-budget takes a single N (one budget per run)"});

  if (k_rule != "default" && !is_integer(k_rule))
    v.push_back({"k_rule", k_rule, "must be 'default' or an integer"});
  else if (k_rule != "default" && std::stoll(k_rule) < 0)
    v.push_back({"k_rule", k_rule, "must be >= 0"});

  if (samples == 0) v.push_back({"samples", "0", "must be >= 1"});
  if (bins < 2) v.push_back({"bins", std::to_string(bins), "must be >= 2"});
  if (threads < 0)
    v.push_back({"threads", std::to_string(threads), "must be >= 0"});
  if (output_path.empty())
    v.push_back({"output_path", "", "must be a writable directory"});
  for (const auto& key : unknown_keys)
    v.push_back({key, "", "unknown configuration key"});
  return v;
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream out;
  out << "kind=" << kind << "\n";
  out << "beta=" << format_double(beta) << "\n";
  out << "alpha_sequence=" << alpha_sequence << "\n";
  out << "observable=" << observable << "\n";
  out << "n_grid=";
  for (std::size_t i = 0; i < n_grid.size(); ++i)
    out << (i ? "," : "") << n_grid[i];
  out << "\n";
  out << "k_rule=" << k_rule << "\n";
  out << "samples=" << samples << "\n";
  out << "bins=" << bins << "\n";
  out << "seed=" << seed << "\n";
  return out.str();
}

AdmissibleSequence ExperimentConfig::sequence() const {
  const auto colon = alpha_sequence.find(':');
  const std::string form = alpha_sequence.substr(0, colon);
  const std::string args =
      colon == std::string::npos ? "" : alpha_sequence.substr(colon + 1);
  if (form == "constant") {
    const double a = args.empty() ? beta : std::stod(args);
    return AdmissibleSequence::constant(a, beta);
  }
  if (form == "list")
    return AdmissibleSequence::explicit_list(parse_doubles(args), beta);
  if (form == "cycle")
    return AdmissibleSequence::cycle(parse_doubles(args), beta);
  throw std::invalid_argument(
      "alpha_sequence must be constant[:a], list:a,b,... or cycle:a,b,...");
}

long long ExperimentConfig::gap_radius(long long N) const {
  if (k_rule == "default") return default_gap_radius(N, beta);
  return std::stoll(k_rule);
}

}  // namespace pm::tool
