#include "socsamp/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "socsamp/errors.hpp"
#include "socsamp/format.hpp"

namespace socsamp {

namespace {

using RawConfig = std::map<std::string, std::string>;

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "experiment.agents",   "experiment.opinions",      "experiment.initial",    "experiment.horizon",
      "experiment.replications", "experiment.seed",       "experiment.threads",    "experiment.out",
      "experiment.stride",   "experiment.write_traces",  "network.kind",          "network.matrix",
      "network.support",     "network.probabilities",    "network.weights",       "network.tau",
      "network.window",      "sampling.kind",            "sampling.c",            "sampling.exponent",
      "sampling.renormalize", "schedule.a",              "schedule.gamma",        "schedule.k0",
      "mixing.b",            "mixing.a",                 "analysis.normality",       "analysis.covariance",   "analysis.connectivity",
      "analysis.sigma",      "analysis.step",            "analysis.cov_tolerance", "analysis.normality_min_pass",
      "analysis.alpha",      "analysis.consensus_from",  "analysis.consensus_ratio", "analysis.consensus_absolute"};
  return keys;
}

void check_key(const std::string& key) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError(key + ": unknown key");
}

RawConfig parse_raw(std::string_view text) {
  RawConfig raw;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.find('.') == std::string::npos) {
      if (section.empty()) throw ConfigError(key + ": key outside any section");
      key = section + "." + key;
    }
    check_key(key);
    if (raw.count(key)) throw ConfigError(key + ": duplicate key");
    raw[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return raw;
}

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size() && std::isfinite(x)) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a finite decimal, got '" + v + "'");
}

long to_integer(const std::string& key, const std::string& v, long min_value) {
  long x = 0;
  try {
    std::size_t used = 0;
    x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  if (x < min_value) throw ConfigError(key + ": must be >= " + std::to_string(min_value) + ", got " + v);
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v.front() != '-') {
      const auto x = std::stoull(v, &used, 0);
      if (used == v.size()) return x;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an unsigned 64-bit integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError(key + ": expected true|false, got '" + v + "'");
}

std::vector<double> to_reals(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& part : split(v, ',')) out.push_back(to_real(key, part));
  return out;
}

WeightMatrix parse_inline_matrix(const std::string& text, int agents, const std::string& key) {
  if (text == "uniform") return metropolis_complete(agents);
  if (text == "identity") return WeightMatrix::Identity(agents, agents);
  const auto rows = split(text, ';');
  WeightMatrix w(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto row = to_reals(key, rows[r]);
    if (row.size() != rows.size()) {
      throw ConfigError(key + ": matrix row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                        " entries, expected a square matrix");
    }
    for (std::size_t c = 0; c < row.size(); ++c)
      w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return w;
}

std::string get(const RawConfig& raw, const std::string& key, const std::string& fallback) {
  auto it = raw.find(key);
  return it == raw.end() ? fallback : it->second;
}

std::string require(const RawConfig& raw, const std::string& key) {
  auto it = raw.find(key);
  if (it == raw.end()) throw ConfigError(key + ": required key is missing");
  return it->second;
}

void reject(const RawConfig& raw, const std::string& key, const std::string& why) {
  if (raw.count(key)) throw ConfigError(key + ": " + why);
}

InitialSpec parse_initial(const std::string& key, const std::string& v) {
  InitialSpec spec;
  std::string body = v;
  if (v.rfind("iid:", 0) == 0) {
    spec.kind = InitialSpec::Kind::iid;
    spec.distribution = to_reals(key, v.substr(4));
    return spec;
  }
  if (v.rfind("labels:", 0) == 0) body = v.substr(7);
  spec.kind = InitialSpec::Kind::labels;
  for (const auto& part : split(body, ',')) spec.labels.push_back(static_cast<int>(to_integer(key, part, 1)));
  return spec;
}

ExperimentConfig build(const RawConfig& raw, const std::string& base_dir) {
  ExperimentConfig c;
  c.agents = static_cast<int>(to_integer("experiment.agents", require(raw, "experiment.agents"), 1));
  c.opinions = static_cast<int>(to_integer("experiment.opinions", require(raw, "experiment.opinions"), 1));
  c.initial = parse_initial("experiment.initial", require(raw, "experiment.initial"));
  c.horizon = to_integer("experiment.horizon", require(raw, "experiment.horizon"), 1);
  c.replications = static_cast<int>(to_integer("experiment.replications", get(raw, "experiment.replications", "1"), 1));
  c.master_seed = to_u64("experiment.seed", get(raw, "experiment.seed", "0"));
  c.threads = static_cast<int>(to_integer("experiment.threads", get(raw, "experiment.threads", "1"), 0));
  c.out_dir = get(raw, "experiment.out", "out");
  c.stride = Stride::parse(get(raw, "experiment.stride", "log"));
  c.write_traces = to_bool("experiment.write_traces", get(raw, "experiment.write_traces", "true"));

  const double tau = to_real("network.tau", get(raw, "network.tau", "1e-6"));
  const ModelKind kind = model_kind_from_string(get(raw, "network.kind", "fixed"));
  switch (kind) {
    case ModelKind::fixed:
      reject(raw, "network.support", "not used by kind fixed (use network.matrix)");
      reject(raw, "network.probabilities", "not used by kind fixed");
      reject(raw, "network.weights", "not used by kind fixed");
      {
        auto list = parse_matrix_list(get(raw, "network.matrix", "uniform"), c.agents, base_dir, "network.matrix");
        if (list.size() != 1) throw ConfigError("network.matrix: fixed model takes exactly one matrix");
        c.network = WeightMatrixModel::fixed(std::move(list.front()), tau);
      }
      break;
    case ModelKind::iid_finite_support: {
      reject(raw, "network.matrix", "not used by kind iid (use network.support)");
      reject(raw, "network.weights", "not used by kind iid");
      auto support = parse_matrix_list(require(raw, "network.support"), c.agents, base_dir, "network.support");
      std::vector<double> probs;
      if (raw.count("network.probabilities")) {
        probs = to_reals("network.probabilities", raw.at("network.probabilities"));
      } else {
        probs.assign(support.size(), 1.0 / static_cast<double>(support.size()));
      }
      c.network = WeightMatrixModel::iid(std::move(support), std::move(probs), tau);
      break;
    }
    case ModelKind::switching_periodic: {
      reject(raw, "network.matrix", "not used by kind switching (use network.support)");
      reject(raw, "network.weights", "not used by kind switching");
      reject(raw, "network.probabilities", "not used by kind switching");
      auto period = parse_matrix_list(require(raw, "network.support"), c.agents, base_dir, "network.support");
      c.network = WeightMatrixModel::switching(std::move(period), 0, tau);
      break;
    }
    case ModelKind::birkhoff_random:
      reject(raw, "network.matrix", "not used by kind birkhoff");
      reject(raw, "network.support", "not used by kind birkhoff");
      reject(raw, "network.probabilities", "not used by kind birkhoff");
      c.network = WeightMatrixModel::birkhoff(c.agents, to_reals("network.weights", require(raw, "network.weights")), tau);
      break;
  }
  c.network.agents = c.agents;
  c.network.window = static_cast<int>(to_integer("network.window", get(raw, "network.window", "0"), 0));

  c.sampling.kind = policy_kind_from_string(get(raw, "sampling.kind", "direct"));
  c.sampling.censor_scale = to_real("sampling.c", get(raw, "sampling.c", "0"));
  c.sampling.censor_exponent = to_real("sampling.exponent", get(raw, "sampling.exponent", "2"));
  c.sampling.renormalize = to_bool("sampling.renormalize", get(raw, "sampling.renormalize", "true"));

  c.schedule.amplitude = to_real("schedule.a", get(raw, "schedule.a", "1"));
  c.schedule.exponent = to_real("schedule.gamma", get(raw, "schedule.gamma", "0.75"));
  c.schedule.offset = to_integer("schedule.k0", get(raw, "schedule.k0", "0"), 0);

  auto per_agent = [&](const std::string& key, const std::string& text) -> Vector {
    const auto v = to_reals(key, text);
    if (v.size() == 1) return Vector::Constant(c.agents, v.front());
    if (v.size() == static_cast<std::size_t>(c.agents)) {
      return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    throw ConfigError(key + ": expected 1 or N = " + std::to_string(c.agents) + " entries, got " +
                      std::to_string(v.size()));
  };
  c.b_diag = per_agent("mixing.b", get(raw, "mixing.b", "1"));
  if (raw.count("mixing.a")) c.a_diag = per_agent("mixing.a", raw.at("mixing.a"));

  auto& a = c.analysis;
  a.normality = to_bool("analysis.normality", get(raw, "analysis.normality", "true"));
  a.covariance = to_bool("analysis.covariance", get(raw, "analysis.covariance", "true"));
  a.connectivity = to_bool("analysis.connectivity", get(raw, "analysis.connectivity", "true"));
  a.sigma = sigma_form_from_string(get(raw, "analysis.sigma", "categorical"));
  a.step = to_integer("analysis.step", get(raw, "analysis.step", "0"), 0);
  a.cov_tolerance = to_real("analysis.cov_tolerance", get(raw, "analysis.cov_tolerance", "0.2"));
  a.normality_min_pass = to_real("analysis.normality_min_pass", get(raw, "analysis.normality_min_pass", "0.9"));
  a.normality_alpha = to_real("analysis.alpha", get(raw, "analysis.alpha", "0.01"));
  a.consensus_from = to_integer("analysis.consensus_from", get(raw, "analysis.consensus_from", "0"), 0);
  a.consensus_ratio = to_real("analysis.consensus_ratio", get(raw, "analysis.consensus_ratio", "0"));
  a.consensus_absolute = to_real("analysis.consensus_absolute", get(raw, "analysis.consensus_absolute", "0"));
  return c;
}

std::string matrix_text(const WeightMatrix& w) { return format_matrix(w, "; "); }

std::string matrix_list_text(const std::vector<WeightMatrix>& list) {
  std::string out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += " | ";
    out += matrix_text(list[i]);
  }
  return out;
}

std::string reals_text(const std::vector<double>& values) {
  return format_row(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
}

std::string bool_text(bool v) { return v ? "true" : "false"; }

RawConfig to_raw(const ExperimentConfig& c) {
  RawConfig raw;
  raw["experiment.agents"] = std::to_string(c.agents);
  raw["experiment.opinions"] = std::to_string(c.opinions);
  if (c.initial.kind == InitialSpec::Kind::iid) {
    raw["experiment.initial"] = "iid:" + reals_text(c.initial.distribution);
  } else {
    std::string labels = "labels:";
    for (std::size_t i = 0; i < c.initial.labels.size(); ++i) {
      if (i) labels += ',';
      labels += std::to_string(c.initial.labels[i]);
    }
    raw["experiment.initial"] = labels;
  }
  raw["experiment.horizon"] = std::to_string(c.horizon);
  raw["experiment.replications"] = std::to_string(c.replications);
  raw["experiment.seed"] = std::to_string(c.master_seed);
  raw["experiment.threads"] = std::to_string(c.threads);
  raw["experiment.out"] = c.out_dir;
  raw["experiment.stride"] = c.stride.to_string();
  raw["experiment.write_traces"] = bool_text(c.write_traces);

  raw["network.kind"] = to_string(c.network.kind);
  switch (c.network.kind) {
    case ModelKind::fixed: raw["network.matrix"] = matrix_text(c.network.support.front()); break;
    case ModelKind::iid_finite_support:
      raw["network.support"] = matrix_list_text(c.network.support);
      raw["network.probabilities"] = reals_text(c.network.probabilities);
      break;
    case ModelKind::switching_periodic: raw["network.support"] = matrix_list_text(c.network.support); break;
    case ModelKind::birkhoff_random: raw["network.weights"] = reals_text(c.network.birkhoff_weights); break;
  }
  raw["network.tau"] = format_real(c.network.tau);
  raw["network.window"] = std::to_string(c.network.window);

  raw["sampling.kind"] = to_string(c.sampling.kind);
  raw["sampling.c"] = format_real(c.sampling.censor_scale);
  raw["sampling.exponent"] = format_real(c.sampling.censor_exponent);
  raw["sampling.renormalize"] = bool_text(c.sampling.renormalize);

  raw["schedule.a"] = format_real(c.schedule.amplitude);
  raw["schedule.gamma"] = format_real(c.schedule.exponent);
  raw["schedule.k0"] = std::to_string(c.schedule.offset);

  raw["mixing.b"] = format_row(c.b_diag);
  if (c.a_diag.size() > 0) raw["mixing.a"] = format_row(c.a_diag);

  const auto& a = c.analysis;
  raw["analysis.normality"] = bool_text(a.normality);
  raw["analysis.covariance"] = bool_text(a.covariance);
  raw["analysis.connectivity"] = bool_text(a.connectivity);
  raw["analysis.sigma"] = to_string(a.sigma);
  raw["analysis.step"] = std::to_string(a.step);
  raw["analysis.cov_tolerance"] = format_real(a.cov_tolerance);
  raw["analysis.normality_min_pass"] = format_real(a.normality_min_pass);
  raw["analysis.alpha"] = format_real(a.normality_alpha);
  raw["analysis.consensus_from"] = std::to_string(a.consensus_from);
  raw["analysis.consensus_ratio"] = format_real(a.consensus_ratio);
  raw["analysis.consensus_absolute"] = format_real(a.consensus_absolute);
  return raw;
}

std::string render(const RawConfig& raw) {
  // sections in schema order, keys sorted within a section
  static const std::vector<std::string> sections = {"experiment", "network", "sampling", "schedule", "mixing",
                                                     "analysis"};
  std::string out;
  for (const auto& section : sections) {
    out += "[" + section + "]\n";
    for (const auto& [key, value] : raw) {
      if (key.rfind(section + ".", 0) == 0) out += key.substr(section.size() + 1) + " = " + value + "\n";
    }
    out += "\n";
  }
  return out;
}

}  // namespace

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return agents == o.agents && opinions == o.opinions && initial == o.initial && network == o.network &&
         b_diag.size() == o.b_diag.size() && b_diag == o.b_diag &&
         a_diag.size() == o.a_diag.size() && a_diag == o.a_diag && sampling == o.sampling && schedule == o.schedule && horizon == o.horizon &&
         stride == o.stride && master_seed == o.master_seed && replications == o.replications &&
         threads == o.threads && out_dir == o.out_dir && write_traces == o.write_traces && analysis == o.analysis;
}

std::vector<WeightMatrix> read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file '" + path + "'");
  std::vector<WeightMatrix> out;
  std::vector<std::vector<double>> rows;
  auto flush = [&] {
    if (rows.empty()) return;
    WeightMatrix w(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.front().size()) throw ConfigError(path + ": ragged matrix rows");
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    out.push_back(std::move(w));
    rows.clear();
  };
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) {
      flush();
    } else if (t.front() != '#') {
      rows.push_back(to_reals(path, t));
    }
  }
  flush();
  if (out.empty()) throw ConfigError(path + ": no matrices found");
  return out;
}

std::vector<WeightMatrix> parse_matrix_list(const std::string& text, int agents, const std::string& base_dir,
                                            const std::string& key) {
  if (text.rfind("file:", 0) == 0) {
    std::filesystem::path p = text.substr(5);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return read_matrix_file(p.string());
  }
  std::vector<WeightMatrix> out;
  for (const auto& part : split(text, '|')) out.push_back(parse_inline_matrix(part, agents, key));
  return out;
}

ExperimentConfig parse_config(std::string_view text, const std::string& base_dir) {
  return build(parse_raw(text), base_dir);
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(buf.str(), dir.empty() ? "." : dir.string());
}

void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value,
                    const std::string& base_dir) {
  apply_overrides(config, {{key, value}}, base_dir);
}

void apply_overrides(ExperimentConfig& config, const std::vector<std::pair<std::string, std::string>>& overrides,
                     const std::string& base_dir) {
  RawConfig raw = to_raw(config);
  for (const auto& [key, value] : overrides) {
    check_key(key);
    // a kind switch drops keys that belong to the previous kind
    if (key == "network.kind" && value != raw["network.kind"]) {
      for (const char* k : {"network.matrix", "network.support", "network.probabilities", "network.weights"})
        raw.erase(k);
    }
    raw[key] = value;
  }
  config = build(raw, base_dir);
}

void validate_config(const ExperimentConfig& c) {
  if (c.initial.kind == InitialSpec::Kind::iid) {
    if (c.initial.distribution.size() != static_cast<std::size_t>(c.opinions)) {
      throw ConfigError("experiment.initial: iid distribution needs M = " + std::to_string(c.opinions) + " entries");
    }
    double total = 0.0;
    for (double p : c.initial.distribution) {
      if (p < 0.0) throw ConfigError("experiment.initial: probabilities must be >= 0");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("experiment.initial: probabilities sum to " + format_real(total));
  } else {
    if (c.initial.labels.size() != static_cast<std::size_t>(c.agents)) {
      throw ConfigError("experiment.initial: " + std::to_string(c.initial.labels.size()) + " labels for N = " +
                        std::to_string(c.agents));
    }
    for (std::size_t i = 0; i < c.initial.labels.size(); ++i) {
      if (c.initial.labels[i] > c.opinions) {
        throw ConfigError("experiment.initial: label " + std::to_string(c.initial.labels[i]) + " at index " +
                          std::to_string(i + 1) + " exceeds M = " + std::to_string(c.opinions));
      }
    }
  }
  if (c.sampling.censor_scale < 0.0) throw ConfigError("sampling.c: must be >= 0");
  if (c.sampling.censor_exponent < 1.0) throw ConfigError("sampling.exponent: must be >= 1");
  if (c.analysis.step > c.horizon) throw ConfigError("analysis.step: exceeds experiment.horizon");
  if (c.analysis.consensus_from > c.horizon) throw ConfigError("analysis.consensus_from: exceeds experiment.horizon");
  c.schedule.validate();
  validate_model(c.network);
  validate_mixing(mixing_of(c));
}

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig c = parse_config_file(path);
  validate_config(c);
  return c;
}

std::string serialize_config(const ExperimentConfig& config) { return render(to_raw(config)); }

std::uint64_t config_digest(const ExperimentConfig& config) {
  RawConfig raw = to_raw(config);
  raw.erase("experiment.threads");
  raw.erase("experiment.out");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : render(raw)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

InitialOpinions resolve_initial(const ExperimentConfig& config) {
  if (config.initial.kind == InitialSpec::Kind::labels) return {config.initial.labels};
  RandomStream rng(config.master_seed, {0, kInitialStream, 0});
  const auto& p = config.initial.distribution;
  InitialOpinions out;
  out.labels.reserve(static_cast<std::size_t>(config.agents));
  for (int i = 0; i < config.agents; ++i) {
    const double u = rng.uniform();
    double acc = 0.0;
    int label = 0;
    for (std::size_t m = 0; m < p.size(); ++m) {
      acc += p[m];
      if (p[m] > 0.0) label = static_cast<int>(m) + 1;
      if (u < acc && p[m] > 0.0) break;
    }
    out.labels.push_back(label);
  }
  return out;
}

MixingMatrices mixing_of(const ExperimentConfig& config) {
  MixingMatrices mix = MixingMatrices::from_b(config.b_diag);
  if (config.a_diag.size() > 0) mix.a_diag = config.a_diag;
  return mix;
}

TrialConfig make_trial_config(const ExperimentConfig& config, std::uint64_t trial) {
  TrialConfig t;
  t.agents = config.agents;
  t.opinions = config.opinions;
  t.initial = resolve_initial(config);
  t.network = config.network;
  t.mixing = mixing_of(config);
  t.sampling = config.sampling;
  t.schedule = config.schedule;
  t.horizon = config.horizon;
  t.seed = derive_trial_seed(config.master_seed, trial);
  t.trial = trial;
  t.stride = config.stride;
  if (config.analysis.step > 0) t.extra_checkpoints.push_back(config.analysis.step);
  if (config.analysis.consensus_from > 0) t.extra_checkpoints.push_back(config.analysis.consensus_from);
  return t;
}

}  // namespace socsamp
