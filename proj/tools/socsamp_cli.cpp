// Command-line front end. Talks to the simulator only through the C API.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "socsamp/socsamp.h"

namespace {

constexpr int kExitFailed = 1;  // a predicate or assumption check failed
constexpr int kExitError = 3;   // config, hypothesis or runtime error

struct ConfigDeleter {
  void operator()(socsamp_config* c) const { socsamp_config_free(c); }
};
using ConfigHandle = std::unique_ptr<socsamp_config, ConfigDeleter>;

struct Owned {
  char* text = nullptr;
  ~Owned() { socsamp_string_free(text); }
};

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::string> stride;
  std::vector<std::string> sets;
  std::uint64_t trial = 0;
};

int report_error(socsamp_status status) {
  std::cerr << "error (" << socsamp_status_name(status) << "): " << socsamp_last_error() << "\n";
  return kExitError;
}

void add_common(CLI::App* sub, Options& opt, bool run_flags) {
  sub->add_option("config", opt.config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  sub->add_option("--set", opt.sets, "Override a config key, key=value (repeatable)");
  if (!run_flags) return;
  sub->add_option("--seed", opt.seed, "Master seed");
  sub->add_option("--replications", opt.replications, "Number of trials")->check(CLI::PositiveNumber);
  sub->add_option("--out", opt.out, "Output directory");
  sub->add_option("--threads", opt.threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  sub->add_option("--stride", opt.stride, "Trace stride: log, all, every:n");
}

// Loads the file and applies flag and --set overrides. Null on error.
ConfigHandle load(const Options& opt, int& exit_code) {
  socsamp_config* raw = nullptr;
  if (auto s = socsamp_config_parse_file(opt.config_path.c_str(), &raw); s != SOCSAMP_OK) {
    exit_code = report_error(s);
    return nullptr;
  }
  ConfigHandle config(raw);
  std::vector<std::pair<std::string, std::string>> overrides;
  if (opt.seed) overrides.emplace_back("experiment.seed", std::to_string(*opt.seed));
  if (opt.replications) overrides.emplace_back("experiment.replications", std::to_string(*opt.replications));
  if (opt.out) overrides.emplace_back("experiment.out", *opt.out);
  if (opt.threads) overrides.emplace_back("experiment.threads", std::to_string(*opt.threads));
  if (opt.stride) overrides.emplace_back("experiment.stride", *opt.stride);
  for (const auto& kv : opt.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
      exit_code = kExitError;
      return nullptr;
    }
    overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  std::vector<const char*> keys, values;
  for (const auto& [key, value] : overrides) {
    keys.push_back(key.c_str());
    values.push_back(value.c_str());
  }
  if (auto s = socsamp_config_set_many(config.get(), keys.data(), values.data(), keys.size()); s != SOCSAMP_OK) {
    exit_code = report_error(s);
    return nullptr;
  }
  return config;
}

int simulate(const Options& opt) {
  int code = 0;
  auto config = load(opt, code);
  if (!config) return code;
  socsamp_summary* summary = nullptr;
  if (auto s = socsamp_simulate(config.get(), &summary); s != SOCSAMP_OK) return report_error(s);
  Owned text;
  socsamp_summary_text(summary, &text.text);
  std::cout << text.text;
  std::fprintf(stderr, "wall_seconds = %.3f\n", socsamp_summary_wall_seconds(summary));
  const bool passed = socsamp_summary_passed(summary) != 0;
  socsamp_summary_free(summary);
  return passed ? 0 : kExitFailed;
}

int analyze(const Options& opt) {
  int code = 0;
  auto config = load(opt, code);
  if (!config) return code;
  Owned report;
  if (auto s = socsamp_analyze(config.get(), &report.text); s != SOCSAMP_OK) return report_error(s);
  std::cout << report.text;
  return 0;
}

int check(const Options& opt) {
  int code = 0;
  auto config = load(opt, code);
  if (!config) return code;
  Owned text;
  int all_passed = 0;
  if (auto s = socsamp_check(config.get(), &text.text, &all_passed); s != SOCSAMP_OK) return report_error(s);
  std::cout << text.text;
  return all_passed ? 0 : kExitFailed;
}

int replay(const Options& opt) {
  Options load_opt = opt;
  load_opt.stride.reset();  // the replay stride is separate from the config's
  int code = 0;
  auto config = load(load_opt, code);
  if (!config) return code;
  Owned csv;
  const char* stride = opt.stride ? opt.stride->c_str() : nullptr;
  if (auto s = socsamp_replay(config.get(), opt.trial, stride, &csv.text); s != SOCSAMP_OK) return report_error(s);
  if (opt.out) {
    std::filesystem::create_directories(*opt.out);
    const auto path = std::filesystem::path(*opt.out) / ("trace_" + std::to_string(opt.trial) + ".csv");
    std::ofstream file(path, std::ios::binary);
    file << csv.text;
    if (!file) {
      std::cerr << "error: cannot write " << path << "\n";
      return kExitError;
    }
  } else {
    std::cout << csv.text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed social sampling simulator"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  Options opt;
  auto* sim = app.add_subcommand("simulate", "Run all replications and evaluate the enabled predicates");
  add_common(sim, opt, true);
  auto* ana = app.add_subcommand("analyze", "Theory only: q*, Fbar, lambda2, S0, S, S~");
  add_common(ana, opt, false);
  auto* chk = app.add_subcommand("check", "Audit the assumptions, one pass/fail line each");
  add_common(chk, opt, false);
  auto* rep = app.add_subcommand("replay", "Re-run one trial from its derived seed");
  add_common(rep, opt, true);
  rep->add_option("--trial", opt.trial, "Trial index (0-based)")->required();

  CLI11_PARSE(app, argc, argv);

  if (*sim) return simulate(opt);
  if (*ana) return analyze(opt);
  if (*chk) return check(opt);
  return replay(opt);
}
