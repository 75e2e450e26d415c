#include "socsamp/socsamp.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "socsamp/config.hpp"
#include "socsamp/errors.hpp"
#include "socsamp/experiment.hpp"

struct socsamp_config {
  socsamp::ExperimentConfig config;
  std::string base_dir;
};

struct socsamp_summary {
  socsamp::RunSummary summary;
};

namespace {

thread_local std::string last_error;

socsamp_status fail(socsamp_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Maps the active exception to a status code.
socsamp_status translate() {
  try {
    throw;
  } catch (const socsamp::ConfigError& e) {
    return fail(SOCSAMP_ERR_CONFIG, e.what());
  } catch (const socsamp::AssumptionError& e) {
    return fail(SOCSAMP_ERR_ASSUMPTION, e.what());
  } catch (const socsamp::HypothesisError& e) {
    return fail(SOCSAMP_ERR_HYPOTHESIS, e.what());
  } catch (const socsamp::StabilityError& e) {
    return fail(SOCSAMP_ERR_STABILITY, e.what());
  } catch (const socsamp::DomainError& e) {
    return fail(SOCSAMP_ERR_DOMAIN, e.what());
  } catch (const socsamp::TrialAbort& e) {
    return fail(SOCSAMP_ERR_TRIAL_ABORT, e.what());
  } catch (const std::exception& e) {
    return fail(SOCSAMP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SOCSAMP_ERR_INTERNAL, "unknown exception");
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class Body>
socsamp_status guarded(Body&& body) {
  try {
    body();
    last_error.clear();
    return SOCSAMP_OK;
  } catch (...) {
    return translate();
  }
}

}  // namespace

extern "C" {

const char* socsamp_last_error(void) { return last_error.c_str(); }

const char* socsamp_status_name(socsamp_status status) {
  switch (status) {
    case SOCSAMP_OK: return "ok";
    case SOCSAMP_ERR_ARGUMENT: return "invalid argument";
    case SOCSAMP_ERR_CONFIG: return "config error";
    case SOCSAMP_ERR_ASSUMPTION: return "assumption violated";
    case SOCSAMP_ERR_HYPOTHESIS: return "hypothesis failed";
    case SOCSAMP_ERR_STABILITY: return "unstable operator";
    case SOCSAMP_ERR_DOMAIN: return "domain error";
    case SOCSAMP_ERR_TRIAL_ABORT: return "trial aborted";
    case SOCSAMP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void socsamp_string_free(char* text) { std::free(text); }

socsamp_status socsamp_config_parse_file(const char* path, socsamp_config** out) {
  if (!path || !out) return fail(SOCSAMP_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<socsamp_config>();
    handle->config = socsamp::parse_config_file(path);
    const auto dir = std::filesystem::path(path).parent_path();
    handle->base_dir = dir.empty() ? "." : dir.string();
    *out = handle.release();
  });
}

socsamp_status socsamp_config_parse_text(const char* text, const char* base_dir, socsamp_config** out) {
  if (!text || !out) return fail(SOCSAMP_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<socsamp_config>();
    handle->base_dir = base_dir ? base_dir : ".";
    handle->config = socsamp::parse_config(text, handle->base_dir);
    *out = handle.release();
  });
}

socsamp_status socsamp_config_set(socsamp_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(SOCSAMP_ERR_ARGUMENT, "null argument");
  return guarded([&] { socsamp::apply_override(config->config, key, value, config->base_dir); });
}

socsamp_status socsamp_config_set_many(socsamp_config* config, const char* const* keys, const char* const* values,
                                       size_t count) {
  if (!config || (count > 0 && (!keys || !values))) return fail(SOCSAMP_ERR_ARGUMENT, "null argument");
  std::vector<std::pair<std::string, std::string>> overrides;
  for (size_t i = 0; i < count; ++i) {
    if (!keys[i] || !values[i]) return fail(SOCSAMP_ERR_ARGUMENT, "null key or value");
    overrides.emplace_back(keys[i], values[i]);
  }
  return guarded([&] { socsamp::apply_overrides(config->config, overrides, config->base_dir); });
}

socsamp_status socsamp_config_validate(const socsamp_config* config) {
  if (!config) return fail(SOCSAMP_ERR_ARGUMENT, "null config");
  return guarded([&] { socsamp::validate_config(config->config); });
}

socsamp_status socsamp_config_serialize(const socsamp_config* config, char** out) {
  if (!config || !out) return fail(SOCSAMP_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = duplicate(socsamp::serialize_config(config->config)); });
}

uint64_t socsamp_config_digest(const socsamp_config* config) {
  return config ? socsamp::config_digest(config->config) : 0;
}

void socsamp_config_free(socsamp_config* config) { delete config; }

socsamp_status socsamp_simulate(const socsamp_config* config, socsamp_summary** out) {
  if (!config || !out) return fail(SOCSAMP_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    socsamp::validate_config(config->config);
    auto handle = std::make_unique<socsamp_summary>();
    handle->summary = socsamp::run_experiment(config->config);
    *out = handle.release();
  });
}

socsamp_status socsamp_summary_text(const socsamp_summary* summary, char** out) {
  if (!summary || !out) return fail(SOCSAMP_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = duplicate(socsamp::summary_text(summary->summary)); });
}

int socsamp_summary_passed(const socsamp_summary* summary) { return summary && summary->summary.passed() ? 1 : 0; }

double socsamp_summary_wall_seconds(const socsamp_summary* summary) {
  return summary ? summary->summary.wall_seconds : 0.0;
}

void socsamp_summary_free(socsamp_summary* summary) { delete summary; }

socsamp_status socsamp_analyze(const socsamp_config* config, char** report) {
  if (!config || !report) return fail(SOCSAMP_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    socsamp::validate_config(config->config);
    *report = duplicate(socsamp::report_text(socsamp::analyze_config(config->config)));
  });
}

socsamp_status socsamp_check(const socsamp_config* config, char** text, int* all_passed) {
  if (!config || !text) return fail(SOCSAMP_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto checks = socsamp::check_assumptions(config->config);
    bool ok = true;
    for (const auto& c : checks) ok = ok && c.passed;
    if (all_passed) *all_passed = ok ? 1 : 0;
    *text = duplicate(socsamp::checks_text(checks));
  });
}

socsamp_status socsamp_replay(const socsamp_config* config, uint64_t trial, const char* stride, char** csv) {
  if (!config || !csv) return fail(SOCSAMP_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    socsamp::validate_config(config->config);
    if (trial >= static_cast<uint64_t>(config->config.replications)) {
      throw socsamp::ConfigError("trial " + std::to_string(trial) + " is outside 0.." +
                                 std::to_string(config->config.replications - 1));
    }
    const auto s = stride ? socsamp::Stride::parse(stride) : socsamp::Stride{socsamp::Stride::Kind::all, 1};
    *csv = duplicate(socsamp::trace_csv(socsamp::replay_trial(config->config, trial, s)));
  });
}

}  // extern "C"
