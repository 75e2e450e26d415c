#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "socsamp/analysis.hpp"
#include "socsamp/dynamics.hpp"

namespace socsamp {

// How initial opinions are produced: explicit labels, or i.i.d. draws from a
// distribution made once per experiment from the master seed.
struct InitialSpec {
  enum class Kind { labels, iid };
  Kind kind = Kind::labels;
  std::vector<int> labels;
  std::vector<double> distribution;

  bool operator==(const InitialSpec&) const = default;
};

struct AnalysisOptions {
  bool normality = true;
  bool covariance = true;
  bool connectivity = true;
  SigmaForm sigma = SigmaForm::categorical;
  long step = 0;  // 0: analyse the final state
  double cov_tolerance = 0.20;
  double normality_min_pass = 0.90;
  double normality_alpha = 0.01;
  // optional consensus predicate: err(K) <= ratio * err(from) and <= absolute
  long consensus_from = 0;
  double consensus_ratio = 0.0;
  double consensus_absolute = 0.0;

  bool operator==(const AnalysisOptions&) const = default;
};

struct ExperimentConfig {
  int agents = 0;
  int opinions = 0;
  InitialSpec initial;
  WeightMatrixModel network;
  Vector b_diag;
  Vector a_diag;  // empty: 1 - b, the only choice that satisfies A4
  SamplingPolicy sampling;
  StepSchedule schedule;
  long horizon = 0;
  Stride stride;
  std::uint64_t master_seed = 0;
  int replications = 1;
  int threads = 1;
  std::string out_dir = "out";
  bool write_traces = true;
  AnalysisOptions analysis;

  bool operator==(const ExperimentConfig&) const;
};

/// Schema-level parse of the key-value text. `[section]` headers or dotted
/// `section.key = value` lines; `#` starts a comment. Matrices are inline
/// ("r,r;r,r", "uniform", "identity") or "file:<path>" relative to base_dir.
ExperimentConfig parse_config(std::string_view text, const std::string& base_dir = ".");
ExperimentConfig parse_config_file(const std::string& path);

// Overrides dotted keys with the same parsing rules as the file. A batch is
// applied at once, so a kind switch can arrive together with its keys.
void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value,
                    const std::string& base_dir = ".");
void apply_overrides(ExperimentConfig& config, const std::vector<std::pair<std::string, std::string>>& overrides,
                     const std::string& base_dir = ".");

// Assumption and cross-field validation (A1, A2, A4, dimensions).
void validate_config(const ExperimentConfig& config);

// parse_config_file followed by validate_config.
ExperimentConfig load_config(const std::string& path);

// Canonical text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

// FNV-1a of the canonical text with run-placement keys (threads, out) removed.
std::uint64_t config_digest(const ExperimentConfig& config);

InitialOpinions resolve_initial(const ExperimentConfig& config);
MixingMatrices mixing_of(const ExperimentConfig& config);
TrialConfig make_trial_config(const ExperimentConfig& config, std::uint64_t trial);

// Reads row-major comma-separated matrices, one row per line; blank lines
// separate consecutive matrices.
std::vector<WeightMatrix> read_matrix_file(const std::string& path);
std::vector<WeightMatrix> parse_matrix_list(const std::string& text, int agents, const std::string& base_dir,
                                            const std::string& key);

}  // namespace socsamp
