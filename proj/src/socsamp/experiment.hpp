#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "socsamp/analysis.hpp"
#include "socsamp/config.hpp"
#include "socsamp/dynamics.hpp"

namespace socsamp {

struct CheckpointStats {
  long step = 0;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

struct DiagnosticsTotals {
  long simplex_violations = 0;
  long silent_messages = 0;
  long uniform_fallbacks = 0;
  long negative_sampling_components = 0;
  double max_sum_drift = 0.0;
  double max_average_drift = 0.0;
  double max_noise_norm = 0.0;
  double noise_bound = 0.0;
};

struct Predicate {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunSummary {
  std::uint64_t digest = 0;
  int trials = 0;
  long horizon = 0;
  OpinionVector initial_average;
  std::vector<CheckpointStats> consensus;
  DiagnosticsTotals diagnostics;
  std::optional<AsymptoticReport> report;
  std::string analysis_note;  // why the report is absent, when it is
  std::vector<Predicate> predicates;
  double wall_seconds = 0.0;  // kept out of summary_text so the file is reproducible

  bool passed() const;
  const CheckpointStats* at(long step) const;
};

// Runs every trial, aggregates, evaluates the enabled predicates. Writes
// trace_<t>.csv, summary.txt and report.txt under config.out_dir unless it is
// empty. Trial aborts propagate as TrialAbort (lowest failing trial index).
RunSummary run_experiment(const ExperimentConfig& config);

// Lower-level pieces of run_experiment, exposed for tests and the C API.
std::vector<TrialTrace> run_trials(const ExperimentConfig& config);
RunSummary summarize(const ExperimentConfig& config, const std::vector<TrialTrace>& traces);

std::string summary_text(const RunSummary& summary);
std::string report_text(const AsymptoticReport& report);
std::string trace_csv(const TrialTrace& trace);

// Theory only: q*, Fbar, lambda2, S0, S, S~, residual. Throws HypothesisError.
AsymptoticReport analyze_config(const ExperimentConfig& config);

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Per-assumption audit; never throws on assumption failures.
std::vector<AssumptionCheck> check_assumptions(const ExperimentConfig& config);
std::string checks_text(const std::vector<AssumptionCheck>& checks);

// Re-runs one trial from its derived seed; keeps every step by default.
TrialTrace replay_trial(const ExperimentConfig& config, std::uint64_t trial,
                        Stride stride = Stride{Stride::Kind::all, 1});

}  // namespace socsamp
