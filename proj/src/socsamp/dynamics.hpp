#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "socsamp/network.hpp"
#include "socsamp/sampling.hpp"
#include "socsamp/simplex.hpp"

namespace socsamp {

/// delta_k = a / (k + k0)^gamma for k >= 1, with gamma in (1/2, 1].
struct StepSchedule {
  double amplitude = 1.0;
  double exponent = 0.75;
  long offset = 0;

  // lim (1/delta_{k+1} - 1/delta_k): 1/a when gamma = 1, else 0
  double limit_constant() const;
  // Throws AssumptionError naming A1.
  void validate() const;
  bool operator==(const StepSchedule&) const = default;
};

double step_size(const StepSchedule& schedule, long k);

// Which step indices a trace keeps. Index 0 and the horizon are always kept.
struct Stride {
  enum class Kind { logarithmic, every, all };
  Kind kind = Kind::logarithmic;
  long every = 1;

  static Stride parse(const std::string& text);
  std::string to_string() const;
  bool includes(long k) const;
  bool operator==(const Stride&) const = default;
};

struct TrialConfig {
  int agents = 0;
  int opinions = 0;
  InitialOpinions initial;
  WeightMatrixModel network;
  MixingMatrices mixing;
  SamplingPolicy sampling;
  StepSchedule schedule;
  long horizon = 0;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  Stride stride;
  std::vector<long> extra_checkpoints;
  bool track_noise = true;
};

// Dimension checks plus the A1, A2 and A4 validators.
void validate_trial_config(const TrialConfig& config);

/// One realized increment split into its three sources; the identity
/// Q_{k+1} - Q_k = delta_k (drift + censor_noise + martingale_noise) holds.
struct StepDecomposition {
  Vector drift;             // ((Wbar - I) (x) I_M) Q_k
  Vector censor_noise;      // ((Wbar - B) (x) I_M) (P_k - Q_k)
  Vector martingale_noise;  // ((W_k - B) (x) I_M)(Y_k - P_k) + ((W_k - Wbar) (x) I_M) P_k
};

StackedState update_step(const StackedState& state, const WeightMatrix& w, const MixingMatrices& mix,
                         std::span<const Message> messages, double delta_k);

StepDecomposition decompose_step(const StackedState& state, const WeightMatrix& w, const WeightMatrix& wbar,
                                 const MixingMatrices& mix, const Vector& p, std::span<const Message> messages,
                                 double delta_k);

// delta_k (1/N) ((1^T (W_k - B)) (x) I_M)(Y_k - Q_k): one term of the series
// whose sum moves the network average away from its initial value.
OpinionVector consensus_drift_term(const StackedState& state, const WeightMatrix& w, const MixingMatrices& mix,
                                   const Vector& y, double delta_k);

// Static bound on ||(T1 (x) I_M) M_k|| for doubly stochastic W_k and
// probability-valued P_k: (1 + max b) sqrt(2N) + 2 sqrt(N) <= 5 N^2 M^2.
double martingale_noise_bound(int agents, const MixingMatrices& mix);

// ||(T1 (x) I_M) v|| computed as the norm of v's disagreement component.
double disagreement_norm(const Vector& v, int agents, int opinions);

struct TrialDiagnostics {
  long simplex_violations = 0;  // (agent, step) pairs with a negative component
  long silent_messages = 0;
  long uniform_fallbacks = 0;
  long negative_sampling_components = 0;
  double max_sum_drift = 0.0;      // max |sum_m Q_{i,k}^m - 1|
  double max_average_drift = 0.0;  // max ||avg(Q_k) - avg(Q_0)||_inf
  double max_noise_norm = 0.0;     // max ||(T1 (x) I_M) M_k||
};

struct Checkpoint {
  long step = 0;
  StackedState state;
  double consensus_error = 0.0;  // against avg(Q_0)
  OpinionVector q_star_partial;  // avg(Q_0) + running sum of consensus_drift_term
};

struct TrialTrace {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  OpinionVector initial_average;
  std::vector<Checkpoint> checkpoints;
  TrialDiagnostics diagnostics;

  const Checkpoint& final() const { return checkpoints.back(); }
  const Checkpoint* at(long step) const;
};

// Runs `horizon` synchronous rounds. Deterministic in (seed, trial).
// Throws TrialAbort when a non-finite value appears.
TrialTrace run_trial(const TrialConfig& config);

}  // namespace socsamp
