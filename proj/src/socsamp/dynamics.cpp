#include "socsamp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "socsamp/errors.hpp"
#include "socsamp/format.hpp"

namespace socsamp {

double StepSchedule::limit_constant() const { return exponent == 1.0 ? 1.0 / amplitude : 0.0; }

void StepSchedule::validate() const {
  if (!(amplitude > 0.0)) throw AssumptionError("A1 violated: amplitude a = " + format_real(amplitude) + " is not > 0");
  if (!(exponent > 0.5 && exponent <= 1.0)) {
    throw AssumptionError("A1 violated: gamma = " + format_real(exponent) + " not in (1/2,1]");
  }
  if (offset < 0) throw AssumptionError("A1 violated: offset k0 = " + std::to_string(offset) + " is negative");
}

double step_size(const StepSchedule& schedule, long k) {
  if (k < 1) throw DomainError("step_size: k must be >= 1, got " + std::to_string(k));
  return schedule.amplitude / std::pow(static_cast<double>(k + schedule.offset), schedule.exponent);
}

Stride Stride::parse(const std::string& text) {
  if (text == "log") return {};
  if (text == "all") return {Kind::all, 1};
  std::string number = text;
  if (text.rfind("every:", 0) == 0) number = text.substr(6);
  try {
    std::size_t used = 0;
    const long n = std::stol(number, &used);
    if (used == number.size() && n >= 1) return {Kind::every, n};
  } catch (const std::exception&) {
  }
  throw ConfigError("experiment.stride: expected log|all|every:<n>, got '" + text + "'");
}

std::string Stride::to_string() const {
  switch (kind) {
    case Kind::logarithmic: return "log";
    case Kind::all: return "all";
    case Kind::every: return "every:" + std::to_string(every);
  }
  return "log";
}

bool Stride::includes(long k) const {
  if (k == 0) return true;
  switch (kind) {
    case Kind::all: return true;
    case Kind::every: return k % every == 0;
    case Kind::logarithmic: {
      long v = k;
      while (v % 10 == 0) v /= 10;
      return v == 1 || v == 2 || v == 5;
    }
  }
  return false;
}

void validate_trial_config(const TrialConfig& config) {
  if (config.agents < 1) throw ConfigError("experiment.agents: must be >= 1");
  if (config.opinions < 1) throw ConfigError("experiment.opinions: must be >= 1");
  if (config.horizon < 1) throw ConfigError("experiment.horizon: must be >= 1");
  if (config.initial.agents() != config.agents) {
    throw ConfigError("experiment.initial: " + std::to_string(config.initial.agents()) + " labels for N = " +
                      std::to_string(config.agents) + " agents");
  }
  if (config.network.agents != config.agents) throw ConfigError("network: matrix size does not match N");
  if (config.mixing.b_diag.size() != config.agents) throw ConfigError("mixing.b: expected N entries");
  config.schedule.validate();
  validate_model(config.network);
  validate_mixing(config.mixing);
}

namespace {

void check_dimensions(const StackedState& state, const WeightMatrix& w, const MixingMatrices& mix,
                      std::size_t message_count) {
  const int n = state.agents();
  if (w.rows() != n || w.cols() != n) throw DomainError("weight matrix does not match N");
  if (mix.a_diag.size() != n || mix.b_diag.size() != n) throw DomainError("mixing matrices do not match N");
  if (message_count != static_cast<std::size_t>(n)) throw DomainError("expected one message per agent");
}

Matrix message_columns(std::span<const Message> messages, int opinions) {
  Matrix y = Matrix::Zero(opinions, static_cast<Eigen::Index>(messages.size()));
  for (std::size_t i = 0; i < messages.size(); ++i)
    if (!messages[i].silent()) y(messages[i].index, static_cast<Eigen::Index>(i)) = 1.0;
  return y;
}

// Q' in column form; shared by update_step and run_trial.
void apply_update(Eigen::Map<Matrix> q, const Matrix& y, const WeightMatrix& w, const MixingMatrices& mix,
                  double delta_k) {
  const Matrix received = y * w.transpose();
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    q.col(i) = (1.0 - delta_k * mix.a_diag[i]) * q.col(i) - (delta_k * mix.b_diag[i]) * y.col(i) +
               delta_k * received.col(i);
  }
}

Matrix martingale_columns(const Matrix& q_law, const Matrix& y, const WeightMatrix& w, const WeightMatrix& wbar,
                          const MixingMatrices& mix) {
  const Matrix w_minus_b = w - Matrix(mix.b_diag.asDiagonal());
  return (y - q_law) * w_minus_b.transpose() + q_law * (w - wbar).transpose();
}

}  // namespace

StackedState update_step(const StackedState& state, const WeightMatrix& w, const MixingMatrices& mix,
                         std::span<const Message> messages, double delta_k) {
  check_dimensions(state, w, mix, messages.size());
  validate_mixing(mix);
  StackedState next = state;
  apply_update(next.columns(), message_columns(messages, state.opinions()), w, mix, delta_k);
  next.set_step(state.step() + 1);
  return next;
}

StepDecomposition decompose_step(const StackedState& state, const WeightMatrix& w, const WeightMatrix& wbar,
                                 const MixingMatrices& mix, const Vector& p, std::span<const Message> messages,
                                 double delta_k) {
  check_dimensions(state, w, mix, messages.size());
  validate_mixing(mix);
  (void)delta_k;
  const int n = state.agents();
  const int m = state.opinions();
  if (p.size() != state.flat().size()) throw DomainError("sampling distributions do not match N*M");
  if (wbar.rows() != n || wbar.cols() != n) throw DomainError("mean matrix does not match N");

  const Eigen::Map<const Matrix> q = state.columns();
  const Eigen::Map<const Matrix> law(p.data(), m, n);
  const Matrix y = message_columns(messages, m);
  const Matrix identity = Matrix::Identity(n, n);
  const Matrix wbar_minus_b = wbar - Matrix(mix.b_diag.asDiagonal());

  StepDecomposition out;
  const Matrix drift = q * (wbar - identity).transpose();
  const Matrix censor = (law - q) * wbar_minus_b.transpose();
  const Matrix noise = martingale_columns(law, y, w, wbar, mix);
  out.drift = Eigen::Map<const Vector>(drift.data(), drift.size());
  out.censor_noise = Eigen::Map<const Vector>(censor.data(), censor.size());
  out.martingale_noise = Eigen::Map<const Vector>(noise.data(), noise.size());
  return out;
}

OpinionVector consensus_drift_term(const StackedState& state, const WeightMatrix& w, const MixingMatrices& mix,
                                   const Vector& y, double delta_k) {
  const int n = state.agents();
  const Eigen::Map<const Matrix> ym(y.data(), state.opinions(), n);
  const Vector weights = (w - Matrix(mix.b_diag.asDiagonal())).colwise().sum().transpose();
  return (delta_k / n) * ((ym - state.columns()) * weights);
}

double martingale_noise_bound(int agents, const MixingMatrices& mix) {
  const double b_max = mix.b_diag.size() ? mix.b_diag.maxCoeff() : 0.0;
  const double n = agents;
  return (1.0 + b_max) * std::sqrt(2.0 * n) + 2.0 * std::sqrt(n);
}

double disagreement_norm(const Vector& v, int agents, int opinions) {
  const Eigen::Map<const Matrix> cols(v.data(), opinions, agents);
  return (cols.colwise() - cols.rowwise().mean()).norm();
}

const Checkpoint* TrialTrace::at(long step) const {
  auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), step,
                             [](const Checkpoint& c, long k) { return c.step < k; });
  return (it != checkpoints.end() && it->step == step) ? &*it : nullptr;
}

TrialTrace run_trial(const TrialConfig& config) {
  validate_trial_config(config);
  const int n = config.agents;
  const int m = config.opinions;

  TrialTrace trace;
  trace.trial = config.trial;
  trace.seed = config.seed;

  StackedState state = initial_state(config.initial, m);
  trace.initial_average = network_average(state);
  OpinionVector q_star = trace.initial_average;
  auto& diag = trace.diagnostics;

  auto record = [&](long k) {
    trace.checkpoints.push_back({k, state, consensus_error(state, trace.initial_average), q_star});
  };
  auto wanted = [&](long k) {
    return k == config.horizon || config.stride.includes(k) ||
           std::find(config.extra_checkpoints.begin(), config.extra_checkpoints.end(), k) !=
               config.extra_checkpoints.end();
  };
  record(0);

  Matrix law(m, n);
  Matrix y(m, n);
  SamplingDiagnostics sampling_diag;
  for (long k = 1; k <= config.horizon; ++k) {
    const double delta = step_size(config.schedule, k);
    RandomStream net_rng(config.seed, {config.trial, kNetworkStream, static_cast<std::uint64_t>(k)});
    const WeightMatrix w = sample_weight_matrix(config.network, k, net_rng);

    y.setZero();
    for (int i = 0; i < n; ++i) {
      law.col(i) = drawable_distribution(sampling_distribution(config.sampling, state.agent(i), delta, &sampling_diag),
                                         &sampling_diag);
      RandomStream rng(config.seed, {config.trial, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(k)});
      const Message msg = draw_message(law.col(i), rng);
      if (msg.silent()) {
        ++diag.silent_messages;
      } else {
        y(msg.index, i) = 1.0;
      }
    }

    if (config.track_noise) {
      const Matrix noise = martingale_columns(law, y, w, mean_matrix_at(config.network, k), config.mixing);
      diag.max_noise_norm = std::max(diag.max_noise_norm, (noise.colwise() - noise.rowwise().mean()).norm());
    }
    q_star += consensus_drift_term(state, w, config.mixing, Eigen::Map<const Vector>(y.data(), y.size()), delta);

    apply_update(state.columns(), y, w, config.mixing, delta);
    state.set_step(k);

    if (!state.flat().allFinite()) {
      std::ostringstream dump;
      dump << "delta_k = " << format_real(delta) << "\nW_k = " << format_matrix(w, "; ") << "\n";
      for (int i = 0; i < n; ++i) dump << "Q_" << i + 1 << " = " << format_row(state.agent(i)) << "\n";
      throw TrialAbort(config.trial, config.seed, k, dump.str());
    }

    const auto cols = state.columns();
    diag.max_sum_drift = std::max(diag.max_sum_drift, (cols.colwise().sum().array() - 1.0).abs().maxCoeff());
    diag.max_average_drift =
        std::max(diag.max_average_drift, (network_average(state) - trace.initial_average).cwiseAbs().maxCoeff());
    diag.simplex_violations += ((cols.array() < 0.0).colwise().any()).count();

    if (wanted(k)) record(k);
  }
  diag.negative_sampling_components = sampling_diag.negative_components;
  diag.uniform_fallbacks = sampling_diag.uniform_fallbacks;
  return trace;
}

}  // namespace socsamp
