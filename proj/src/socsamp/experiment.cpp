#include "socsamp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "socsamp/errors.hpp"
#include "socsamp/format.hpp"

namespace socsamp {

namespace {

constexpr double kConservationTol = 1e-9;

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

long analysis_step(const ExperimentConfig& config) {
  return config.analysis.step > 0 ? config.analysis.step : config.horizon;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

std::string matrix_block(const std::string& name, const Matrix& m) {
  std::string out = name + " = " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + "\n";
  if (m.size() > 0) out += format_matrix(m, "\n") + "\n";
  return out;
}

std::string pass_text(bool ok) { return ok ? "pass" : "fail"; }

// Fills the report and the covariance/normality predicates.
void add_asymptotics(const ExperimentConfig& config, const std::vector<TrialTrace>& traces, RunSummary& summary) {
  const auto& opts = config.analysis;
  auto fail_enabled = [&](const std::string& why) {
    summary.analysis_note = why;
    if (opts.covariance) summary.predicates.push_back({"covariance", false, why});
    if (opts.normality) summary.predicates.push_back({"normality", false, why});
  };
  if (config.network.kind == ModelKind::switching_periodic) {
    fail_enabled("asymptotic covariance needs an i.i.d. weight model (A2')");
    return;
  }
  if (config.agents < 2) {
    fail_enabled("asymptotic covariance needs N >= 2");
    return;
  }
  AsymptoticReport report;
  try {
    report = predict_asymptotics(config.network, config.schedule, summary.initial_average, config.agents, opts.sigma);
  } catch (const HypothesisError& e) {
    fail_enabled(e.what());
    return;
  } catch (const StabilityError& e) {
    fail_enabled(e.what());
    return;
  }

  const long step = analysis_step(config);
  if (traces.size() >= 2) {
    std::vector<StackedState> finals;
    finals.reserve(traces.size());
    for (const auto& t : traces) finals.push_back(t.at(step)->state);
    const ProjectionBasis basis = build_projection(config.agents);
    compare_empirical(report, basis, finals, step_size(config.schedule, step), opts.normality_alpha);
  }

  if (opts.covariance) {
    if (!report.has_empirical) {
      summary.predicates.push_back({"covariance", false, "needs at least 2 trials"});
    } else {
      summary.predicates.push_back({"covariance", report.cov_rel_error <= opts.cov_tolerance,
                                    "relative Frobenius error " + format_real(report.cov_rel_error) + " vs tolerance " +
                                        format_real(opts.cov_tolerance)});
    }
  }
  if (opts.normality) {
    if (traces.size() < 100) {
      summary.predicates.push_back({"normality", false, "needs at least 100 trials"});
    } else {
      const auto& n = report.normality;
      summary.predicates.push_back({"normality", n.tested > 0 && n.pass_fraction >= opts.normality_min_pass,
                                    std::to_string(n.passed) + " of " + std::to_string(n.tested) +
                                        " components pass at alpha " + format_real(opts.normality_alpha)});
    }
  }
  summary.report = std::move(report);
}

}  // namespace

bool RunSummary::passed() const {
  return std::all_of(predicates.begin(), predicates.end(), [](const Predicate& p) { return p.passed; });
}

const CheckpointStats* RunSummary::at(long step) const {
  for (const auto& c : consensus)
    if (c.step == step) return &c;
  return nullptr;
}

std::vector<TrialTrace> run_trials(const ExperimentConfig& config) {
  const auto trials = static_cast<std::size_t>(config.replications);
  std::vector<TrialTrace> traces(trials);
  std::vector<std::exception_ptr> errors(trials);

  // TrialConfig is identical across trials apart from seed and index
  const TrialConfig base = make_trial_config(config, 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < trials; t = next++) {
      TrialConfig tc = base;
      tc.trial = t;
      tc.seed = derive_trial_seed(config.master_seed, t);
      try {
        traces[t] = run_trial(tc);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };

  unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(trials));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return traces;
}

RunSummary summarize(const ExperimentConfig& config, const std::vector<TrialTrace>& traces) {
  RunSummary summary;
  summary.digest = config_digest(config);
  summary.trials = static_cast<int>(traces.size());
  summary.horizon = config.horizon;
  if (traces.empty()) return summary;
  summary.initial_average = traces.front().initial_average;

  for (std::size_t c = 0; c < traces.front().checkpoints.size(); ++c) {
    std::vector<double> errs;
    errs.reserve(traces.size());
    for (const auto& t : traces) errs.push_back(t.checkpoints[c].consensus_error);
    CheckpointStats s;
    s.step = traces.front().checkpoints[c].step;
    s.min = *std::min_element(errs.begin(), errs.end());
    s.max = *std::max_element(errs.begin(), errs.end());
    s.median = median_of(std::move(errs));
    summary.consensus.push_back(s);
  }

  const MixingMatrices mix = mixing_of(config);
  auto& d = summary.diagnostics;
  d.noise_bound = martingale_noise_bound(config.agents, mix);
  bool sums_checked = false;
  for (const auto& t : traces) {
    const auto& td = t.diagnostics;
    d.simplex_violations += td.simplex_violations;
    d.silent_messages += td.silent_messages;
    d.uniform_fallbacks += td.uniform_fallbacks;
    d.negative_sampling_components += td.negative_sampling_components;
    d.max_average_drift = std::max(d.max_average_drift, td.max_average_drift);
    d.max_noise_norm = std::max(d.max_noise_norm, td.max_noise_norm);
    // a silent message legitimately removes mass from its receivers
    if (td.silent_messages == 0) {
      d.max_sum_drift = std::max(d.max_sum_drift, td.max_sum_drift);
      sums_checked = true;
    }
  }

  if (sums_checked) {
    summary.predicates.push_back({"component_sums", d.max_sum_drift <= kConservationTol,
                                  "max |sum - 1| = " + format_real(d.max_sum_drift)});
  }
  if (mix.b_is_identity()) {
    summary.predicates.push_back({"average_conservation", d.max_average_drift <= kConservationTol,
                                  "max average drift = " + format_real(d.max_average_drift)});
  }
  summary.predicates.push_back({"noise_bound", d.max_noise_norm <= d.noise_bound,
                                "max noise norm " + format_real(d.max_noise_norm) + " vs bound " +
                                    format_real(d.noise_bound)});

  const auto& opts = config.analysis;
  if (opts.connectivity) {
    const bool ok = jointly_connected(config.network);
    summary.predicates.push_back({"connectivity", ok, ok ? "mean graph jointly strongly connected"
                                                         : "mean graph not jointly strongly connected"});
  }
  if (opts.consensus_ratio > 0.0 || opts.consensus_absolute > 0.0) {
    const CheckpointStats* end = summary.at(config.horizon);
    bool ok = true;
    std::string detail = "median error at K = " + format_real(end->median);
    if (opts.consensus_ratio > 0.0) {
      const CheckpointStats* from = summary.at(opts.consensus_from);
      if (from == nullptr) {
        ok = false;
        detail += "; no checkpoint at " + std::to_string(opts.consensus_from);
      } else {
        const double ratio = from->median > 0.0 ? end->median / from->median : 0.0;
        ok = ok && end->median <= opts.consensus_ratio * from->median;
        detail += "; ratio to k = " + std::to_string(opts.consensus_from) + " is " + format_real(ratio) +
                  " (limit " + format_real(opts.consensus_ratio) + ")";
      }
    }
    if (opts.consensus_absolute > 0.0) {
      ok = ok && end->median <= opts.consensus_absolute;
      detail += "; absolute limit " + format_real(opts.consensus_absolute);
    }
    summary.predicates.push_back({"consensus", ok, detail});
  }
  if (opts.covariance || opts.normality) add_asymptotics(config, traces, summary);
  return summary;
}

RunSummary run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<TrialTrace> traces = run_trials(config);
  RunSummary summary = summarize(config, traces);
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!config.out_dir.empty()) {
    const std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    if (config.write_traces) {
      for (const auto& t : traces) write_file(dir / ("trace_" + std::to_string(t.trial) + ".csv"), trace_csv(t));
    }
    write_file(dir / "summary.txt", summary_text(summary));
    if (summary.report) write_file(dir / "report.txt", report_text(*summary.report));
  }
  return summary;
}

std::string summary_text(const RunSummary& s) {
  std::string out;
  auto line = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  line("config_digest", hex64(s.digest));
  line("trials", std::to_string(s.trials));
  line("horizon", std::to_string(s.horizon));
  line("initial_average", format_row(s.initial_average));
  for (const auto& c : s.consensus) {
    line("consensus_error[" + std::to_string(c.step) + "]",
         format_real(c.min) + "," + format_real(c.median) + "," + format_real(c.max));
  }
  const auto& d = s.diagnostics;
  line("diagnostics.simplex_violations", std::to_string(d.simplex_violations));
  line("diagnostics.silent_messages", std::to_string(d.silent_messages));
  line("diagnostics.uniform_fallbacks", std::to_string(d.uniform_fallbacks));
  line("diagnostics.negative_sampling_components", std::to_string(d.negative_sampling_components));
  line("diagnostics.max_sum_drift", format_real(d.max_sum_drift));
  line("diagnostics.max_average_drift", format_real(d.max_average_drift));
  line("diagnostics.max_noise_norm", format_real(d.max_noise_norm));
  line("diagnostics.noise_bound", format_real(d.noise_bound));
  if (s.report) {
    line("analysis.q_star", format_row(s.report->q_star));
    line("analysis.lambda2", format_real(s.report->lambda2));
    line("analysis.lyapunov_residual", format_real(s.report->lyapunov_residual));
    if (s.report->has_empirical) {
      line("analysis.cov_rel_error", format_real(s.report->cov_rel_error));
      line("analysis.normality_pass_fraction", format_real(s.report->normality.pass_fraction));
    }
  } else if (!s.analysis_note.empty()) {
    line("analysis.skipped", s.analysis_note);
  }
  for (const auto& p : s.predicates) {
    line("predicate." + p.name, pass_text(p.passed));
    line("predicate." + p.name + ".detail", p.detail);
  }
  line("result", pass_text(s.passed()));
  return out;
}

std::string report_text(const AsymptoticReport& r) {
  std::string out;
  auto line = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  line("q_star", format_row(r.q_star));
  line("lambda2", format_real(r.lambda2));
  line("delta", format_real(r.delta));
  line("sigma_form", to_string(r.sigma_form));
  line("lyapunov_residual", format_real(r.lyapunov_residual));
  if (r.has_empirical) {
    line("trials", std::to_string(r.trials));
    line("cov_rel_error", format_real(r.cov_rel_error));
    line("normality_tested", std::to_string(r.normality.tested));
    line("normality_passed", std::to_string(r.normality.passed));
    line("normality_anomalies", std::to_string(r.normality.anomalies));
    line("normality_pass_fraction", format_real(r.normality.pass_fraction));
  } else {
    line("cov_rel_error", "nan");
    line("normality_pass_fraction", "nan");
  }
  out += matrix_block("fbar", r.fbar);
  out += matrix_block("s0", r.s0);
  out += matrix_block("s", r.s);
  out += matrix_block("s_tilde", r.s_tilde);
  if (r.has_empirical) out += matrix_block("empirical_covariance", r.empirical_covariance);
  return out;
}

std::string trace_csv(const TrialTrace& trace) {
  std::string out = "k,agent,component,value\n";
  for (const auto& c : trace.checkpoints) {
    const std::string k = std::to_string(c.step) + ",";
    for (int i = 0; i < c.state.agents(); ++i) {
      const auto q = c.state.agent(i);
      for (int m = 0; m < c.state.opinions(); ++m) {
        out += k + std::to_string(i + 1) + "," + std::to_string(m + 1) + "," + format_real(q[m]) + "\n";
      }
    }
  }
  return out;
}

AsymptoticReport analyze_config(const ExperimentConfig& config) {
  const StackedState q0 = initial_state(resolve_initial(config), config.opinions);
  return predict_asymptotics(config.network, config.schedule, q_star_prediction(q0), config.agents,
                             config.analysis.sigma);
}

std::vector<AssumptionCheck> check_assumptions(const ExperimentConfig& config) {
  std::vector<AssumptionCheck> checks;
  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      auto [ok, detail] = body();
      checks.push_back({name, ok, detail});
    } catch (const std::exception& e) {
      checks.push_back({name, false, e.what()});
    }
  };
  using Result = std::pair<bool, std::string>;

  guarded("A1 step schedule", [&]() -> Result {
    config.schedule.validate();
    return {true, "gamma = " + format_real(config.schedule.exponent) + " in (1/2,1]"};
  });
  guarded("A2 doubly stochastic", [&]() -> Result {
    for (std::size_t s = 0; s < config.network.support.size(); ++s) {
      if (!validate_doubly_stochastic(config.network.support[s])) {
        return {false, "weight matrix " + std::to_string(s + 1) + " is not doubly stochastic"};
      }
    }
    validate_model(config.network);
    return {true, "every weight matrix is doubly stochastic"};
  });
  guarded("A2 tau bound", [&]() -> Result {
    const double smallest = min_nonzero_mean_entry(config.network);
    return {smallest >= config.network.tau,
            "smallest nonzero mean weight " + format_real(smallest) + ", tau = " + format_real(config.network.tau)};
  });
  guarded("A2 joint connectivity", [&]() -> Result {
    const bool ok = jointly_connected(config.network);
    return {ok, ok ? "union graph strongly connected over every window" : "some window is not strongly connected"};
  });
  guarded("A2' strong connectivity", [&]() -> Result {
    const bool ok = strongly_connected(GraphTopology::from_weights(mean_matrix(config.network)));
    return {ok, ok ? "mean graph strongly connected" : "mean graph not strongly connected"};
  });
  guarded("A4 mixing identity", [&]() -> Result {
    validate_mixing(mixing_of(config));
    return {true, "a_ii + b_ii = 1 for every agent"};
  });
  guarded("stability", [&]() -> Result {
    const double lambda2 = second_eigenvalue(mean_matrix(config.network));
    const double delta = config.schedule.limit_constant();
    return {lambda2 < 1.0 - delta / 2.0, "lambda2 = " + format_real(lambda2) + ", requires < 1 - delta/2 = " +
                                             format_real(1.0 - delta / 2.0)};
  });
  return checks;
}

std::string checks_text(const std::vector<AssumptionCheck>& checks) {
  std::string out;
  for (const auto& c : checks) out += pass_text(c.passed) + "  " + c.name + ": " + c.detail + "\n";
  return out;
}

TrialTrace replay_trial(const ExperimentConfig& config, std::uint64_t trial, Stride stride) {
  TrialConfig tc = make_trial_config(config, trial);
  tc.stride = stride;
  return run_trial(tc);
}

}  // namespace socsamp
