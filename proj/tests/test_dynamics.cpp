#include <gtest/gtest.h>

#include "socsamp/analysis.hpp"
#include "socsamp/dynamics.hpp"
#include "socsamp/errors.hpp"

using namespace socsamp;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

TrialConfig base_config(int n, int m, const InitialOpinions& x, long horizon) {
  TrialConfig c;
  c.agents = n;
  c.opinions = m;
  c.initial = x;
  c.network = WeightMatrixModel::fixed(metropolis_complete(n));
  c.network.agents = n;
  c.mixing = MixingMatrices::from_b(n, 1.0);
  c.horizon = horizon;
  c.seed = 1234;
  return c;
}

}  // namespace

TEST(StepSize, Examples) {
  const StepSchedule s{1.0, 0.75, 0};
  EXPECT_DOUBLE_EQ(step_size(s, 1), 1.0);
  EXPECT_DOUBLE_EQ(step_size(s, 16), 0.125);
  EXPECT_THROW(step_size(s, 0), DomainError);
  const StepSchedule harmonic{2.0, 1.0, 0};
  EXPECT_DOUBLE_EQ(harmonic.limit_constant(), 0.5);
  for (long k = 1; k < 100; ++k)
    EXPECT_NEAR(1.0 / step_size(harmonic, k + 1) - 1.0 / step_size(harmonic, k), 0.5, 1e-12);
  EXPECT_EQ(s.limit_constant(), 0.0);
}

TEST(StepSchedule, RejectsExponentOutsideRange) {
  try {
    StepSchedule{1.0, 0.4, 0}.validate();
    FAIL();
  } catch (const AssumptionError& e) {
    EXPECT_NE(std::string(e.what()).find("A1 violated"), std::string::npos);
  }
  EXPECT_THROW((StepSchedule{1.0, 1.1, 0}.validate()), AssumptionError);
  EXPECT_NO_THROW((StepSchedule{1.0, 1.0, 0}.validate()));
}

TEST(Stride, ParseAndIncludes) {
  const auto log = Stride::parse("log");
  for (long k : {0L, 1L, 2L, 5L, 10L, 20L, 50L, 100L, 20000L}) EXPECT_TRUE(log.includes(k)) << k;
  for (long k : {3L, 7L, 30L, 150L}) EXPECT_FALSE(log.includes(k)) << k;
  EXPECT_TRUE(Stride::parse("every:10").includes(30));
  EXPECT_FALSE(Stride::parse("every:10").includes(31));
  EXPECT_TRUE(Stride::parse("all").includes(17));
  EXPECT_EQ(Stride::parse(Stride::parse("every:7").to_string()), Stride::parse("every:7"));
}

TEST(UpdateStep, SingleAgentFixedPoint) {
  const auto s = StackedState::from_agents({vec({0.3, 0.7})});
  const std::vector<Message> y = {Message{1}};
  const auto next = update_step(s, Matrix::Ones(1, 1), MixingMatrices::from_b(1, 1.0), y, 0.4);
  EXPECT_TRUE(next.flat().isApprox(s.flat(), 1e-15));
  EXPECT_EQ(next.step(), 1);
}

TEST(UpdateStep, TwoAgentHandExample) {
  const auto s = initial_state({{1, 2}}, 2);
  const std::vector<Message> y = {Message{0}, Message{1}};
  const auto next = update_step(s, metropolis_complete(2), MixingMatrices::from_b(2, 1.0), y, 0.1);
  EXPECT_TRUE(next.flat().isApprox(vec({0.95, 0.05, 0.05, 0.95}), 1e-15));
  // matrix oracle: Q' = Q + delta ((W - I) (x) I) Q when Y = Q
  const Matrix wm = metropolis_complete(2) - Matrix::Identity(2, 2);
  const Matrix k = kron(wm, Matrix::Identity(2, 2));
  EXPECT_TRUE(next.flat().isApprox(s.flat() + 0.1 * k * s.flat(), 1e-15));
}

TEST(UpdateStep, RejectsBrokenMixing) {
  const auto s = initial_state({{1, 2}}, 2);
  MixingMatrices mix = MixingMatrices::from_b(2, 1.0);
  mix.a_diag[0] = 0.5;
  const std::vector<Message> y = {Message{0}, Message{1}};
  EXPECT_THROW(update_step(s, metropolis_complete(2), mix, y, 0.1), AssumptionError);
  EXPECT_THROW(update_step(s, metropolis_complete(3), MixingMatrices::from_b(2, 1.0), y, 0.1), DomainError);
}

TEST(UpdateStep, StackedFormMatchesPerAgentForm) {
  RandomStream rng(77, {0, 0, 0});
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(rng.below(6));
    const int m = 1 + static_cast<int>(rng.below(4));
    Vector flat(n * m);
    for (Eigen::Index e = 0; e < flat.size(); ++e) flat[e] = rng.normal();
    const StackedState s(n, m, flat);
    RandomStream net(static_cast<std::uint64_t>(rep), {0, kNetworkStream, 1});
    const WeightMatrix w = sample_weight_matrix(WeightMatrixModel::birkhoff(n, {0.5, 0.3, 0.2}), 1, net);
    Vector b(n);
    for (int i = 0; i < n; ++i) b[i] = rng.uniform();
    const auto mix = MixingMatrices::from_b(b);
    std::vector<Message> y;
    for (int i = 0; i < n; ++i) y.push_back(Message{static_cast<int>(rng.below(m + 1)) - 1});
    const double delta = rng.uniform();
    const auto next = update_step(s, w, mix, y, delta);

    const Vector yv = stack_messages(y, m);
    const Matrix id_m = Matrix::Identity(m, m);
    const Matrix a = Matrix(mix.a_diag.asDiagonal());
    const Matrix bm = Matrix(mix.b_diag.asDiagonal());
    const Vector expected = flat + delta * (kron(w - bm - a, id_m) * flat + kron(w - bm, id_m) * (yv - flat));
    ASSERT_LE((next.flat() - expected).cwiseAbs().maxCoeff(), 1e-12);
    for (int i = 0; i < n; ++i) {
      Vector per = (1 - delta * mix.a_diag[i]) * s.agent(i) - delta * mix.b_diag[i] * yv.segment(i * m, m);
      for (int j = 0; j < n; ++j) per += delta * w(i, j) * yv.segment(j * m, m);
      ASSERT_LE((Vector(next.agent(i)) - per).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(DecomposeStep, SumsToRealizedIncrement) {
  RandomStream rng(5, {0, 0, 0});
  const auto model = WeightMatrixModel::iid({metropolis_complete(4), Matrix::Identity(4, 4)}, {0.7, 0.3});
  const WeightMatrix wbar = mean_matrix(model);
  for (int rep = 0; rep < 50; ++rep) {
    Vector flat(4 * 3);
    for (int i = 0; i < 4; ++i) {
      Vector q(3);
      for (int m = 0; m < 3; ++m) q[m] = rng.uniform();
      flat.segment(i * 3, 3) = q / q.sum();
    }
    const StackedState s(4, 3, flat);
    RandomStream net(rep, {0, kNetworkStream, 1});
    const WeightMatrix w = sample_weight_matrix(model, 1, net);
    const auto mix = MixingMatrices::from_b(4, 0.6);
    SamplingPolicy policy;
    policy.kind = PolicyKind::censored;
    policy.censor_scale = 0.2;
    Vector p(12);
    std::vector<Message> y;
    for (int i = 0; i < 4; ++i) {
      p.segment(i * 3, 3) = sampling_distribution(policy, s.agent(i), 0.5);
      RandomStream r(rep, {0, static_cast<std::uint64_t>(i), 1});
      y.push_back(draw_message(p.segment(i * 3, 3), r));
    }
    const double delta = 0.3;
    const auto d = decompose_step(s, w, wbar, mix, p, y, delta);
    const auto next = update_step(s, w, mix, y, delta);
    ASSERT_LE((delta * (d.drift + d.censor_noise + d.martingale_noise) - (next.flat() - s.flat())).cwiseAbs().maxCoeff(),
              1e-12);
  }
}

TEST(RunTrial, IdentityNetworkIsNull) {
  auto c = base_config(4, 3, {{1, 2, 3, 1}}, 200);
  c.network = WeightMatrixModel::fixed(Matrix::Identity(4, 4));
  c.network.agents = 4;
  c.stride = Stride::parse("every:25");
  const auto trace = run_trial(c);
  for (const auto& cp : trace.checkpoints) EXPECT_EQ(cp.state.flat(), trace.checkpoints.front().state.flat());
}

TEST(RunTrial, ConservesAverageAndSums) {
  auto c = base_config(6, 3, {{1, 2, 3, 1, 1, 2}}, 1000);
  c.network = WeightMatrixModel::birkhoff(6, {0.3, 0.4, 0.3});
  c.network.agents = 6;
  c.stride = Stride::parse("every:50");
  const auto trace = run_trial(c);
  for (const auto& cp : trace.checkpoints) {
    EXPECT_LE((network_average(cp.state) - trace.initial_average).cwiseAbs().maxCoeff(), 1e-9);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(cp.state.agent(i).sum(), 1.0, 1e-9);
  }
  EXPECT_LE(trace.diagnostics.max_average_drift, 1e-9);
  EXPECT_LE(trace.diagnostics.max_noise_norm, martingale_noise_bound(6, c.mixing));
}

TEST(RunTrial, FirstStepReachesExactConsensusOnCompleteGraph) {
  // delta_1 = 1, B = I, uniform W: Q_1 = 1 (x) avg(Y_0), so every agent agrees
  const auto trace = run_trial(base_config(5, 3, {{1, 2, 3, 1, 2}}, 1));
  const auto& q1 = trace.final().state;
  for (int i = 1; i < 5; ++i) EXPECT_LE((Vector(q1.agent(i)) - Vector(q1.agent(0))).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(RunTrial, DeterministicAndStrideIndependent) {
  auto c = base_config(5, 3, {{1, 2, 3, 1, 2}}, 300);
  const auto a = run_trial(c);
  const auto b = run_trial(c);
  c.stride = Stride::parse("all");
  const auto full = run_trial(c);
  ASSERT_EQ(a.checkpoints.size(), b.checkpoints.size());
  for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
    EXPECT_EQ(a.checkpoints[i].state, b.checkpoints[i].state);
    EXPECT_EQ(full.at(a.checkpoints[i].step)->state, a.checkpoints[i].state);
  }
  EXPECT_EQ(full.checkpoints.size(), 301u);
}

TEST(RunTrial, ExtraCheckpointsAreKept) {
  auto c = base_config(3, 2, {{1, 2, 2}}, 100);
  c.extra_checkpoints = {37};
  const auto t = run_trial(c);
  ASSERT_NE(t.at(37), nullptr);
  EXPECT_EQ(t.at(37)->state.step(), 37);
  for (std::size_t i = 1; i < t.checkpoints.size(); ++i) EXPECT_LT(t.checkpoints[i - 1].step, t.checkpoints[i].step);
}

TEST(RunTrial, SilentMessagesAreCounted) {
  auto c = base_config(4, 3, {{1, 2, 3, 1}}, 200);
  c.sampling.kind = PolicyKind::censored;
  c.sampling.censor_scale = 0.3;
  c.sampling.censor_exponent = 1.0;
  c.sampling.renormalize = false;
  const auto t = run_trial(c);
  EXPECT_GT(t.diagnostics.silent_messages, 0);
  // network average is still conserved: silent messages change nothing in aggregate under B = I
  EXPECT_LE(t.diagnostics.max_average_drift, 1e-9);
}

TEST(RunTrial, CensoredSamplingStaysCloseToEstimate) {
  auto c = base_config(5, 4, {{1, 2, 3, 4, 1}}, 2000);
  c.sampling.kind = PolicyKind::censored;
  c.sampling.censor_scale = 0.05;
  c.sampling.censor_exponent = 2.0;
  c.stride = Stride::parse("every:100");
  const auto t = run_trial(c);
  for (const auto& cp : t.checkpoints) {
    if (cp.step == 0) continue;
    const double delta = step_size(c.schedule, cp.step + 1);
    const double alpha = c.sampling.threshold(delta);
    for (int i = 0; i < 5; ++i) {
      const Vector q = cp.state.agent(i);
      const Vector p = sampling_distribution(c.sampling, q, delta);
      if ((q.array() >= 0).all()) EXPECT_LE((p - q).lpNorm<1>(), 4 * 5 * alpha + 1e-12);
    }
  }
}

TEST(RunTrial, StronglyConsistentEnvelope) {
  // median over seeds of the consensus error decays across decades
  std::vector<double> e2, e3, e4;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto c = base_config(10, 3, {{1, 2, 3, 1, 2, 3, 1, 1, 2, 3}}, 10000);
    c.seed = seed;
    const auto t = run_trial(c);
    e2.push_back(t.at(100)->consensus_error);
    e3.push_back(t.at(1000)->consensus_error);
    e4.push_back(t.at(10000)->consensus_error);
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  EXPECT_GT(median(e2), median(e3));
  EXPECT_GT(median(e3), median(e4));
}

TEST(QStarRunning, TelescopesToFinalAverage) {
  RandomStream rng(3, {0, 0, 0});
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const int m = 2 + static_cast<int>(rng.below(3));
    InitialOpinions x;
    for (int i = 0; i < n; ++i) x.labels.push_back(1 + static_cast<int>(rng.below(m)));
    auto c = base_config(n, m, x, 500);
    c.mixing = MixingMatrices::from_b(n, rng.uniform());
    c.network = WeightMatrixModel::birkhoff(n, {0.5, 0.5});
    c.network.agents = n;
    c.seed = rep;
    const auto t = run_trial(c);
    ASSERT_LE((t.final().q_star_partial - network_average(t.final().state)).cwiseAbs().maxCoeff(), 1e-9) << rep;
  }
}

TEST(QStarRunning, ZeroSeriesWhenBIsIdentity) {
  const auto t = run_trial(base_config(4, 2, {{1, 2, 1, 1}}, 300));
  EXPECT_LE((t.final().q_star_partial - t.initial_average).cwiseAbs().maxCoeff(), 1e-12);
  const auto s = initial_state({{1, 2, 1, 1}}, 2);
  const std::vector<OpinionVector> none;
  EXPECT_EQ(q_star_running(none, s), network_average(s));
}

TEST(QStarRunning, PartialSumsAreCauchyWithHalfB) {
  // tail increments over the last decade are smaller than over the one before (RMS over seeds)
  double last = 0.0, previous = 0.0;
  for (std::uint64_t seed = 0; seed < 9; ++seed) {
    auto c = base_config(6, 3, {{1, 2, 3, 1, 2, 3}}, 10000);
    c.mixing = MixingMatrices::from_b(6, 0.5);
    c.seed = seed;
    const auto t = run_trial(c);
    ASSERT_TRUE(t.final().q_star_partial.allFinite());
    last += (t.at(10000)->q_star_partial - t.at(1000)->q_star_partial).squaredNorm();
    previous += (t.at(1000)->q_star_partial - t.at(100)->q_star_partial).squaredNorm();
  }
  EXPECT_LT(last, previous);
}
