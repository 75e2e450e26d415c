#include <gtest/gtest.h>

#include "socsamp/errors.hpp"
#include "socsamp/random_stream.hpp"
#include "socsamp/simplex.hpp"

using namespace socsamp;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST(EmpiricalDistribution, CountsLabels) {
  const auto d = empirical_distribution({{1, 1, 2, 3}}, 3);
  EXPECT_EQ(d.histogram, vec({0.5, 0.25, 0.25}));
  EXPECT_EQ(d.sample_count, 4);
  EXPECT_EQ(empirical_distribution({{2}}, 2).histogram, vec({0.0, 1.0}));
}

TEST(EmpiricalDistribution, RejectsOutOfRangeNamingIndex) {
  try {
    empirical_distribution({{1, 4, 2}}, 3);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("index 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(empirical_distribution({{0}}, 3), DomainError);
}

TEST(EmpiricalDistribution, IidDrawsAreMultiplesOfOneOverN) {
  RandomStream rng(7, {0, 0, 0});
  const double p[] = {0.2, 0.3, 0.4, 0.1};
  InitialOpinions x;
  for (int i = 0; i < 50; ++i) {
    const double u = rng.uniform();
    double acc = 0.0;
    int label = 4;
    for (int m = 0; m < 4; ++m) {
      acc += p[m];
      if (u < acc) {
        label = m + 1;
        break;
      }
    }
    x.labels.push_back(label);
  }
  const auto d = empirical_distribution(x, 4);
  EXPECT_NEAR(d.histogram.sum(), 1.0, 1e-15);
  for (int m = 0; m < 4; ++m) {
    const double scaled = d.histogram[m] * 50.0;
    EXPECT_NEAR(scaled, std::round(scaled), 1e-12);
    EXPECT_NEAR(d.histogram[m], p[m], 0.25);
  }
}

TEST(InitialState, OneHotAgentMajor) {
  EXPECT_EQ(initial_state({{2}}, 3).flat(), vec({0, 1, 0}));
  EXPECT_EQ(initial_state({{1, 3}}, 3).flat(), vec({1, 0, 0, 0, 0, 1}));
  const auto s = initial_state({{1, 1}}, 2);
  EXPECT_EQ(Vector(s.agent(0)), vec({1, 0}));
  EXPECT_EQ(Vector(s.agent(1)), vec({1, 0}));
}

TEST(NetworkAverage, Examples) {
  EXPECT_EQ(network_average(StackedState::from_agents({vec({1, 0}), vec({0, 1})})), vec({0.5, 0.5}));
  EXPECT_EQ(network_average(StackedState::from_agents({vec({0.3, 0.7})})), vec({0.3, 0.7}));
  EXPECT_EQ(network_average(initial_state({{1, 1, 2, 2}}, 2)), vec({0.5, 0.5}));
}

TEST(NetworkAverage, MatchesHistogramExactly) {
  RandomStream rng(11, {0, 0, 0});
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + static_cast<int>(rng.below(20));
    const int m = 1 + static_cast<int>(rng.below(6));
    InitialOpinions x;
    for (int i = 0; i < n; ++i) x.labels.push_back(1 + static_cast<int>(rng.below(m)));
    EXPECT_EQ(empirical_distribution(x, m).histogram, network_average(initial_state(x, m)));
  }
}

TEST(ConsensusError, Examples) {
  const auto pair = StackedState::from_agents({vec({1, 0}), vec({0, 1})});
  EXPECT_DOUBLE_EQ(consensus_error(pair, vec({0.5, 0.5})), 0.5);
  EXPECT_NEAR(consensus_error(StackedState::from_agents({vec({0.6, 0.4})}), vec({0.5, 0.5})), 0.1, 1e-15);
  EXPECT_EQ(consensus_error(StackedState::from_agents({vec({0.2, 0.8}), vec({0.2, 0.8})}), vec({0.2, 0.8})), 0.0);
  EXPECT_THROW(consensus_error(pair, vec({1, 0, 0})), DomainError);
}

TEST(StackedState, FlattenRoundTrip) {
  RandomStream rng(3, {0, 0, 0});
  std::vector<OpinionVector> agents;
  for (int i = 0; i < 7; ++i) {
    Vector v(4);
    for (int m = 0; m < 4; ++m) v[m] = rng.normal();
    agents.push_back(v);
  }
  const auto s = StackedState::from_agents(agents);
  EXPECT_EQ(s.to_agents(), agents);
  EXPECT_EQ(s.columns().col(3), agents[3]);
}

TEST(IsSimplex, DetectsNegativeComponents) {
  EXPECT_TRUE(is_simplex(vec({0.25, 0.75})));
  EXPECT_FALSE(is_simplex(vec({-0.1, 1.1})));
  EXPECT_FALSE(is_simplex(vec({0.5, 0.6})));
}

TEST(RandomStream, DeterministicPerId) {
  RandomStream a(42, {1, 2, 3});
  RandomStream b(42, {1, 2, 3});
  RandomStream c(42, {1, 2, 4});
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs = differs || x != c.next();
  }
  EXPECT_TRUE(differs);
  EXPECT_NE(derive_trial_seed(1, 0), derive_trial_seed(1, 1));
  EXPECT_EQ(derive_trial_seed(9, 5), derive_trial_seed(9, 5));
}

TEST(RandomStream, UniformAndBelowMoments) {
  RandomStream rng(5, {0, 0, 0});
  const int n = 200000;
  double sum = 0.0;
  std::vector<int> counts(7, 0);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    ++counts[rng.below(7)];
  }
  EXPECT_NEAR(sum / n, 0.5, 4 * std::sqrt(1.0 / 12.0 / n));
  for (int c : counts) EXPECT_NEAR(c / double(n), 1.0 / 7, 4 * std::sqrt((1.0 / 7) * (6.0 / 7) / n));
}
