#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "socsamp/config.hpp"
#include "socsamp/errors.hpp"

using namespace socsamp;

namespace {

const char* kSmall = R"(
[experiment]
agents = 3
opinions = 2
initial = labels:1,2,2
horizon = 100
replications = 4
seed = 9

[network]
kind = fixed
matrix = 0.5,0.25,0.25; 0.25,0.5,0.25; 0.25,0.25,0.5

[schedule]
gamma = 0.75
)";

template <class E>
std::string error_of(const std::string& text) {
  try {
    validate_config(parse_config(text));
  } catch (const E& e) {
    return e.what();
  }
  return "<no error>";
}

std::string with(const std::string& key, const std::string& value) {
  return std::string(kSmall) + "\n" + key + " = " + value + "\n";
}

}  // namespace

TEST(Config, ParsesSectionsAndDefaults) {
  const auto c = parse_config(kSmall);
  EXPECT_EQ(c.agents, 3);
  EXPECT_EQ(c.initial.labels, (std::vector<int>{1, 2, 2}));
  EXPECT_EQ(c.network.kind, ModelKind::fixed);
  EXPECT_DOUBLE_EQ(c.network.support[0](0, 0), 0.5);
  EXPECT_EQ(c.b_diag, Vector::Ones(3));
  EXPECT_EQ(c.sampling.kind, PolicyKind::direct);
  EXPECT_EQ(c.master_seed, 9u);
  EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, ShippedCompleteGraphConfig) {
  const auto c = load_config(SOCSAMP_SOURCE_DIR "/configs/complete_graph_50.cfg");
  EXPECT_EQ(c.agents, 50);
  EXPECT_EQ(c.opinions, 4);
  EXPECT_DOUBLE_EQ(c.schedule.exponent, 0.75);
  EXPECT_DOUBLE_EQ(c.schedule.amplitude, 1.0);
  EXPECT_EQ(c.replications, 1000);
  EXPECT_EQ(c.sampling.kind, PolicyKind::direct);
  EXPECT_EQ(c.b_diag, Vector::Ones(50));
  EXPECT_EQ(c.network.support[0], metropolis_complete(50));
  const auto x = resolve_initial(c);
  EXPECT_EQ(x.agents(), 50);
  EXPECT_EQ(resolve_initial(c), x);
}

TEST(Config, RoundTripIsExact) {
  std::vector<std::string> texts = {kSmall, with("network.tau", "0.01")};
  texts.push_back(R"(
experiment.agents = 4
experiment.opinions = 3
experiment.initial = iid:0.3333333333333333,0.3333333333333333,0.3333333333333334
experiment.horizon = 50
network.kind = birkhoff
network.weights = 0.1,0.3,0.6
sampling.kind = censored
sampling.c = 0.1
sampling.renormalize = false
mixing.b = 0.1,0.2,0.3,0.4
analysis.sigma = diagonal
analysis.step = 25
)");
  texts.push_back(R"(
experiment.agents = 2
experiment.opinions = 2
experiment.initial = 1,2
experiment.horizon = 10
network.kind = iid
network.support = identity | uniform
network.probabilities = 0.25,0.75
)");
  for (const auto& t : texts) {
    const auto c = parse_config(t);
    const auto text = serialize_config(c);
    EXPECT_EQ(parse_config(text), c) << text;
    EXPECT_EQ(serialize_config(parse_config(text)), text);
  }
}

TEST(Config, FileMatricesResolveRelativeToConfig) {
  const auto dir = std::filesystem::temp_directory_path() / "socsamp_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream m(dir / "period.txt");
    m << "1,0\n0,1\n\n0.5,0.5\n0.5,0.5\n";
    std::ofstream c(dir / "exp.cfg");
    c << "experiment.agents = 2\nexperiment.opinions = 2\nexperiment.initial = 1,2\nexperiment.horizon = 5\n"
         "network.kind = switching\nnetwork.support = file:period.txt\n";
  }
  const auto c = load_config((dir / "exp.cfg").string());
  ASSERT_EQ(c.network.support.size(), 2u);
  EXPECT_EQ(c.network.support[1], Matrix::Constant(2, 2, 0.5));
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

TEST(Config, SchemaErrorsNameKey) {
  EXPECT_NE(error_of<ConfigError>(with("experiment.bogus", "1")).find("experiment.bogus"), std::string::npos);
  EXPECT_NE(error_of<ConfigError>(with("schedule.a", "abc")).find("schedule.a"), std::string::npos);
  EXPECT_NE(error_of<ConfigError>(with("mixing.b", "1,1")).find("mixing.b"), std::string::npos);
  EXPECT_NE(error_of<ConfigError>(with("network.support", "uniform")).find("network.support"), std::string::npos);
  EXPECT_NE(error_of<ConfigError>(with("experiment.threads", "-1")).find("experiment.threads: must be >= 0"), std::string::npos);
  EXPECT_NE(error_of<ConfigError>(std::string(kSmall) + "\nnetwork.kind = fixed\n").find("duplicate"),
            std::string::npos);
  std::string text = kSmall;
  text.replace(text.find("labels:1,2,2"), 12, "labels:1,2,3");
  EXPECT_NE(error_of<ConfigError>(text).find("exceeds M"), std::string::npos);
}

TEST(Config, AssumptionErrorsNameAssumption) {
  std::string g = kSmall;
  g.replace(g.find("gamma = 0.75"), 12, "gamma = 0.4");
  EXPECT_NE(error_of<AssumptionError>(g).find("A1 violated"), std::string::npos);

  std::string w = kSmall;
  w.replace(w.find("0.5,0.25,0.25; 0.25,0.5,0.25"), 28, "0.6,0.2,0.2; 0.25,0.5,0.25");
  EXPECT_NE(error_of<AssumptionError>(w).find("A2"), std::string::npos);

  EXPECT_NE(error_of<AssumptionError>(with("mixing.b", "1.2")).find("A4 violated"), std::string::npos);
  const auto a4 = error_of<AssumptionError>(with("mixing.a", "0,0,0.2"));
  EXPECT_NE(a4.find("A4 violated: a_ii+b_ii = 1.2 at i=3"), std::string::npos) << a4;
}

TEST(Config, OverridesUseFileRules) {
  auto c = parse_config(kSmall);
  apply_override(c, "experiment.seed", "77");
  EXPECT_EQ(c.master_seed, 77u);
  EXPECT_THROW(apply_override(c, "network.kind", "birkhoff"), ConfigError);  // needs weights
  apply_overrides(c, {{"network.kind", "birkhoff"}, {"network.weights", "0.5,0.5"}});
  EXPECT_EQ(c.network.kind, ModelKind::birkhoff_random);
  EXPECT_THROW(apply_override(c, "no.such", "1"), ConfigError);
  EXPECT_THROW(apply_override(c, "experiment.horizon", "-3"), ConfigError);
  apply_override(c, "network.kind", "fixed");
  EXPECT_EQ(c.network.support[0], metropolis_complete(3));
}

TEST(Config, DigestIgnoresPlacementOnly) {
  auto a = parse_config(kSmall);
  auto b = a;
  b.threads = 8;
  b.out_dir = "elsewhere";
  EXPECT_EQ(config_digest(a), config_digest(b));
  b.master_seed = 10;
  EXPECT_NE(config_digest(a), config_digest(b));
}

TEST(Config, TrialConfigsDifferOnlyBySeed) {
  const auto c = parse_config(kSmall);
  const auto t0 = make_trial_config(c, 0);
  const auto t3 = make_trial_config(c, 3);
  EXPECT_EQ(t3.trial, 3u);
  EXPECT_EQ(t3.seed, derive_trial_seed(9, 3));
  EXPECT_NE(t0.seed, t3.seed);
  EXPECT_EQ(t0.initial, t3.initial);
}
