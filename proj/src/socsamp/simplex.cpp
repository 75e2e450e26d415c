#include "socsamp/simplex.hpp"

#include <string>

#include "socsamp/errors.hpp"

namespace socsamp {

namespace {

void check_labels(const InitialOpinions& samples, int opinions) {
  if (opinions < 1) throw DomainError("opinion count M must be >= 1, got " + std::to_string(opinions));
  if (samples.labels.empty()) throw DomainError("at least one initial opinion is required");
  for (std::size_t i = 0; i < samples.labels.size(); ++i) {
    const int x = samples.labels[i];
    if (x < 1 || x > opinions) {
      throw DomainError("initial opinion at index " + std::to_string(i + 1) + " is " + std::to_string(x) +
                        ", outside [1, " + std::to_string(opinions) + "]");
    }
  }
}

}  // namespace

bool is_simplex(const OpinionVector& v, double tol) {
  return (v.array() >= -tol).all() && std::abs(v.sum() - 1.0) <= tol;
}

StackedState::StackedState(int agents, int opinions) : StackedState(agents, opinions, Vector::Zero(agents * opinions)) {}

StackedState::StackedState(int agents, int opinions, Vector flat, long step)
    : agents_(agents), opinions_(opinions), step_(step), flat_(std::move(flat)) {
  if (agents < 1 || opinions < 1) throw DomainError("stacked state needs N >= 1 and M >= 1");
  if (flat_.size() != static_cast<Eigen::Index>(agents) * opinions) {
    throw DomainError("stacked vector has length " + std::to_string(flat_.size()) + ", expected N*M = " +
                      std::to_string(agents * opinions));
  }
}

StackedState StackedState::from_agents(const std::vector<OpinionVector>& agents, long step) {
  if (agents.empty()) throw DomainError("stacked state needs at least one agent");
  const auto m = static_cast<int>(agents.front().size());
  Vector flat(static_cast<Eigen::Index>(agents.size()) * m);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].size() != m) throw DomainError("agent " + std::to_string(i + 1) + " has a different M");
    flat.segment(static_cast<Eigen::Index>(i) * m, m) = agents[i];
  }
  return {static_cast<int>(agents.size()), m, std::move(flat), step};
}

std::vector<OpinionVector> StackedState::to_agents() const {
  std::vector<OpinionVector> out;
  out.reserve(agents_);
  for (int i = 0; i < agents_; ++i) out.emplace_back(agent(i));
  return out;
}

bool StackedState::operator==(const StackedState& other) const {
  return agents_ == other.agents_ && opinions_ == other.opinions_ && step_ == other.step_ && flat_ == other.flat_;
}

EmpiricalDistribution empirical_distribution(const InitialOpinions& samples, int opinions) {
  check_labels(samples, opinions);
  const int n = samples.agents();
  Vector counts = Vector::Zero(opinions);
  for (int x : samples.labels) counts[x - 1] += 1.0;
  return {counts / static_cast<double>(n), n};
}

StackedState initial_state(const InitialOpinions& samples, int opinions) {
  check_labels(samples, opinions);
  StackedState state(samples.agents(), opinions);
  for (int i = 0; i < samples.agents(); ++i) state.agent(i)[samples.labels[i] - 1] = 1.0;
  return state;
}

OpinionVector network_average(const StackedState& state) {
  return state.columns().rowwise().sum() / static_cast<double>(state.agents());
}

double consensus_error(const StackedState& state, const OpinionVector& target) {
  if (target.size() != state.opinions()) {
    throw DomainError("consensus target has length " + std::to_string(target.size()) + ", state has M = " +
                      std::to_string(state.opinions()));
  }
  return (state.columns().colwise() - target).cwiseAbs().maxCoeff();
}

}  // namespace socsamp
