#pragma once

#include <Eigen/Dense>
#include <vector>

namespace socsamp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A length-M estimate of the opinion histogram. Components sum to one under
// the dynamics but may go negative in flight.
using OpinionVector = Vector;

bool is_simplex(const OpinionVector& v, double tol = 1e-12);

// Initial discrete opinions X_i, 1-based labels in [1, M].
struct InitialOpinions {
  std::vector<int> labels;

  int agents() const { return static_cast<int>(labels.size()); }
  bool operator==(const InitialOpinions&) const = default;
};

struct EmpiricalDistribution {
  Vector histogram;
  int sample_count = 0;
};

/// Stacked estimate of all agents, agent-major: entries [i*M, (i+1)*M) hold
/// agent i (0-based). `step` is the number of updates applied so far.
class StackedState {
 public:
  StackedState() = default;
  StackedState(int agents, int opinions);
  StackedState(int agents, int opinions, Vector flat, long step = 0);

  static StackedState from_agents(const std::vector<OpinionVector>& agents, long step = 0);
  std::vector<OpinionVector> to_agents() const;

  int agents() const { return agents_; }
  int opinions() const { return opinions_; }
  long step() const { return step_; }
  void set_step(long k) { step_ = k; }

  const Vector& flat() const { return flat_; }
  Vector& flat() { return flat_; }

  auto agent(int i) const { return flat_.segment(static_cast<Eigen::Index>(i) * opinions_, opinions_); }
  auto agent(int i) { return flat_.segment(static_cast<Eigen::Index>(i) * opinions_, opinions_); }

  // M x N view: column i is agent i.
  Eigen::Map<const Matrix> columns() const { return {flat_.data(), opinions_, agents_}; }
  Eigen::Map<Matrix> columns() { return {flat_.data(), opinions_, agents_}; }

  bool operator==(const StackedState& other) const;

 private:
  int agents_ = 0;
  int opinions_ = 0;
  long step_ = 0;
  Vector flat_;
};

EmpiricalDistribution empirical_distribution(const InitialOpinions& samples, int opinions);
StackedState initial_state(const InitialOpinions& samples, int opinions);

// (1/N) sum_i Q_i
OpinionVector network_average(const StackedState& state);

// max_i ||Q_i - target||_inf
double consensus_error(const StackedState& state, const OpinionVector& target);

}  // namespace socsamp
