#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "socsamp/random_stream.hpp"
#include "socsamp/simplex.hpp"

namespace socsamp {

// Row i holds the weights agent i puts on the messages it receives.
using WeightMatrix = Matrix;

enum class ModelKind { fixed, iid_finite_support, birkhoff_random, switching_periodic };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& text);

/// Law of the random weight sequence {W_k}.
///
/// - fixed: W_k = support[0].
/// - iid_finite_support: W_k drawn from `support` with `probabilities`.
/// - birkhoff_random: W_k = weights[0] I + sum_p weights[p] Pi_p with
///   independent uniformly random permutation matrices Pi_p.
/// - switching_periodic: W_k = support[k mod support.size()].
struct WeightMatrixModel {
  ModelKind kind = ModelKind::fixed;
  int agents = 0;
  std::vector<WeightMatrix> support;
  std::vector<double> probabilities;
  int permutation_count = 0;
  std::vector<double> birkhoff_weights;
  double tau = 1e-6;
  int window = 0;

  static WeightMatrixModel fixed(WeightMatrix w, double tau = 1e-6);
  static WeightMatrixModel iid(std::vector<WeightMatrix> support, std::vector<double> probabilities, double tau = 1e-6);
  static WeightMatrixModel birkhoff(int agents, std::vector<double> weights, double tau = 1e-6);
  static WeightMatrixModel switching(std::vector<WeightMatrix> period, int window, double tau = 1e-6);

  // Exact equality; matrices of different shapes compare unequal.
  bool operator==(const WeightMatrixModel& other) const;
};

// Constant diagonal mixing coefficients A = diag(a), B = diag(b).
struct MixingMatrices {
  Vector a_diag;
  Vector b_diag;

  static MixingMatrices from_b(int agents, double b);
  static MixingMatrices from_b(Vector b);
  bool b_is_identity() const;
};

// Edge (i, j) means agent i receives from agent j.
struct GraphTopology {
  int nodes = 0;
  std::vector<std::uint8_t> adjacency;

  explicit GraphTopology(int n) : nodes(n), adjacency(static_cast<std::size_t>(n) * n, 0) {}
  static GraphTopology from_weights(const WeightMatrix& w);

  bool edge(int i, int j) const { return adjacency[static_cast<std::size_t>(i) * nodes + j] != 0; }
  void set_edge(int i, int j, bool on = true) { adjacency[static_cast<std::size_t>(i) * nodes + j] = on; }
};

bool validate_doubly_stochastic(const WeightMatrix& w, double tol = 1e-12);

// Uniform weights 1/N on the complete graph.
WeightMatrix metropolis_complete(int agents);

// Throws ConfigError for structural problems, AssumptionError naming A2 when
// a support matrix is not doubly stochastic or the tau bound fails.
void validate_model(const WeightMatrixModel& model);

// Throws AssumptionError naming A4 unless a_ii + b_ii = 1 with a, b >= 0.
void validate_mixing(const MixingMatrices& mix, double tol = 1e-12);

WeightMatrix sample_weight_matrix(const WeightMatrixModel& model, long k, RandomStream& rng);

// E[W_k] averaged over one period (constant for every kind except switching).
WeightMatrix mean_matrix(const WeightMatrixModel& model);
// E[W_k] at a specific step.
WeightMatrix mean_matrix_at(const WeightMatrixModel& model, long k);

bool strongly_connected(const GraphTopology& g);

// Union graph over every window of `window + 1` consecutive graphs of the
// periodic sequence is strongly connected, for all offsets.
bool jointly_connected(std::span<const GraphTopology> period, int window);
bool jointly_connected(const WeightMatrixModel& model);

// Second-largest eigenvalue of (W + W^T)/2 (0 for N = 1).
double second_eigenvalue(const WeightMatrix& wbar);
// 1 - second_eigenvalue(wbar).
double spectral_gap(const WeightMatrix& wbar);

// Smallest nonzero entry of the mean matrix, or +inf if none.
double min_nonzero_mean_entry(const WeightMatrixModel& model);

}  // namespace socsamp
