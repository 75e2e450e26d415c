#include "socsamp/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "socsamp/errors.hpp"
#include "socsamp/format.hpp"

namespace socsamp {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::fixed: return "fixed";
    case ModelKind::iid_finite_support: return "iid";
    case ModelKind::birkhoff_random: return "birkhoff";
    case ModelKind::switching_periodic: return "switching";
  }
  return "?";
}

bool WeightMatrixModel::operator==(const WeightMatrixModel& o) const {
  if (kind != o.kind || agents != o.agents || probabilities != o.probabilities ||
      permutation_count != o.permutation_count || birkhoff_weights != o.birkhoff_weights || tau != o.tau ||
      window != o.window || support.size() != o.support.size()) {
    return false;
  }
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i].rows() != o.support[i].rows() || support[i].cols() != o.support[i].cols()) return false;
    if (support[i] != o.support[i]) return false;
  }
  return true;
}

ModelKind model_kind_from_string(const std::string& text) {
  if (text == "fixed") return ModelKind::fixed;
  if (text == "iid") return ModelKind::iid_finite_support;
  if (text == "birkhoff") return ModelKind::birkhoff_random;
  if (text == "switching") return ModelKind::switching_periodic;
  throw ConfigError("network.kind: expected one of fixed|iid|birkhoff|switching, got '" + text + "'");
}

WeightMatrixModel WeightMatrixModel::fixed(WeightMatrix w, double tau) {
  WeightMatrixModel m;
  m.kind = ModelKind::fixed;
  m.agents = static_cast<int>(w.rows());
  m.support = {std::move(w)};
  m.probabilities = {1.0};
  m.tau = tau;
  return m;
}

WeightMatrixModel WeightMatrixModel::iid(std::vector<WeightMatrix> support, std::vector<double> probabilities,
                                         double tau) {
  WeightMatrixModel m;
  m.kind = ModelKind::iid_finite_support;
  m.agents = support.empty() ? 0 : static_cast<int>(support.front().rows());
  m.support = std::move(support);
  m.probabilities = std::move(probabilities);
  m.tau = tau;
  return m;
}

WeightMatrixModel WeightMatrixModel::birkhoff(int agents, std::vector<double> weights, double tau) {
  WeightMatrixModel m;
  m.kind = ModelKind::birkhoff_random;
  m.agents = agents;
  m.permutation_count = static_cast<int>(weights.size()) - 1;
  m.birkhoff_weights = std::move(weights);
  m.tau = tau;
  return m;
}

WeightMatrixModel WeightMatrixModel::switching(std::vector<WeightMatrix> period, int window, double tau) {
  WeightMatrixModel m;
  m.kind = ModelKind::switching_periodic;
  m.agents = period.empty() ? 0 : static_cast<int>(period.front().rows());
  m.support = std::move(period);
  m.window = window;
  m.tau = tau;
  return m;
}

MixingMatrices MixingMatrices::from_b(int agents, double b) { return from_b(Vector::Constant(agents, b)); }

MixingMatrices MixingMatrices::from_b(Vector b) {
  MixingMatrices mix;
  mix.a_diag = Vector::Ones(b.size()) - b;
  mix.b_diag = std::move(b);
  return mix;
}

bool MixingMatrices::b_is_identity() const { return (b_diag.array() == 1.0).all(); }

GraphTopology GraphTopology::from_weights(const WeightMatrix& w) {
  GraphTopology g(static_cast<int>(w.rows()));
  for (int i = 0; i < g.nodes; ++i)
    for (int j = 0; j < g.nodes; ++j) g.set_edge(i, j, w(i, j) > 0.0);
  return g;
}

bool validate_doubly_stochastic(const WeightMatrix& w, double tol) {
  if (w.rows() != w.cols() || w.rows() == 0) return false;
  if (!w.allFinite() || (w.array() < 0.0).any()) return false;
  const Vector rows = w.rowwise().sum();
  const Vector cols = w.colwise().sum().transpose();
  return (rows.array() - 1.0).abs().maxCoeff() <= tol && (cols.array() - 1.0).abs().maxCoeff() <= tol;
}

WeightMatrix metropolis_complete(int agents) {
  if (agents < 1) throw DomainError("metropolis_complete needs N >= 1, got " + std::to_string(agents));
  return WeightMatrix::Constant(agents, agents, 1.0 / agents);
}

void validate_model(const WeightMatrixModel& model) {
  if (model.agents < 1) throw ConfigError("network: agent count must be >= 1");
  if (model.tau <= 0.0) throw ConfigError("network.tau: must be > 0, got " + format_real(model.tau));
  if (model.window < 0) throw ConfigError("network.window: must be >= 0");

  if (model.kind == ModelKind::birkhoff_random) {
    if (model.permutation_count < 1 ||
        model.birkhoff_weights.size() != static_cast<std::size_t>(model.permutation_count) + 1) {
      throw ConfigError("network.weights: birkhoff model needs identity weight plus one weight per permutation");
    }
    double total = 0.0;
    for (double w : model.birkhoff_weights) {
      if (!(w >= 0.0)) throw ConfigError("network.weights: mixing weights must be >= 0");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw ConfigError("network.weights: mixing weights sum to " + format_real(total) + ", expected 1");
    }
  } else {
    if (model.support.empty()) throw ConfigError("network.support: empty support");
    for (std::size_t s = 0; s < model.support.size(); ++s) {
      const auto& w = model.support[s];
      if (w.rows() != model.agents || w.cols() != model.agents) {
        throw ConfigError("network.support: matrix " + std::to_string(s + 1) + " is " + std::to_string(w.rows()) +
                          "x" + std::to_string(w.cols()) + ", expected " + std::to_string(model.agents) + "x" +
                          std::to_string(model.agents));
      }
      if (!validate_doubly_stochastic(w)) {
        throw AssumptionError("A2 violated: weight matrix " + std::to_string(s + 1) +
                              " is not doubly stochastic (row sums, column sums, or sign)");
      }
    }
    if (model.kind == ModelKind::fixed && model.support.size() != 1) {
      throw ConfigError("network.matrix: fixed model takes exactly one matrix");
    }
    if (model.kind == ModelKind::iid_finite_support) {
      if (model.probabilities.size() != model.support.size()) {
        throw ConfigError("network.probabilities: expected " + std::to_string(model.support.size()) + " entries");
      }
      double total = 0.0;
      for (double p : model.probabilities) {
        if (!(p >= 0.0)) throw ConfigError("network.probabilities: entries must be >= 0");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12) {
        throw ConfigError("network.probabilities: sum to " + format_real(total) + ", expected 1");
      }
    }
  }

  const double smallest = min_nonzero_mean_entry(model);
  if (smallest < model.tau) {
    throw AssumptionError("A2 violated: nonzero mean weight " + format_real(smallest) + " is below tau = " +
                          format_real(model.tau));
  }
}

void validate_mixing(const MixingMatrices& mix, double tol) {
  if (mix.a_diag.size() != mix.b_diag.size()) throw DomainError("mixing: a and b have different lengths");
  for (Eigen::Index i = 0; i < mix.a_diag.size(); ++i) {
    const double a = mix.a_diag[i];
    const double b = mix.b_diag[i];
    if (!(a >= 0.0) || !(b >= 0.0)) {
      throw AssumptionError("A4 violated: negative mixing coefficient at i=" + std::to_string(i + 1));
    }
    if (std::abs(a + b - 1.0) > tol) {
      throw AssumptionError("A4 violated: a_ii+b_ii = " + format_real(a + b) + " at i=" + std::to_string(i + 1));
    }
  }
}

WeightMatrix sample_weight_matrix(const WeightMatrixModel& model, long k, RandomStream& rng) {
  switch (model.kind) {
    case ModelKind::fixed:
      if (model.support.empty()) throw ConfigError("network.support: empty support");
      return model.support.front();
    case ModelKind::switching_periodic: {
      if (model.support.empty()) throw ConfigError("network.support: empty support");
      const auto period = static_cast<long>(model.support.size());
      return model.support[static_cast<std::size_t>(((k % period) + period) % period)];
    }
    case ModelKind::iid_finite_support: {
      if (model.support.empty()) throw ConfigError("network.support: empty support");
      const double u = rng.uniform();
      double acc = 0.0;
      for (std::size_t s = 0; s < model.support.size(); ++s) {
        acc += model.probabilities[s];
        if (u < acc) return model.support[s];
      }
      // u landed in the rounding slack above the last cumulative sum
      for (std::size_t s = model.support.size(); s-- > 0;)
        if (model.probabilities[s] > 0.0) return model.support[s];
      return model.support.back();
    }
    case ModelKind::birkhoff_random: {
      const int n = model.agents;
      WeightMatrix w = model.birkhoff_weights[0] * WeightMatrix::Identity(n, n);
      std::vector<int> perm(static_cast<std::size_t>(n));
      for (int p = 1; p <= model.permutation_count; ++p) {
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = n - 1; i > 0; --i) {
          const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
          std::swap(perm[i], perm[j]);
        }
        const double weight = model.birkhoff_weights[p];
        for (int i = 0; i < n; ++i) w(i, perm[i]) += weight;
      }
      return w;
    }
  }
  throw ConfigError("network.kind: unknown model kind");
}

WeightMatrix mean_matrix(const WeightMatrixModel& model) {
  switch (model.kind) {
    case ModelKind::fixed:
      return model.support.front();
    case ModelKind::iid_finite_support: {
      WeightMatrix mean = WeightMatrix::Zero(model.agents, model.agents);
      for (std::size_t s = 0; s < model.support.size(); ++s) mean += model.probabilities[s] * model.support[s];
      return mean;
    }
    case ModelKind::switching_periodic: {
      WeightMatrix mean = WeightMatrix::Zero(model.agents, model.agents);
      for (const auto& w : model.support) mean += w;
      return mean / static_cast<double>(model.support.size());
    }
    case ModelKind::birkhoff_random: {
      // a uniformly random permutation matrix has mean 11^T / N
      const int n = model.agents;
      const double stay = model.birkhoff_weights[0];
      return stay * WeightMatrix::Identity(n, n) + (1.0 - stay) * WeightMatrix::Constant(n, n, 1.0 / n);
    }
  }
  throw ConfigError("network.kind: unknown model kind");
}

WeightMatrix mean_matrix_at(const WeightMatrixModel& model, long k) {
  if (model.kind == ModelKind::switching_periodic) {
    const auto period = static_cast<long>(model.support.size());
    return model.support[static_cast<std::size_t>(((k % period) + period) % period)];
  }
  return mean_matrix(model);
}

bool strongly_connected(const GraphTopology& g) {
  const int n = g.nodes;
  if (n <= 1) return true;
  auto reaches_all = [&](bool reversed) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int u = 0; u < n; ++u) {
        const bool e = reversed ? g.edge(u, v) : g.edge(v, u);
        if (e && !seen[u]) {
          seen[u] = 1;
          ++count;
          stack.push_back(u);
        }
      }
    }
    return count == n;
  };
  return reaches_all(false) && reaches_all(true);
}

bool jointly_connected(std::span<const GraphTopology> period, int window) {
  if (period.empty()) return false;
  const int n = period.front().nodes;
  const auto p = period.size();
  for (std::size_t offset = 0; offset < p; ++offset) {
    GraphTopology joined(n);
    for (int s = 0; s <= window; ++s) {
      const auto& g = period[(offset + static_cast<std::size_t>(s)) % p];
      for (std::size_t e = 0; e < joined.adjacency.size(); ++e) joined.adjacency[e] |= g.adjacency[e];
    }
    if (!strongly_connected(joined)) return false;
  }
  return true;
}

bool jointly_connected(const WeightMatrixModel& model) {
  std::vector<GraphTopology> graphs;
  if (model.kind == ModelKind::switching_periodic) {
    for (const auto& w : model.support) graphs.push_back(GraphTopology::from_weights(w));
  } else {
    graphs.push_back(GraphTopology::from_weights(mean_matrix(model)));
  }
  return jointly_connected(graphs, model.window);
}

double second_eigenvalue(const WeightMatrix& wbar) {
  if (wbar.rows() < 2) return 0.0;
  const Matrix sym = 0.5 * (wbar + wbar.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  const Vector& ev = solver.eigenvalues();  // ascending
  return ev[ev.size() - 2];
}

double spectral_gap(const WeightMatrix& wbar) { return 1.0 - second_eigenvalue(wbar); }

double min_nonzero_mean_entry(const WeightMatrixModel& model) {
  double smallest = std::numeric_limits<double>::infinity();
  auto scan = [&](const WeightMatrix& w) {
    for (Eigen::Index e = 0; e < w.size(); ++e) {
      const double v = w.data()[e];
      if (v != 0.0) smallest = std::min(smallest, v);
    }
  };
  if (model.kind == ModelKind::switching_periodic) {
    for (const auto& w : model.support) scan(w);
  } else {
    scan(mean_matrix(model));
  }
  return smallest;
}

}  // namespace socsamp
