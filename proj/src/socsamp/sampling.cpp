#include "socsamp/sampling.hpp"

#include <cmath>

#include "socsamp/errors.hpp"
#include "socsamp/format.hpp"

namespace socsamp {

std::string to_string(PolicyKind kind) { return kind == PolicyKind::direct ? "direct" : "censored"; }

PolicyKind policy_kind_from_string(const std::string& text) {
  if (text == "direct") return PolicyKind::direct;
  if (text == "censored") return PolicyKind::censored;
  throw ConfigError("sampling.kind: expected direct|censored, got '" + text + "'");
}

double SamplingPolicy::threshold(double delta_k) const { return censor_scale * std::pow(delta_k, censor_exponent); }

Vector Message::one_hot(int opinions) const {
  Vector v = Vector::Zero(opinions);
  if (!silent()) v[index] = 1.0;
  return v;
}

Vector stack_messages(std::span<const Message> messages, int opinions) {
  Vector y = Vector::Zero(static_cast<Eigen::Index>(messages.size()) * opinions);
  for (std::size_t i = 0; i < messages.size(); ++i)
    if (!messages[i].silent()) y[static_cast<Eigen::Index>(i) * opinions + messages[i].index] = 1.0;
  return y;
}

Vector sampling_distribution(const SamplingPolicy& policy, const OpinionVector& q, double delta_k,
                             SamplingDiagnostics* diagnostics) {
  if (!(delta_k > 0.0)) throw DomainError("sampling_distribution needs delta_k > 0, got " + format_real(delta_k));
  if (policy.kind == PolicyKind::direct) return q;

  const double alpha = policy.threshold(delta_k);
  Vector p = q;
  for (Eigen::Index m = 0; m < p.size(); ++m) {
    if (p[m] < 0.0 && diagnostics) ++diagnostics->negative_components;
    if (p[m] < alpha || p[m] < 0.0) p[m] = 0.0;
  }
  const double survivors = p.sum();
  if (survivors > 0.0) return policy.renormalize ? Vector(p / survivors) : p;

  if (q.sum() > 0.0) return q;
  if (diagnostics) ++diagnostics->uniform_fallbacks;
  return Vector::Constant(q.size(), 1.0 / static_cast<double>(q.size()));
}

Vector drawable_distribution(const Vector& p, SamplingDiagnostics* diagnostics) {
  if ((p.array() >= 0.0).all() && p.sum() <= 1.0 + 1e-12) return p;
  Vector clipped = p.cwiseMax(0.0);
  if (diagnostics) diagnostics->negative_components += (p.array() < 0.0).count();
  const double total = clipped.sum();
  if (total > 1.0) clipped /= total;
  if (total <= 0.0) {
    if (diagnostics) ++diagnostics->uniform_fallbacks;
    return Vector::Constant(p.size(), 1.0 / static_cast<double>(p.size()));
  }
  return clipped;
}

Message draw_message(const Vector& p, RandomStream& rng) {
  double total = 0.0;
  for (Eigen::Index m = 0; m < p.size(); ++m) {
    if (p[m] < 0.0) {
      throw DomainError("draw_message: component " + std::to_string(m + 1) + " is negative (" + format_real(p[m]) +
                        ")");
    }
    total += p[m];
  }
  if (total > 1.0 + 1e-12) throw DomainError("draw_message: components sum to " + format_real(total));

  const double u = rng.uniform();
  double acc = 0.0;
  int last_positive = -1;
  for (Eigen::Index m = 0; m < p.size(); ++m) {
    if (p[m] > 0.0) last_positive = static_cast<int>(m);
    acc += p[m];
    if (u < acc) return {static_cast<int>(m)};
  }
  // a stochastic p whose partial sums round just below one
  if (total >= 1.0 - 1e-12) return {last_positive};
  return {};
}

Matrix message_covariance_limit(const OpinionVector& q_star, int agents) {
  const auto m = q_star.size();
  Matrix sigma = Matrix::Zero(agents * m, agents * m);
  const Vector d = q_star.array() * (1.0 - q_star.array());
  for (int i = 0; i < agents; ++i) sigma.diagonal().segment(i * m, m) = d;
  return sigma;
}

Matrix message_covariance_categorical(const OpinionVector& q_star, int agents) {
  const auto m = q_star.size();
  const Matrix block = Matrix(q_star.asDiagonal()) - q_star * q_star.transpose();
  Matrix sigma = Matrix::Zero(agents * m, agents * m);
  for (int i = 0; i < agents; ++i) sigma.block(i * m, i * m, m, m) = block;
  return sigma;
}

}  // namespace socsamp
