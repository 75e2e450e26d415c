#pragma once

#include <span>
#include <string>
#include <vector>

#include "socsamp/random_stream.hpp"
#include "socsamp/simplex.hpp"

namespace socsamp {

enum class PolicyKind { direct, censored };

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& text);

/// Map from an agent's estimate Q_i to the law P_i of its message.
/// Censoring zeroes components below alpha_k = scale * delta_k^exponent.
struct SamplingPolicy {
  PolicyKind kind = PolicyKind::direct;
  double censor_scale = 0.0;
  double censor_exponent = 2.0;
  // false keeps censored mass missing, so silent (zero) messages can occur
  bool renormalize = true;

  double threshold(double delta_k) const;
  bool operator==(const SamplingPolicy&) const = default;
};

struct SamplingDiagnostics {
  long negative_components = 0;  // in-flight components < 0 treated as zero mass
  long uniform_fallbacks = 0;    // degenerate q replaced by the uniform law
  long silent_messages = 0;
};

// One-hot message e_index, or the silent zero message when index < 0.
struct Message {
  int index = -1;

  bool silent() const { return index < 0; }
  Vector one_hot(int opinions) const;
  bool operator==(const Message&) const = default;
};

Vector stack_messages(std::span<const Message> messages, int opinions);

Vector sampling_distribution(const SamplingPolicy& policy, const OpinionVector& q, double delta_k,
                             SamplingDiagnostics* diagnostics = nullptr);

// The law actually drawn from: negative components become zero mass and a
// total above one is renormalized. Leaves valid (sub-)distributions untouched.
Vector drawable_distribution(const Vector& p, SamplingDiagnostics* diagnostics = nullptr);

// Inverse-CDF draw from one uniform variate. Throws DomainError on negative
// components or a total above 1 + 1e-12.
Message draw_message(const Vector& p, RandomStream& rng);

// I_N (x) diag(q_m (1 - q_m)): the block-diagonal limit with the closed form
// quoted for categorical sampling (per-coordinate variances only).
Matrix message_covariance_limit(const OpinionVector& q_star, int agents);

// I_N (x) (diag(q) - q q^T): exact conditional covariance of a one-hot draw.
Matrix message_covariance_categorical(const OpinionVector& q_star, int agents);

}  // namespace socsamp
