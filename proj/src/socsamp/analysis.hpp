#pragma once

#include <span>
#include <string>
#include <vector>

#include "socsamp/dynamics.hpp"
#include "socsamp/network.hpp"
#include "socsamp/simplex.hpp"

namespace socsamp {

Matrix kron(const Matrix& a, const Matrix& b);

/// Orthogonal T = [T1; 1^T/sqrt(N)] from the Householder reflector that maps
/// e_N to 1/sqrt(N). T1 spans the disagreement subspace.
struct ProjectionBasis {
  Matrix t;   // N x N
  Matrix t1;  // (N-1) x N

  int agents() const { return static_cast<int>(t.rows()); }
};

ProjectionBasis build_projection(int agents);

// xi = (T1 (x) I_M) Q
Vector reduce(const StackedState& state, const ProjectionBasis& basis);
// (T1^T (x) I_M) xi + 1 (x) average
StackedState reconstruct(const Vector& xi, const OpinionVector& average, const ProjectionBasis& basis);

// Consensus limit in the strongly consistent regime (B = I): avg(Q_0).
OpinionVector q_star_prediction(const StackedState& initial);

// avg(Q_0) plus the partial sum of consensus_drift_term increments.
OpinionVector q_star_running(std::span<const OpinionVector> increments, const StackedState& initial);

struct ReducedDrift {
  Matrix fbar;     // (T1 (Wbar - I) T1^T) (x) I_M
  Matrix shifted;  // fbar + (delta/2) I
  double lambda2 = 0.0;
  double delta = 0.0;
  bool stable = false;
};

// Builds Fbar and its shift without judging stability.
ReducedDrift reduced_drift_unchecked(const WeightMatrix& wbar, const ProjectionBasis& basis, int opinions,
                                     double delta);
// Same, but throws HypothesisError unless lambda2 < 1 - delta/2.
ReducedDrift reduced_drift(const WeightMatrix& wbar, const ProjectionBasis& basis, int opinions, double delta);

// E[T1 (W - I) (x) I_M] Sigma E[...]^T with the mean weight matrix.
Matrix s0_matrix(const WeightMatrixModel& model, const ProjectionBasis& basis, const Matrix& sigma, int opinions);

/// Solves A S + S A^T = -S0 by Bartels-Stewart on the complex Schur form of A.
/// Throws StabilityError naming the first eigenvalue with Re >= 0.
Matrix lyapunov_solve(const Matrix& a, const Matrix& s0);

// ||A S + S A^T + S0||_F / max(1, ||S0||_F)
double lyapunov_residual(const Matrix& a, const Matrix& s, const Matrix& s0);

// (T Gamma (x) I_M)^T blockdiag(S, 0) (T Gamma (x) I_M)
Matrix s_tilde(const Matrix& s, const ProjectionBasis& basis, int opinions);

struct ScaledSamples {
  Matrix samples;     // one row per trial: xi_K / sqrt(delta_K)
  Vector mean;
  Matrix covariance;  // unbiased sample covariance
};

ScaledSamples empirical_scaled_covariance(std::span<const StackedState> finals, const OpinionVector& q_ref,
                                          const ProjectionBasis& basis, double delta_k);

// Kolmogorov-Smirnov distance of `samples` from the standard normal CDF.
double ks_statistic(std::vector<double> samples);
// Asymptotic Kolmogorov survival function P(K > lambda).
double kolmogorov_survival(double lambda);

enum class ComponentStatus { tested, degenerate, anomaly };

struct NormalityResult {
  std::vector<double> p_values;  // NaN for untested components
  std::vector<ComponentStatus> status;
  int tested = 0;
  int passed = 0;
  int anomalies = 0;
  double pass_fraction = 0.0;
};

// Columns of `samples` are components. Each is standardized by its predicted
// standard deviation and tested against N(0, 1) at `alpha`.
NormalityResult normality_test(const Matrix& samples, const Vector& predicted_variances, double alpha = 0.01);

enum class SigmaForm { categorical, diagonal };
std::string to_string(SigmaForm form);
SigmaForm sigma_form_from_string(const std::string& text);

struct AsymptoticReport {
  OpinionVector q_star;
  double lambda2 = 0.0;
  double delta = 0.0;
  SigmaForm sigma_form = SigmaForm::categorical;
  Matrix sigma;
  Matrix fbar;
  Matrix s0;
  Matrix s;
  Matrix s_tilde;
  double lyapunov_residual = 0.0;

  // filled by compare_empirical
  bool has_empirical = false;
  int trials = 0;
  Matrix empirical_covariance;
  double cov_rel_error = 0.0;
  NormalityResult normality;
};

// Theory only. Throws HypothesisError when the stability precondition fails.
AsymptoticReport predict_asymptotics(const WeightMatrixModel& model, const StepSchedule& schedule,
                                     const OpinionVector& q_star, int agents, SigmaForm form);

void compare_empirical(AsymptoticReport& report, const ProjectionBasis& basis, std::span<const StackedState> finals,
                       double delta_k, double alpha = 0.01);

}  // namespace socsamp
