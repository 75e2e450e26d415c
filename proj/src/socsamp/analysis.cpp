#include "socsamp/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "socsamp/errors.hpp"
#include "socsamp/sampling.hpp"

namespace socsamp {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ProjectionBasis build_projection(int agents) {
  if (agents < 2) throw DomainError("build_projection needs N >= 2 (no disagreement subspace for N = 1)");
  const double n = agents;
  Vector u = Vector::Constant(agents, -1.0 / std::sqrt(n));
  u[agents - 1] += 1.0;
  ProjectionBasis basis;
  basis.t = Matrix::Identity(agents, agents) - (2.0 / u.squaredNorm()) * u * u.transpose();
  // the reflector's last row is exactly 1^T / sqrt(N) up to rounding; pin it
  basis.t.row(agents - 1).setConstant(1.0 / std::sqrt(n));
  basis.t1 = basis.t.topRows(agents - 1);
  return basis;
}

Vector reduce(const StackedState& state, const ProjectionBasis& basis) {
  if (basis.agents() != state.agents()) throw DomainError("projection basis does not match N");
  const Matrix xi = state.columns() * basis.t1.transpose();  // M x (N-1)
  return Eigen::Map<const Vector>(xi.data(), xi.size());
}

StackedState reconstruct(const Vector& xi, const OpinionVector& average, const ProjectionBasis& basis) {
  const int n = basis.agents();
  const auto m = average.size();
  if (xi.size() != (n - 1) * m) throw DomainError("reduced coordinate has the wrong length");
  const Eigen::Map<const Matrix> xi_cols(xi.data(), m, n - 1);
  Matrix q = xi_cols * basis.t1;
  q.colwise() += average;
  return {n, static_cast<int>(m), Eigen::Map<const Vector>(q.data(), q.size())};
}

OpinionVector q_star_prediction(const StackedState& initial) { return network_average(initial); }

OpinionVector q_star_running(std::span<const OpinionVector> increments, const StackedState& initial) {
  OpinionVector q = network_average(initial);
  for (const auto& term : increments) {
    if (term.size() != q.size()) throw DomainError("q_star_running: increment has the wrong length");
    q += term;
  }
  return q;
}

ReducedDrift reduced_drift_unchecked(const WeightMatrix& wbar, const ProjectionBasis& basis, int opinions,
                                     double delta) {
  const int n = basis.agents();
  if (wbar.rows() != n || wbar.cols() != n) throw DomainError("mean matrix does not match the projection basis");
  ReducedDrift out;
  const Matrix core = basis.t1 * (wbar - Matrix::Identity(n, n)) * basis.t1.transpose();
  out.fbar = kron(core, Matrix::Identity(opinions, opinions));
  out.shifted = out.fbar + (delta / 2.0) * Matrix::Identity(out.fbar.rows(), out.fbar.cols());
  out.lambda2 = second_eigenvalue(wbar);
  out.delta = delta;
  out.stable = out.lambda2 < 1.0 - delta / 2.0;
  return out;
}

ReducedDrift reduced_drift(const WeightMatrix& wbar, const ProjectionBasis& basis, int opinions, double delta) {
  ReducedDrift out = reduced_drift_unchecked(wbar, basis, opinions, delta);
  if (!out.stable) throw HypothesisError(out.lambda2, delta);
  return out;
}

Matrix s0_matrix(const WeightMatrixModel& model, const ProjectionBasis& basis, const Matrix& sigma, int opinions) {
  const int n = basis.agents();
  const WeightMatrix wbar = mean_matrix(model);
  if (sigma.rows() != n * opinions || sigma.cols() != n * opinions) throw DomainError("Sigma must be NM x NM");
  const Matrix g = kron(basis.t1 * (wbar - Matrix::Identity(n, n)), Matrix::Identity(opinions, opinions));
  Matrix s0 = g * sigma * g.transpose();
  return 0.5 * (s0 + s0.transpose());
}

Matrix lyapunov_solve(const Matrix& a, const Matrix& s0) {
  using Complex = std::complex<double>;
  using CMatrix = Eigen::MatrixXcd;
  const auto n = a.rows();
  if (a.cols() != n || s0.rows() != n || s0.cols() != n) throw DomainError("lyapunov_solve: dimension mismatch");
  if (n == 0) return Matrix(0, 0);

  Eigen::ComplexSchur<Matrix> schur(a);
  const CMatrix& t = schur.matrixT();
  const CMatrix& u = schur.matrixU();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(t(i, i).real() < 0.0)) throw StabilityError(t(i, i));

  // T X + X T^H = -C with C = U^H S0 U; column j couples only to k > j.
  const CMatrix c = u.adjoint() * s0.cast<Complex>() * u;
  CMatrix x = CMatrix::Zero(n, n);
  for (Eigen::Index j = n; j-- > 0;) {
    Eigen::VectorXcd rhs = -c.col(j);
    for (Eigen::Index k = j + 1; k < n; ++k) rhs -= std::conj(t(j, k)) * x.col(k);
    CMatrix shifted = t;
    shifted.diagonal().array() += std::conj(t(j, j));
    x.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  const Matrix s = (u * x * u.adjoint()).real();
  return 0.5 * (s + s.transpose());
}

double lyapunov_residual(const Matrix& a, const Matrix& s, const Matrix& s0) {
  return (a * s + s * a.transpose() + s0).norm() / std::max(1.0, s0.norm());
}

Matrix s_tilde(const Matrix& s, const ProjectionBasis& basis, int opinions) {
  const int n = basis.agents();
  if (s.rows() != (n - 1) * opinions || s.cols() != s.rows()) throw DomainError("s_tilde: S must be (N-1)M square");
  const Matrix gamma = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
  const Matrix embed = kron(basis.t * gamma, Matrix::Identity(opinions, opinions));
  Matrix padded = Matrix::Zero(n * opinions, n * opinions);
  padded.topLeftCorner(s.rows(), s.cols()) = s;
  Matrix out = embed.transpose() * padded * embed;
  return 0.5 * (out + out.transpose());
}

ScaledSamples empirical_scaled_covariance(std::span<const StackedState> finals, const OpinionVector& q_ref,
                                          const ProjectionBasis& basis, double delta_k) {
  if (finals.size() < 2) throw DomainError("empirical_scaled_covariance needs at least 2 trials");
  if (!(delta_k > 0.0)) throw DomainError("empirical_scaled_covariance needs delta_K > 0");
  const int n = basis.agents();
  const auto m = q_ref.size();
  const auto dim = (n - 1) * m;
  const auto r = static_cast<Eigen::Index>(finals.size());

  ScaledSamples out;
  out.samples.resize(r, dim);
  const double scale = 1.0 / std::sqrt(delta_k);
  for (Eigen::Index t = 0; t < r; ++t) {
    const auto& state = finals[static_cast<std::size_t>(t)];
    if (state.agents() != n || state.opinions() != m) throw DomainError("trial states disagree on N or M");
    StackedState centred = state;
    centred.columns().colwise() -= q_ref;
    out.samples.row(t) = scale * reduce(centred, basis).transpose();
  }
  out.mean = out.samples.colwise().mean().transpose();
  const Matrix centred = out.samples.rowwise() - out.mean.transpose();
  out.covariance = (centred.transpose() * centred) / static_cast<double>(r - 1);
  return out;
}

double ks_statistic(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = 0.5 * std::erfc(-samples[i] / std::numbers::sqrt2);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // small-lambda form of the CDF converges fast here
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int j = 1; j <= 8; ++j) {
      const double odd = 2.0 * j - 1.0;
      cdf += std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

NormalityResult normality_test(const Matrix& samples, const Vector& predicted_variances, double alpha) {
  if (samples.cols() != predicted_variances.size()) throw DomainError("normality_test: one variance per component");
  if (samples.rows() < 100) throw DomainError("normality_test needs at least 100 samples per component");
  const auto count = samples.cols();
  const double n = static_cast<double>(samples.rows());

  NormalityResult out;
  out.p_values.assign(static_cast<std::size_t>(count), std::numeric_limits<double>::quiet_NaN());
  out.status.assign(static_cast<std::size_t>(count), ComponentStatus::tested);
  for (Eigen::Index c = 0; c < count; ++c) {
    const auto col = samples.col(c);
    const double var = predicted_variances[c];
    if (var < 1e-12) {
      const double sample_var = (col.array() - col.mean()).square().sum() / (n - 1.0);
      const bool flat = sample_var <= 1e-12;
      out.status[static_cast<std::size_t>(c)] = flat ? ComponentStatus::degenerate : ComponentStatus::anomaly;
      if (!flat) ++out.anomalies;
      continue;
    }
    std::vector<double> z(static_cast<std::size_t>(col.size()));
    const double sd = std::sqrt(var);
    for (Eigen::Index i = 0; i < col.size(); ++i) z[static_cast<std::size_t>(i)] = col[i] / sd;
    const double p = kolmogorov_survival(std::sqrt(n) * ks_statistic(std::move(z)));
    out.p_values[static_cast<std::size_t>(c)] = p;
    ++out.tested;
    if (p >= alpha) ++out.passed;
  }
  out.pass_fraction = out.tested ? static_cast<double>(out.passed) / out.tested : 0.0;
  return out;
}

std::string to_string(SigmaForm form) { return form == SigmaForm::categorical ? "categorical" : "diagonal"; }

SigmaForm sigma_form_from_string(const std::string& text) {
  if (text == "categorical") return SigmaForm::categorical;
  if (text == "diagonal") return SigmaForm::diagonal;
  throw ConfigError("analysis.sigma: expected categorical|diagonal, got '" + text + "'");
}

AsymptoticReport predict_asymptotics(const WeightMatrixModel& model, const StepSchedule& schedule,
                                     const OpinionVector& q_star, int agents, SigmaForm form) {
  const ProjectionBasis basis = build_projection(agents);
  const auto m = static_cast<int>(q_star.size());
  AsymptoticReport report;
  report.q_star = q_star;
  report.delta = schedule.limit_constant();
  report.sigma_form = form;

  const ReducedDrift drift = reduced_drift(mean_matrix(model), basis, m, report.delta);
  report.lambda2 = drift.lambda2;
  report.fbar = drift.fbar;
  report.sigma = form == SigmaForm::categorical ? message_covariance_categorical(q_star, agents)
                                                : message_covariance_limit(q_star, agents);
  report.s0 = s0_matrix(model, basis, report.sigma, m);
  report.s = lyapunov_solve(drift.shifted, report.s0);
  report.lyapunov_residual = lyapunov_residual(drift.shifted, report.s, report.s0);
  report.s_tilde = s_tilde(report.s, basis, m);
  return report;
}

void compare_empirical(AsymptoticReport& report, const ProjectionBasis& basis, std::span<const StackedState> finals,
                       double delta_k, double alpha) {
  const ScaledSamples scaled = empirical_scaled_covariance(finals, report.q_star, basis, delta_k);
  report.has_empirical = true;
  report.trials = static_cast<int>(finals.size());
  report.empirical_covariance = scaled.covariance;
  const double denom = report.s.norm();
  report.cov_rel_error = denom > 0.0 ? (scaled.covariance - report.s).norm() / denom
                                     : (scaled.covariance.norm() > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  if (finals.size() >= 100) report.normality = normality_test(scaled.samples, report.s.diagonal(), alpha);
}

}  // namespace socsamp
