#pragma once

// Independent reference implementations used only by the tests.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Floyd-Warshall reachability: every node reaches every other node.
inline bool all_pairs_reachable(const std::vector<std::vector<bool>>& adj) {
  const std::size_t n = adj.size();
  auto reach = adj;
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!reach[i][j]) return false;
  return true;
}

// Matrix exponential by scaling and squaring with a 20-term Taylor series.
inline Matrix expm(const Matrix& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = a / std::ldexp(1.0, squarings);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k <= 20; ++k) {
    term = term * scaled / k;
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// int_0^inf e^{At} S0 e^{A^T t} dt by 8-point Gauss-Legendre panels, stopping
// once the integrand falls below 1e-14 (relative to max(1, ||S0||)).
inline Matrix lyapunov_quadrature(const Matrix& a, const Matrix& s0) {
  static constexpr std::array<double, 8> x = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                              -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                              0.7966664774136267,  0.9602898564975363};
  static constexpr std::array<double, 8> w = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};
  const double norm = std::max(a.norm(), 1e-3);
  const double h = 0.25 / norm;
  std::array<Matrix, 8> node_exp;
  for (int j = 0; j < 8; ++j) node_exp[j] = expm(a * (h * 0.5 * (x[j] + 1.0)));
  const Matrix panel_exp = expm(a * h);
  const double scale = std::max(1.0, s0.norm());

  Matrix total = Matrix::Zero(a.rows(), a.cols());
  Matrix phi = Matrix::Identity(a.rows(), a.cols());  // e^{A t0}
  for (long panel = 0; panel < 50'000'000; ++panel) {
    const Matrix inner = phi * s0 * phi.transpose();
    if (inner.norm() < 1e-14 * scale) break;
    for (int j = 0; j < 8; ++j) total += (0.5 * h * w[j]) * (node_exp[j] * inner * node_exp[j].transpose());
    phi = panel_exp * phi;
  }
  return total;
}

// Solves (I (x) A + A (x) I) vec(S) = -vec(S0) densely.
inline Matrix lyapunov_kron(const Matrix& a, const Matrix& s0) {
  const Eigen::Index n = a.rows();
  Matrix big = Matrix::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k) {
        big(j * n + i, j * n + k) += a(i, k);  // (I (x) A)
        big(j * n + i, k * n + i) += a(j, k);  // (A (x) I)
      }
  const Vector rhs = -Eigen::Map<const Vector>(s0.data(), n * n);
  const Vector v = big.fullPivLu().solve(rhs);
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

// Standard normal CDF.
inline double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace oracle
