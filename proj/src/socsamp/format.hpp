#pragma once

#include <Eigen/Dense>
#include <string>

namespace socsamp {

// Shortest text that still round-trips: 17 significant digits, "%.17g".
std::string format_real(double value);

// Row-major comma-separated values; rows separated by `row_sep`.
std::string format_row(const Eigen::VectorXd& values);
std::string format_matrix(const Eigen::MatrixXd& m, const std::string& row_sep);

}  // namespace socsamp
