#include "socsamp/format.hpp"

#include <cstdio>

namespace socsamp {

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_row(const Eigen::VectorXd& values) {
  std::string out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_real(values[i]);
  }
  return out;
}

std::string format_matrix(const Eigen::MatrixXd& m, const std::string& row_sep) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) out += row_sep;
    out += format_row(m.row(r).transpose());
  }
  return out;
}

}  // namespace socsamp
