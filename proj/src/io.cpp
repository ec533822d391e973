#include "perron/io.hpp"

#include <cstdio>

namespace perron {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string coordinate_header(const std::string& prefix, int n) {
  std::string s;
  for (int i = 1; i <= n; ++i) {
    if (i > 1) s += ',';
    s += prefix + std::to_string(i);
  }
  return s;
}

std::string format_vector(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

void write_graph_csv(std::ostream& os, const GraphSample& g) {
  const int n = static_cast<int>(g.grid.basis.rows());
  os << "kind,T," << coordinate_header("zm", n) << ',' << coordinate_header("zp", n) << ','
     << coordinate_header("g", n) << ",residual,iterations\n";
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < g.grid.size(); ++i) {
    const Eigen::VectorXd p = g.grid.point(i);
    const bool on_minus = g.kind == GraphKind::FInf;
    const Eigen::VectorXd zm = on_minus ? p : (g.kind == GraphKind::GT ? g.z_minus : zero);
    const Eigen::VectorXd zp = on_minus ? zero : p;
    os << to_string(g.kind) << ',' << format_double(g.T) << ',' << format_vector(zm) << ',' << format_vector(zp) << ','
       << format_vector(g.values[i]) << ',' << format_double(g.residuals[i]) << ',' << g.iterations[i] << '\n';
  }
}

}  // namespace perron
