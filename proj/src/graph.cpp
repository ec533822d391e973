#include "perron/graph.hpp"

#include <algorithm>
#include <cmath>

#include "perron/error.hpp"

namespace perron {

std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::FInf: return "F_inf";
    case GraphKind::GInf: return "G_inf";
    case GraphKind::GT: return "G_T";
  }
  return "?";
}

int SubspaceGrid::size() const {
  int s = 1;
  for (int i = 0; i < dimension(); ++i) s *= points_per_axis;
  return s;
}

Eigen::VectorXd SubspaceGrid::coordinates(int index) const {
  const int m = dimension();
  Eigen::VectorXd c(m);
  for (int a = m - 1; a >= 0; --a) {
    const int i = index % points_per_axis;
    index /= points_per_axis;
    c[a] = points_per_axis > 1 ? -half_width + i * spacing() : 0.0;
  }
  return c;
}

Eigen::VectorXd GraphSample::evaluate(const Eigen::VectorXd& domain_point) const {
  const int m = grid.dimension();
  const Eigen::VectorXd c = grid.basis.transpose() * domain_point;
  const double slack = 1e-12 * std::max(1.0, grid.half_width);
  if (grid.points_per_axis < 2) {
    if (c.norm() > slack) throw Error(ErrorKind::OutsideSampledDomain, "single-point graph sample");
    return values.front();
  }
  std::vector<int> lo(m);
  std::vector<double> frac(m);
  const double h = grid.spacing();
  for (int a = 0; a < m; ++a) {
    if (std::abs(c[a]) > grid.half_width + slack)
      throw Error(ErrorKind::OutsideSampledDomain, "point outside the sampled graph domain");
    const double s = std::clamp((c[a] + grid.half_width) / h, 0.0, double(grid.points_per_axis - 1));
    lo[a] = std::min(static_cast<int>(std::floor(s)), grid.points_per_axis - 2);
    frac[a] = s - lo[a];
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(values.front().size());
  for (int corner = 0; corner < (1 << m); ++corner) {
    double w = 1.0;
    int index = 0;
    for (int a = 0; a < m; ++a) {
      const int bit = (corner >> (m - 1 - a)) & 1;
      w *= bit ? frac[a] : 1.0 - frac[a];
      index = index * grid.points_per_axis + lo[a] + bit;
    }
    if (w != 0.0) out += w * values[index];
  }
  return out;
}

double GraphSample::interpolation_error() const {
  const int m = grid.dimension();
  const int p = grid.points_per_axis;
  if (p < 3) return 0.0;
  double worst = 0.0;
  for (int idx = 0; idx < grid.size(); ++idx) {
    int rest = idx;
    std::vector<int> ii(m);
    for (int a = m - 1; a >= 0; --a) {
      ii[a] = rest % p;
      rest /= p;
    }
    for (int a = 0; a < m; ++a) {
      if (ii[a] == 0 || ii[a] == p - 1) continue;
      int stride = 1;
      for (int b = a + 1; b < m; ++b) stride *= p;
      const double d2 = (values[idx + stride] - 2.0 * values[idx] + values[idx - stride]).norm();
      worst = std::max(worst, d2);
    }
  }
  // Linear interpolation error is bounded by h^2/8 |f''| = (second difference)/8.
  return worst / 8.0;
}

double GraphSample::max_residual() const {
  double r = 0.0;
  for (double x : residuals) r = std::max(r, x);
  return r;
}

}  // namespace perron
