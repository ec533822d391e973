#include "perron/curve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "perron/error.hpp"

namespace perron {

PanelGrid::PanelGrid(double t0, double t1, int panels, int degree)
    : t0_(t0), t1_(t1), panels_(panels), degree_(degree) {
  if (!(t1 > t0) || panels < 1 || degree < 1)
    throw Error(ErrorKind::HorizonMismatch, "invalid panel grid");
  ref_.resize(degree + 1);
  bary_.resize(degree + 1);
  for (int j = 0; j <= degree; ++j) {
    ref_[j] = -std::cos(std::numbers::pi * j / degree);
    bary_[j] = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == degree) ? 0.5 : 1.0);
  }
  ref_[0] = -1.0;
  ref_[degree] = 1.0;
  const double h = (t1 - t0) / panels;
  nodes_.resize(size());
  for (int p = 0; p < panels; ++p) {
    const double a = t0 + p * h;
    for (int j = 0; j < degree; ++j) nodes_[p * degree + j] = a + 0.5 * h * (ref_[j] + 1.0);
  }
  nodes_.back() = t1;
}

PanelGrid PanelGrid::covering(double t0, double t1, double max_width, int degree, int min_nodes) {
  int panels = static_cast<int>(std::ceil((t1 - t0) / max_width - 1e-12));
  panels = std::max(panels, 1);
  while (panels * degree + 1 < min_nodes) ++panels;
  return PanelGrid(t0, t1, panels, degree);
}

int PanelGrid::basis_at(double t, std::vector<double>& ell) const {
  const double h = panel_width();
  int p = static_cast<int>(std::floor((t - t0_) / h));
  p = std::clamp(p, 0, panels_ - 1);
  const double a = t0_ + p * h;
  const double s = 2.0 * (t - a) / h - 1.0;
  ell.assign(degree_ + 1, 0.0);
  for (int j = 0; j <= degree_; ++j) {
    if (std::abs(s - ref_[j]) < 1e-15) {
      ell[j] = 1.0;
      return p * degree_;
    }
  }
  double denom = 0.0;
  for (int j = 0; j <= degree_; ++j) {
    ell[j] = bary_[j] / (s - ref_[j]);
    denom += ell[j];
  }
  for (auto& e : ell) e /= denom;
  return p * degree_;
}

Eigen::VectorXd Curve::evaluate(double t) const {
  if (t < grid.start() - 1e-12 * std::max(1.0, std::abs(grid.start())) ||
      t > grid.end() + 1e-12 * std::max(1.0, std::abs(grid.end())))
    throw Error(ErrorKind::HorizonMismatch, "evaluation time outside curve horizon");
  std::vector<double> ell;
  const int first = grid.basis_at(t, ell);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dimension());
  for (int j = 0; j <= grid.degree(); ++j) out += ell[j] * values.col(first + j);
  return out;
}

double Curve::exp_norm() const {
  double m = 0.0;
  for (int i = 0; i < grid.size(); ++i) m = std::max(m, std::exp(rate * grid.node(i)) * values.col(i).norm());
  return m;
}

double Curve::sup_norm() const {
  double m = 0.0;
  for (int i = 0; i < grid.size(); ++i) m = std::max(m, values.col(i).norm());
  return m;
}

double exp_distance(const Curve& a, const Curve& b) {
  if (!a.grid.same_layout(b.grid)) throw Error(ErrorKind::HorizonMismatch, "curves live on different grids");
  double m = 0.0;
  for (int i = 0; i < a.grid.size(); ++i)
    m = std::max(m, std::exp(a.rate * a.grid.node(i)) * (a.values.col(i) - b.values.col(i)).norm());
  return m;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[n - 1 - i] = z;
    w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace perron
