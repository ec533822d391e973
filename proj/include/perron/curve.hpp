#pragma once

#include <Eigen/Dense>
#include <vector>

namespace perron {

/// Composite Chebyshev-Lobatto panels on [t0, t1]. Neighbouring panels share
/// their endpoint node, so the grid has panels * degree + 1 nodes.
class PanelGrid {
 public:
  PanelGrid() = default;
  PanelGrid(double t0, double t1, int panels, int degree);

  /// Panel count chosen so that no panel is wider than `max_width`, with at
  /// least `min_nodes` nodes overall.
  static PanelGrid covering(double t0, double t1, double max_width, int degree, int min_nodes = 33);

  double start() const { return t0_; }
  double end() const { return t1_; }
  int panels() const { return panels_; }
  int degree() const { return degree_; }
  double panel_width() const { return (t1_ - t0_) / panels_; }
  int size() const { return panels_ * degree_ + 1; }
  double node(int i) const { return nodes_[i]; }
  const std::vector<double>& nodes() const { return nodes_; }

  /// Reference nodes on [-1, 1] (ascending) and their barycentric weights.
  const std::vector<double>& reference_nodes() const { return ref_; }
  const std::vector<double>& barycentric_weights() const { return bary_; }

  /// Lagrange basis values at t for the panel containing t.
  /// Returns the index of the panel's first node.
  int basis_at(double t, std::vector<double>& ell) const;

  bool same_layout(const PanelGrid& o) const {
    return t0_ == o.t0_ && t1_ == o.t1_ && panels_ == o.panels_ && degree_ == o.degree_;
  }

 private:
  double t0_ = 0.0, t1_ = 1.0;
  int panels_ = 1, degree_ = 8;
  std::vector<double> nodes_, ref_, bary_;
};

/// A curve sampled on a panel grid together with the decay rate of its
/// weighted norm: ||xi||_exp = max_t e^{rate * t} ||xi(t)||. Forward curves use
/// rate = +lambda, backward curves on (-inf, 0] use rate = -lambda.
struct Curve {
  PanelGrid grid;
  Eigen::MatrixXd values;  // dimension x grid.size()
  double rate = 0.0;

  Curve() = default;
  Curve(PanelGrid g, int dimension, double rate_)
      : grid(std::move(g)), values(Eigen::MatrixXd::Zero(dimension, grid.size())), rate(rate_) {}

  int dimension() const { return static_cast<int>(values.rows()); }
  Eigen::VectorXd at_node(int i) const { return values.col(i); }
  Eigen::VectorXd front() const { return values.col(0); }
  Eigen::VectorXd back() const { return values.col(values.cols() - 1); }

  /// Spectral (barycentric) interpolation inside the containing panel.
  Eigen::VectorXd evaluate(double t) const;

  double exp_norm() const;
  double sup_norm() const;
};

/// Weighted distance ||a - b||_exp; both curves must share the grid layout.
double exp_distance(const Curve& a, const Curve& b);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace perron
