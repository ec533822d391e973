#pragma once

#include <Eigen/Dense>
#include <string_view>
#include <vector>

#include "perron/spectral.hpp"

namespace perron {

enum class GraphKind { FInf, GInf, GT };

std::string_view to_string(GraphKind kind);

/// Tensor grid over the cube [-half_width, half_width]^m in the eigen-coordinates
/// of a subspace (m = its dimension). Index order is lexicographic, axis 0 slowest.
struct SubspaceGrid {
  Eigen::MatrixXd basis;  // n x m, orthonormal columns
  double half_width = 0.0;
  int points_per_axis = 1;

  int dimension() const { return static_cast<int>(basis.cols()); }
  int size() const;
  Eigen::VectorXd coordinates(int index) const;
  Eigen::VectorXd point(int index) const { return basis * coordinates(index); }
  double spacing() const { return points_per_axis > 1 ? 2.0 * half_width / (points_per_axis - 1) : 0.0; }
};

/// A graph map tabulated over a grid in its domain subspace.
struct GraphSample {
  GraphKind kind = GraphKind::FInf;
  double T = 0.0;                 // horizon, G_T only
  Eigen::VectorXd z_minus;        // fiber base point, G_T only
  SubspaceGrid grid;
  std::vector<Eigen::VectorXd> values;  // graph values in the complementary subspace
  std::vector<double> residuals;
  std::vector<int> iterations;

  /// Multilinear interpolation; throws OutsideSampledDomain off the cube.
  Eigen::VectorXd evaluate(const Eigen::VectorXd& domain_point) const;

  /// Interpolation error scale: largest second difference over the grid.
  double interpolation_error() const;
  double max_residual() const;
};

}  // namespace perron
