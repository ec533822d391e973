#pragma once

#include <Eigen/Dense>

namespace perron {

enum class Subspace { Minus, Plus };

/// Spectral splitting of the Hessian at a non-degenerate critical point.
///
/// Eigenvalues are sorted ascending; the first `morse_index` eigenvectors span
/// the unstable space E^-, the remaining ones span the stable space E^+.
/// Immutable after construction.
struct SpectralSplit {
  int dimension = 0;
  Eigen::MatrixXd hessian;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // columns, orthonormal
  int morse_index = 0;
  double gap = 0.0;
  Eigen::MatrixXd proj_minus;
  Eigen::MatrixXd proj_plus;

  double lambda_min() const { return eigenvalues[0]; }
  double lambda_max() const { return eigenvalues[dimension - 1]; }
  int stable_dimension() const { return dimension - morse_index; }

  /// Orthonormal basis of E^- (n x k) or E^+ (n x (n-k)).
  Eigen::MatrixXd basis(Subspace s) const;
  const Eigen::MatrixXd& projection(Subspace s) const {
    return s == Subspace::Minus ? proj_minus : proj_plus;
  }
};

/// Default non-degeneracy tolerance is relative: 1e-9 * max|lambda_i|.
SpectralSplit split(const Eigen::MatrixXd& hessian, double tol = -1.0);

/// e^{-tA}, assembled from the eigen-decomposition.
Eigen::MatrixXd flow_exponential(const SpectralSplit& s, double t);

/// e^{-tA^\pm} on E^\pm, extended by zero on the complementary subspace.
Eigen::MatrixXd restricted_exponential(const SpectralSplit& s, Subspace sign, double t);

}  // namespace perron
