#pragma once

#include <Eigen/Dense>
#include <vector>

namespace perron {

/// A monomial c * x_1^{a_1} ... x_n^{a_n}.
struct Monomial {
  std::vector<int> powers;
  double coefficient = 0.0;
};

/// Multivariate polynomial with exact (symbolic) first and second derivatives.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(int dimension, std::vector<Monomial> terms);

  int dimension() const { return dimension_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

  int degree() const;

 private:
  int dimension_ = 0;
  std::vector<Monomial> terms_;
};

}  // namespace perron
