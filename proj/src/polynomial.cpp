#include "perron/polynomial.hpp"

#include <algorithm>
#include <string>

#include "perron/error.hpp"

namespace perron {

namespace {

// x^p with the convention 0^0 = 1; negative p means the monomial was differentiated away.
double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

}  // namespace

Polynomial::Polynomial(int dimension, std::vector<Monomial> terms)
    : dimension_(dimension), terms_(std::move(terms)) {
  if (dimension_ <= 0) throw Error(ErrorKind::InvalidConfig, "polynomial dimension must be positive");
  for (const auto& t : terms_) {
    if (static_cast<int>(t.powers.size()) != dimension_)
      throw Error(ErrorKind::InvalidConfig,
                  "monomial has " + std::to_string(t.powers.size()) + " exponents, expected " +
                      std::to_string(dimension_));
    if (std::any_of(t.powers.begin(), t.powers.end(), [](int p) { return p < 0; }))
      throw Error(ErrorKind::InvalidConfig, "negative exponent in monomial");
  }
}

double Polynomial::value(const Eigen::VectorXd& x) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double m = t.coefficient;
    for (int i = 0; i < dimension_; ++i) m *= ipow(x[i], t.powers[i]);
    sum += m;
  }
  return sum;
}

Eigen::VectorXd Polynomial::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dimension_);
  for (const auto& t : terms_) {
    for (int j = 0; j < dimension_; ++j) {
      if (t.powers[j] == 0) continue;
      double m = t.coefficient * t.powers[j];
      for (int i = 0; i < dimension_; ++i) m *= ipow(x[i], i == j ? t.powers[i] - 1 : t.powers[i]);
      g[j] += m;
    }
  }
  return g;
}

Eigen::MatrixXd Polynomial::hessian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dimension_, dimension_);
  for (const auto& t : terms_) {
    for (int j = 0; j < dimension_; ++j) {
      if (t.powers[j] == 0) continue;
      for (int l = j; l < dimension_; ++l) {
        std::vector<int> p = t.powers;
        double m = t.coefficient * p[j];
        --p[j];
        if (p[l] == 0) continue;
        m *= p[l];
        --p[l];
        for (int i = 0; i < dimension_; ++i) m *= ipow(x[i], p[i]);
        H(j, l) += m;
        if (l != j) H(l, j) += m;
      }
    }
  }
  return H;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int p : t.powers) s += p;
    d = std::max(d, s);
  }
  return d;
}

}  // namespace perron
