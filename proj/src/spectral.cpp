#include "perron/spectral.hpp"

#include <cmath>
#include <sstream>

#include "perron/error.hpp"

namespace perron {

Eigen::MatrixXd SpectralSplit::basis(Subspace s) const {
  if (s == Subspace::Minus) return eigenvectors.leftCols(morse_index);
  return eigenvectors.rightCols(dimension - morse_index);
}

SpectralSplit split(const Eigen::MatrixXd& hessian, double tol) {
  const auto n = hessian.rows();
  if (n == 0 || hessian.cols() != n) throw Error(ErrorKind::NotSymmetric, "Hessian must be square and non-empty");

  const double scale = std::max(1.0, hessian.cwiseAbs().maxCoeff());
  const double asym = (hessian - hessian.transpose()).cwiseAbs().maxCoeff();
  const double sym_tol = tol > 0 ? tol : 1e-9 * scale;
  if (asym > sym_tol) {
    std::ostringstream os;
    os << "asymmetry " << asym << " exceeds " << sym_tol;
    throw Error(ErrorKind::NotSymmetric, os.str());
  }

  const Eigen::MatrixXd sym = 0.5 * (hessian + hessian.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);

  SpectralSplit s;
  s.dimension = static_cast<int>(n);
  s.hessian = sym;
  s.eigenvalues = es.eigenvalues();
  s.eigenvectors = es.eigenvectors();

  const double lam_scale = s.eigenvalues.cwiseAbs().maxCoeff();
  const double degeneracy_tol = tol > 0 ? tol : 1e-9 * lam_scale;
  s.gap = s.eigenvalues.cwiseAbs().minCoeff();
  if (lam_scale == 0.0 || s.gap < degeneracy_tol) {
    std::ostringstream os;
    os << "eigenvalue of magnitude " << s.gap << " below tolerance " << degeneracy_tol;
    throw Error(ErrorKind::DegenerateCriticalPoint, os.str());
  }

  s.morse_index = 0;
  while (s.morse_index < s.dimension && s.eigenvalues[s.morse_index] < 0) ++s.morse_index;

  const Eigen::MatrixXd Vm = s.basis(Subspace::Minus);
  const Eigen::MatrixXd Vp = s.basis(Subspace::Plus);
  s.proj_minus = Vm * Vm.transpose();
  s.proj_plus = Vp * Vp.transpose();
  return s;
}

Eigen::MatrixXd flow_exponential(const SpectralSplit& s, double t) {
  const Eigen::VectorXd d = (-t * s.eigenvalues).array().exp();
  return s.eigenvectors * d.asDiagonal() * s.eigenvectors.transpose();
}

Eigen::MatrixXd restricted_exponential(const SpectralSplit& s, Subspace sign, double t) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(s.dimension);
  for (int i = 0; i < s.dimension; ++i) {
    const bool minus = i < s.morse_index;
    if (minus == (sign == Subspace::Minus)) d[i] = std::exp(-t * s.eigenvalues[i]);
  }
  return s.eigenvectors * d.asDiagonal() * s.eigenvectors.transpose();
}

}  // namespace perron
