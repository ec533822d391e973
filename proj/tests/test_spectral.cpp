#include <doctest.h>

#include <cmath>
#include <random>

#include "perron/error.hpp"
#include "perron/spectral.hpp"

using namespace perron;

namespace {

Eigen::Matrix2d rotation(double deg) {
  const double a = deg * M_PI / 180.0;
  Eigen::Matrix2d R;
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return R;
}

}  // namespace

TEST_CASE("diagonal saddle in the plane") {
  const SpectralSplit s = split(Eigen::Vector2d(-1, 2).asDiagonal().toDenseMatrix());
  CHECK(s.morse_index == 1);
  CHECK(s.gap == doctest::Approx(1.0));
  CHECK((s.proj_minus - Eigen::Matrix2d(Eigen::Vector2d(1, 0).asDiagonal())).norm() < 1e-15);
  CHECK((s.proj_plus - Eigen::Matrix2d(Eigen::Vector2d(0, 1).asDiagonal())).norm() < 1e-15);
}

TEST_CASE("index two in four dimensions") {
  Eigen::Vector4d d(-3, -1, 2, 5);
  const SpectralSplit s = split(d.asDiagonal().toDenseMatrix());
  CHECK(s.morse_index == 2);
  CHECK(s.gap == doctest::Approx(1.0));
  CHECK(s.lambda_min() == doctest::Approx(-3.0));
  CHECK(s.lambda_max() == doctest::Approx(5.0));
  CHECK(s.basis(Subspace::Minus).cols() == 2);
  CHECK(s.basis(Subspace::Plus).cols() == 2);
}

TEST_CASE("rotated saddle conjugates the projections") {
  const Eigen::Matrix2d R = rotation(30.0);
  const Eigen::Matrix2d D = Eigen::Vector2d(-1, 2).asDiagonal();
  const SpectralSplit s = split(R.transpose() * D * R);
  CHECK(s.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(s.eigenvalues[1] == doctest::Approx(2.0));
  const Eigen::Matrix2d Pm = R.transpose() * Eigen::Vector2d(1, 0).asDiagonal() * R;
  CHECK((s.proj_minus - Pm).norm() < 1e-14);
  CHECK((s.proj_plus - (Eigen::Matrix2d::Identity() - Pm)).norm() < 1e-14);
}

TEST_CASE("projections are complementary, orthogonal and commute with A") {
  Eigen::Matrix3d M;
  M << 1, 2, 0, 2, -3, 1, 0, 1, 4;
  const SpectralSplit s = split(M);
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  CHECK((s.proj_minus + s.proj_plus - I).norm() < 1e-14);
  CHECK((s.proj_minus * s.proj_plus).norm() < 1e-14);
  CHECK((s.proj_minus * s.proj_minus - s.proj_minus).norm() < 1e-14);
  CHECK((M * s.proj_minus - s.proj_minus * M).norm() < 1e-13);
}

TEST_CASE("degenerate and asymmetric inputs are rejected") {
  Eigen::Matrix2d degenerate = Eigen::Vector2d(-1, 1e-14).asDiagonal();
  CHECK_THROWS_AS(split(degenerate), Error);
  try {
    split(degenerate);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateCriticalPoint);
  }
  Eigen::Matrix2d asym;
  asym << -1, 0.5, 0, 2;
  try {
    split(asym);
    FAIL("asymmetric matrix accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotSymmetric);
  }
}

TEST_CASE("minimum and maximum succeed with k at the extremes") {
  CHECK(split(Eigen::Matrix2d::Identity()).morse_index == 0);
  CHECK(split(-Eigen::Matrix2d::Identity()).morse_index == 2);
}

TEST_CASE("flow exponential") {
  const SpectralSplit s = split(Eigen::Vector2d(-1, 2).asDiagonal().toDenseMatrix());
  const Eigen::MatrixXd E = flow_exponential(s, 1.0);
  CHECK(E(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(E(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(std::abs(E(0, 1)) < 1e-16);
  CHECK((flow_exponential(s, 0.0) - Eigen::Matrix2d::Identity()).norm() < 1e-15);

  const Eigen::MatrixXd Ep = restricted_exponential(s, Subspace::Plus, 2.0);
  CHECK(Ep.norm() == doctest::Approx(std::exp(-4.0)));
  CHECK(Ep.operatorNorm() <= std::exp(-2.0 * 2.0) * (1 + 1e-12));
}

TEST_CASE("restricted exponentials act on their blocks") {
  const SpectralSplit s = split(Eigen::Vector2d(-1, 2).asDiagonal().toDenseMatrix());
  const double T = 3.0;
  const Eigen::Vector2d zm(0.2, 0.0);
  CHECK((restricted_exponential(s, Subspace::Minus, -T) * zm - std::exp(-T) * zm).norm() < 1e-15);
  CHECK((restricted_exponential(s, Subspace::Minus, T) * zm - std::exp(T) * zm).norm() < 1e-13);
  const Eigen::Vector2d e2(0, 1);
  CHECK((restricted_exponential(s, Subspace::Plus, 1.0) * e2 - std::exp(-2.0) * e2).norm() < 1e-15);

  // Rotated: block exponentials are the full exponential composed with the projections.
  const Eigen::Matrix2d R = rotation(30.0);
  const SpectralSplit r = split(R.transpose() * Eigen::Matrix2d(Eigen::Vector2d(-1, 2).asDiagonal()) * R);
  for (double t : {0.3, 1.0, 2.5}) {
    CHECK((restricted_exponential(r, Subspace::Minus, t) - flow_exponential(r, t) * r.proj_minus).norm() < 1e-12);
    CHECK((restricted_exponential(r, Subspace::Plus, t) - flow_exponential(r, t) * r.proj_plus).norm() < 1e-14);
  }
}

TEST_CASE("exponential dichotomy estimates") {
  Eigen::Matrix3d M;
  M << -2, 0.3, 0, 0.3, 1, 0.2, 0, 0.2, 3;
  const SpectralSplit s = split(M);
  const double mu = s.eigenvalues[s.morse_index];
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::Vector3d v(g(rng), g(rng), g(rng));
    v.normalize();
    const double t = 0.1 * trial;
    const Eigen::VectorXd vp = s.proj_plus * v, vm = s.proj_minus * v;
    CHECK((restricted_exponential(s, Subspace::Plus, t) * vp).norm() <= std::exp(-t * mu) * vp.norm() * (1 + 1e-10));
    CHECK((restricted_exponential(s, Subspace::Minus, t) * vm).norm() <=
          std::exp(-t * s.lambda_min()) * vm.norm() * (1 + 1e-10));
  }
}
