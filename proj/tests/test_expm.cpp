#include <doctest.h>

#include <cmath>

#include "vblap/expm.hpp"
#include "vblap/rng.hpp"

using namespace vblap;

namespace {

// Spectral oracle for Hermitian inputs.
Matrix expm_hermitian_oracle(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  return es.eigenvectors() *
         es.eigenvalues().array().exp().matrix().asDiagonal().toDenseMatrix().cast<cplx>() *
         es.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("expm of zero and diagonal matrices") {
  CHECK((expm(Matrix::Zero(3, 3)) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <=
        1e-15);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = cplx(0.0, M_PI);
  const Matrix e = expm(d);
  CHECK(std::abs(e(0, 0) - std::exp(1.0)) <= 1e-14);
  CHECK(std::abs(e(1, 1) - cplx(-1.0, 0.0)) <= 1e-13);
  CHECK(std::abs(e(0, 1)) <= 1e-15);
}

TEST_CASE("expm matches the spectral oracle on random Hermitian matrices") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + rng.below(10);
    const Matrix b = rng.normal_matrix(n, n);
    const double scale = std::pow(10.0, rng.uniform(-2.0, 1.5));
    const Matrix a = scale * 0.5 * (b + b.adjoint());
    const Matrix direct = expm(a);
    const Matrix oracle = expm_hermitian_oracle(a);
    const double norm = oracle.cwiseAbs().maxCoeff();
    CHECK((direct - oracle).cwiseAbs().maxCoeff() <= 1e-11 * (1.0 + norm));
  }
}

TEST_CASE("expm respects the exponential law on random complex matrices") {
  Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + rng.below(6);
    const Matrix a = rng.normal_matrix(n, n);
    const Matrix ea = expm(a);
    const Matrix half = expm(0.5 * a);
    CHECK((half * half - ea).cwiseAbs().maxCoeff() <=
          1e-10 * (1.0 + ea.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("expm of a nilpotent block is exact") {
  Matrix n2 = Matrix::Zero(2, 2);
  n2(0, 1) = 3.0;
  const Matrix e = expm(n2);
  CHECK(std::abs(e(0, 0) - 1.0) <= 1e-15);
  CHECK(std::abs(e(0, 1) - 3.0) <= 1e-14);
  CHECK(std::abs(e(1, 0)) <= 1e-15);
}

TEST_CASE("order selection and squaring metadata") {
  Matrix small = 1e-3 * Matrix::Identity(2, 2);
  CHECK(expm_detailed(small).pade_order == 3);
  CHECK(expm_detailed(small).squarings == 0);

  Matrix large = 100.0 * Matrix::Identity(2, 2);
  const auto detail = expm_detailed(large);
  CHECK(detail.pade_order == 13);
  CHECK(detail.squarings >= 4);
  CHECK(std::abs(detail.value(0, 0) - std::exp(100.0)) <= 1e-9 * std::exp(100.0));
  CHECK(detail.backward_error_estimate > 0.0);
}
