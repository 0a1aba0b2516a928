#include "vblap/expm.hpp"

#include <array>
#include <cmath>

#include <Eigen/LU>

namespace vblap {

namespace {

// 1-norm thresholds under which the diagonal Pade approximant of the given
// order reaches double-precision backward error.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

double one_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

Matrix pade_solve(const Matrix& u, const Matrix& v) {
  // r = (v - u)^{-1} (v + u)
  return Eigen::PartialPivLU<Matrix>(v - u).solve(v + u);
}

template <std::size_t N>
Matrix low_order_pade(const Matrix& a, const std::array<double, N>& b) {
  const Eigen::Index n = a.rows();
  const Matrix a2 = a * a;
  Matrix even = b[0] * Matrix::Identity(n, n);
  Matrix odd = b[1] * Matrix::Identity(n, n);
  Matrix power = Matrix::Identity(n, n);
  for (std::size_t k = 2; k < N; k += 2) {
    power = power * a2;
    even += b[k] * power;
    if (k + 1 < N) odd += b[k + 1] * power;
  }
  return pade_solve(a * odd, even);
}

Matrix pade13(const Matrix& a) {
  static const std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  const Eigen::Index n = a.rows();
  const Matrix identity = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a2 * a4;
  const Matrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
           b[3] * a2 + b[1] * identity);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * identity;
  return pade_solve(u, v);
}

}  // namespace

ExpmResult expm_detailed(const Matrix& a) {
  if (a.rows() != a.cols()) throw argument_error("expm needs a square matrix");
  ExpmResult result;
  const double norm = one_norm(a);
  result.backward_error_estimate =
      std::numeric_limits<double>::epsilon() * std::max(norm, 1.0);

  if (a.rows() == 0) {
    result.value = a;
    return result;
  }
  if (norm <= kTheta3) {
    result.pade_order = 3;
    result.value = low_order_pade(a, std::array<double, 4>{120, 60, 12, 1});
  } else if (norm <= kTheta5) {
    result.pade_order = 5;
    result.value =
        low_order_pade(a, std::array<double, 6>{30240, 15120, 3360, 420, 30, 1});
  } else if (norm <= kTheta7) {
    result.pade_order = 7;
    result.value = low_order_pade(
        a, std::array<double, 8>{17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1});
  } else if (norm <= kTheta9) {
    result.pade_order = 9;
    result.value = low_order_pade(
        a, std::array<double, 10>{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                  30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0});
  } else {
    result.pade_order = 13;
    const int s = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
    result.squarings = s;
    Matrix scaled = a / std::pow(2.0, s);
    Matrix r = pade13(scaled);
    for (int i = 0; i < s; ++i) r = (r * r).eval();
    result.value = std::move(r);
  }
  return result;
}

Matrix expm(const Matrix& a) { return expm_detailed(a).value; }

}  // namespace vblap
