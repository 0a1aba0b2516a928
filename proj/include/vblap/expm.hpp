#pragma once

#include "vblap/types.hpp"

namespace vblap {

struct ExpmResult {
  Matrix value;
  int pade_order = 13;
  int squarings = 0;
  // Backward-error style estimate: the result is e^{A+E} with
  // ||E||_1 <= estimate, from the order-selection thresholds.
  double backward_error_estimate = 0.0;
};

// Dense matrix exponential by scaling and squaring with a diagonal Pade
// core, order chosen from the 1-norm.
ExpmResult expm_detailed(const Matrix& a);
Matrix expm(const Matrix& a);

}  // namespace vblap
