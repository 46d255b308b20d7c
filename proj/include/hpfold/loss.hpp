#pragma once

#include <cmath>

namespace hpfold {

// Huber loss: quadratic inside |delta| <= 1, linear outside.
inline double huber(double delta) {
  const double a = std::abs(delta);
  return a <= 1.0 ? 0.5 * delta * delta : a - 0.5;
}

// d huber / d delta.
inline double huberGrad(double delta) {
  if (delta > 1.0) return 1.0;
  if (delta < -1.0) return -1.0;
  return delta;
}

}  // namespace hpfold
