#pragma once

#include <cmath>
#include <cstdint>

namespace hpfold {

// Exponential exploration decay over the episodes of a trial.
struct EpsilonSchedule {
  double eps_min = 0.01;
  double eps_max = 1.0;
  double lambda = 5.0;
  std::int64_t psi = 1;  // total episodes
};

inline double epsilonAt(const EpsilonSchedule& s, std::int64_t episode) {
  return s.eps_min + (s.eps_max - s.eps_min) *
                         std::exp(-static_cast<double>(episode) * s.lambda /
                                  static_cast<double>(s.psi));
}

}  // namespace hpfold
