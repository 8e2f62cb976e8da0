#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "aoapilot/scenario.hpp"

namespace testing {

inline constexpr double kPi = std::numbers::pi;

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
  return std::abs(a - b) <= std::max(rel * std::max(std::abs(a), std::abs(b)), abs_floor);
}

// Direct M-term Dirichlet sum.
inline double direct_j(double omega, double phi, double D, int M, double s) {
  std::complex<double> acc = 0.0;
  for (int m = 0; m < M; ++m) {
    acc += std::polar(1.0, 2.0 * kPi * m * s * (std::cos(phi) - std::cos(omega)));
  }
  return std::sqrt(D) * std::abs(acc);
}

inline aoapilot::SystemConfig small_system(int L, int K, int M) {
  aoapilot::SystemConfig c;
  c.L = L;
  c.K = K;
  c.M = M;
  return c;
}

}  // namespace testing
