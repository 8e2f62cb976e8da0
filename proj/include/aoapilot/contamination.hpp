#pragma once

#include <vector>

#include "aoapilot/scenario.hpp"

namespace aoapilot {

// Range of cos(omega) over an AoA interval: the target's main lobe in the
// cosine domain.
struct CosineSupport {
  double low = 0.0;
  double high = 0.0;
};

CosineSupport cosine_support(const AoAInterval& interval);

// Dirichlet magnitude sqrt(D) |sum_m exp(j 2 pi m s (cos phi - cos omega))|,
// closed form with the removable singularities evaluated as M.
double j_kernel(double omega, double phi, double D, int M, double spacing);

// (1/M) * integral of J^2(omega, phi) p(omega) d omega, uniform p on the
// interval, by adaptive Gauss-Kronrod.
double interference_integral(double phi, const AoAInterval& interval, double D, int M,
                             double spacing);

// Zeros of J(omega, .) on [0, pi], ascending: cos(phi) = cos(omega) + n / (M s)
// for integer n != 0 (mod M).
std::vector<double> dirichlet_zeros(double omega, int M, double spacing);

// First Dirichlet nulls bracketing the target's main lobe. psi_min <= psi_max
// as angles; the cosine fields hold the unclamped null positions so that a
// ramp whose null falls beyond +-1 keeps its slope.
struct PsiBounds {
  double psi_min = 0.0;
  double psi_max = 0.0;
  double cos_null_high = 0.0;  // cos(psi_min): first null above the lobe
  double cos_null_low = 0.0;   // cos(psi_max): first null below the lobe
};

// Throws ConfigError when M * spacing is so small that J has no zeros at all.
PsiBounds psi_bounds(const AoAInterval& interval, int M, double spacing);

// Piecewise-linear proxy for max_omega J(omega, phi) / M: sqrt(D) on the main
// lobe, linear ramps to the first nulls on either side, zero beyond.
double g_aprx(double phi, const AoAInterval& target, double D_target, const PsiBounds& psi);

// Interference cost of an interferer on a target: the proxy summed over the
// interferer's two AoA endpoints.
double pair_cost(const AoAInterval& target, double D_target, const AoAInterval& interferer,
                 int M, double spacing);

}  // namespace aoapilot
