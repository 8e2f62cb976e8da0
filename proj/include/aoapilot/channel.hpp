#pragma once

#include <Eigen/Dense>
#include <vector>

#include "aoapilot/random.hpp"
#include "aoapilot/scenario.hpp"

namespace aoapilot {

using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

enum class PathPhaseModel {
  kUnitPhase,      // alpha = exp(j theta), theta ~ U[0, 2pi)
  kComplexNormal,  // alpha ~ CN(0, 1)
};

struct ChannelConfig {
  int paths = 200;
  int quad_points = 512;
  PathPhaseModel phase_model = PathPhaseModel::kUnitPhase;
};

// ULA response; entry m (0-based) is exp(-j 2 pi m spacing cos(omega)).
ComplexVector steering(double omega, int M, double spacing);

// D * E[a a^H] for omega uniform on the interval, composite midpoint rule.
// A zero-width interval yields the rank-1 point-mass covariance.
ComplexMatrix covariance(const AoAInterval& interval, double D, int M, double spacing,
                         int quad_points = 512);

struct ChannelRealization {
  ComplexVector g;
  std::vector<double> angles;
  std::vector<std::complex<double>> phases;
};

// g = sqrt(D / P) * sum_p a(omega_p) alpha_p with omega_p ~ U[low, high].
ChannelRealization realize_channel(const AoAInterval& interval, double D, int paths, int M,
                                   double spacing, RandomStream& rng,
                                   PathPhaseModel model = PathPhaseModel::kUnitPhase);

// Same draw as realize_channel but only the channel vector is produced.
ComplexVector draw_channel(const AoAInterval& interval, double D, int paths, int M,
                           double spacing, RandomStream& rng,
                           PathPhaseModel model = PathPhaseModel::kUnitPhase);

}  // namespace aoapilot
