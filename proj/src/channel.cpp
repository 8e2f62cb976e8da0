#include "aoapilot/channel.hpp"

#include <cmath>
#include <numbers>

#include "aoapilot/errors.hpp"

namespace aoapilot {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::complex<double> draw_phase(RandomStream& rng, PathPhaseModel model) {
  if (model == PathPhaseModel::kComplexNormal) {
    const double re = rng.normal();
    const double im = rng.normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
  }
  return std::polar(1.0, kTwoPi * rng.uniform());
}

}  // namespace

ComplexVector steering(double omega, int M, double spacing) {
  ComplexVector a(M);
  const double step = -kTwoPi * spacing * std::cos(omega);
  for (int m = 0; m < M; ++m) a[m] = std::polar(1.0, step * m);
  return a;
}

ComplexMatrix covariance(const AoAInterval& interval, double D, int M, double spacing,
                         int quad_points) {
  if (quad_points < 2) throw ConfigError("covariance quadrature needs at least 2 points");
  if (interval.half_width <= 0.0) {
    const ComplexVector a = steering(interval.center, M, spacing);
    return D * a * a.adjoint();
  }
  ComplexMatrix r = ComplexMatrix::Zero(M, M);
  const double width = 2.0 * interval.half_width;
  const double h = width / quad_points;
  for (int q = 0; q < quad_points; ++q) {
    const double omega = interval.low() + (q + 0.5) * h;
    const ComplexVector a = steering(omega, M, spacing);
    r.noalias() += a * a.adjoint();
  }
  // Uniform density 1 / width times the node weight h.
  r *= D / quad_points;
  return 0.5 * (r + r.adjoint());
}

ChannelRealization realize_channel(const AoAInterval& interval, double D, int paths, int M,
                                   double spacing, RandomStream& rng, PathPhaseModel model) {
  if (paths < 1) throw ConfigError("path count must be >= 1");
  ChannelRealization out;
  out.g = ComplexVector::Zero(M);
  out.angles.reserve(paths);
  out.phases.reserve(paths);
  for (int p = 0; p < paths; ++p) {
    const double omega = rng.uniform(interval.low(), interval.high());
    const std::complex<double> alpha = draw_phase(rng, model);
    out.angles.push_back(omega);
    out.phases.push_back(alpha);
    out.g += steering(omega, M, spacing) * alpha;
  }
  out.g *= std::sqrt(D / paths);
  return out;
}

ComplexVector draw_channel(const AoAInterval& interval, double D, int paths, int M,
                           double spacing, RandomStream& rng, PathPhaseModel model) {
  if (paths < 1) throw ConfigError("path count must be >= 1");
  ComplexVector g = ComplexVector::Zero(M);
  for (int p = 0; p < paths; ++p) {
    const double omega = rng.uniform(interval.low(), interval.high());
    const std::complex<double> alpha = draw_phase(rng, model);
    const std::complex<double> z = std::polar(1.0, -kTwoPi * spacing * std::cos(omega));
    std::complex<double> v = alpha;
    for (int m = 0; m < M; ++m) {
      g[m] += v;
      v *= z;
    }
  }
  g *= std::sqrt(D / paths);
  return g;
}

}  // namespace aoapilot
