#include "aoapilot/contamination.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "aoapilot/errors.hpp"

namespace aoapilot {

CosineSupport cosine_support(const AoAInterval& interval) {
  const double a = interval.low();
  const double b = interval.high();
  double lo = std::min(std::cos(a), std::cos(b));
  double hi = std::max(std::cos(a), std::cos(b));
  const double pi = std::numbers::pi;
  // Interior multiples of pi hit the extremes of the cosine.
  for (double n = std::ceil(a / pi); n * pi <= b; n += 1.0) {
    if (std::fmod(std::abs(n), 2.0) == 0.0) {
      hi = 1.0;
    } else {
      lo = -1.0;
    }
  }
  return {lo, hi};
}

double j_kernel(double omega, double phi, double D, int M, double spacing) {
  const double t = spacing * (std::cos(phi) - std::cos(omega));
  // |sin(M pi t) / sin(pi t)| is 1-periodic in t up to sign.
  const double r = t - std::round(t);
  if (r == 0.0) return std::sqrt(D) * M;
  const double pi = std::numbers::pi;
  return std::sqrt(D) * std::abs(std::sin(M * pi * r) / std::sin(pi * r));
}

double interference_integral(double phi, const AoAInterval& interval, double D, int M,
                             double spacing) {
  if (interval.half_width <= 0.0) {
    const double j = j_kernel(interval.center, phi, D, M, spacing);
    return j * j / M;
  }
  auto integrand = [&](double omega) {
    const double j = j_kernel(omega, phi, D, M, spacing);
    return j * j;
  };
  // Split into pieces no wider than a fraction of a Dirichlet lobe so each
  // adaptive call sees a smooth, weakly oscillating integrand.
  const double width = 2.0 * interval.half_width;
  const int pieces = std::max(1, static_cast<int>(std::ceil(width * M * spacing * 2.0)));
  const double h = width / pieces;
  double total = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double a = interval.low() + i * h;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, a + h,
                                                                           10, 1e-12);
  }
  return total / width / M;
}

std::vector<double> dirichlet_zeros(double omega, int M, double spacing) {
  const double c = std::cos(omega);
  const double step = 1.0 / (M * spacing);
  std::vector<double> zeros;
  // Slack keeps the zeros at exactly +-1 despite rounding in cos(omega).
  const long first = static_cast<long>(std::ceil((-1.0 - c) / step - 1e-9));
  const long last = static_cast<long>(std::floor((1.0 - c) / step + 1e-9));
  for (long n = first; n <= last; ++n) {
    if (n % M == 0) continue;
    const double x = std::clamp(c + n * step, -1.0, 1.0);
    zeros.push_back(std::acos(x));
  }
  std::sort(zeros.begin(), zeros.end());
  return zeros;
}

PsiBounds psi_bounds(const AoAInterval& interval, int M, double spacing) {
  if (M < 2) throw ConfigError("psi bounds need M >= 2");
  const double step = 1.0 / (M * spacing);
  if (step > 2.0) {
    throw ConfigError(
        "array aperture M*spacing too small: J has no zeros on [0, pi]; use the wide-band cost "
        "(g_aprx saturated to 1)");
  }
  const CosineSupport lobe = cosine_support(interval);
  PsiBounds psi;
  psi.cos_null_high = lobe.high + step;
  psi.cos_null_low = lobe.low - step;
  psi.psi_min = std::acos(std::min(1.0, psi.cos_null_high));
  psi.psi_max = std::acos(std::max(-1.0, psi.cos_null_low));
  return psi;
}

double g_aprx(double phi, const AoAInterval& target, double D_target, const PsiBounds& psi) {
  const CosineSupport lobe = cosine_support(target);
  const double c = std::cos(phi);
  double value = 0.0;
  if (c >= lobe.low && c <= lobe.high) {
    value = 1.0;
  } else if (c > lobe.high) {
    const double span = psi.cos_null_high - lobe.high;
    value = span > 0.0 ? (psi.cos_null_high - c) / span : 0.0;
  } else {
    const double span = lobe.low - psi.cos_null_low;
    value = span > 0.0 ? (c - psi.cos_null_low) / span : 0.0;
  }
  return std::sqrt(D_target) * std::clamp(value, 0.0, 1.0);
}

double pair_cost(const AoAInterval& target, double D_target, const AoAInterval& interferer,
                 int M, double spacing) {
  const PsiBounds psi = psi_bounds(target, M, spacing);
  return g_aprx(interferer.low(), target, D_target, psi) +
         g_aprx(interferer.high(), target, D_target, psi);
}

}  // namespace aoapilot
