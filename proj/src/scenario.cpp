#include "aoapilot/scenario.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "aoapilot/errors.hpp"

namespace aoapilot {

void SystemConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid scenario config: " + what); };
  if (L < 1) fail("L must be >= 1");
  if (K < 1) fail("K must be >= 1");
  if (M < 2) fail("M must be >= 2");
  if (!(eta > 0.0)) fail("eta must be > 0");
  if (!(R > 0.0)) fail("R must be > 0");
  if (!(sigma2 > 0.0)) fail("sigma2 must be > 0");
  if (!(spacing > 0.0 && spacing <= 0.5)) fail("spacing must lie in (0, 0.5]");
  if (!(scatter_radius > 0.0 && scatter_radius < R)) fail("scatter_radius must lie in (0, R)");
  if (!(exclusion_radius >= 0.0 && exclusion_radius < R)) fail("exclusion_radius must lie in [0, R)");
}

CellLayout build_layout(const SystemConfig& config) {
  if (config.L > 7) {
    throw ConfigError("hexagonal preset supports at most 7 cells (L=" + std::to_string(config.L) +
                      "); supply a custom layout for larger clusters");
  }
  if (config.L < 1) throw ConfigError("L must be >= 1");
  CellLayout layout;
  layout.bs_positions.push_back({0.0, 0.0});
  const double ring = std::sqrt(3.0) * config.R;
  for (int k = 0; k + 1 < config.L; ++k) {
    const double angle = (30.0 + 60.0 * k) * std::numbers::pi / 180.0;
    layout.bs_positions.push_back({ring * std::cos(angle), ring * std::sin(angle)});
  }
  return layout;
}

bool inside_hexagon(Position p, Position c, double R) {
  const double x = std::abs(p.x - c.x);
  const double y = std::abs(p.y - c.y);
  const double s3 = std::sqrt(3.0);
  return y <= 0.5 * s3 * R && s3 * x + y <= s3 * R;
}

UserDrop drop_users(const CellLayout& layout, const SystemConfig& config, RandomStream& rng) {
  if (config.exclusion_radius >= config.R) {
    throw ConfigError("exclusion_radius >= R leaves no admissible user positions");
  }
  constexpr int kMaxAttempts = 100000;
  const double half_height = 0.5 * std::sqrt(3.0) * config.R;
  UserDrop drop;
  drop.L = static_cast<int>(layout.bs_positions.size());
  drop.K = config.K;
  drop.user_positions.reserve(static_cast<std::size_t>(drop.L) * drop.K);
  for (const Position& bs : layout.bs_positions) {
    for (int k = 0; k < config.K; ++k) {
      int attempts = 0;
      while (true) {
        if (++attempts > kMaxAttempts) {
          throw NumericFailure("user drop rejection sampling failed after " +
                               std::to_string(kMaxAttempts) + " attempts");
        }
        const Position p{bs.x + rng.uniform(-config.R, config.R),
                         bs.y + rng.uniform(-half_height, half_height)};
        if (!inside_hexagon(p, bs, config.R)) continue;
        if (distance(p, bs) < config.exclusion_radius) continue;
        drop.user_positions.push_back(p);
        break;
      }
    }
  }
  return drop;
}

double edge_constant(const SystemConfig& config) {
  const double c_db = config.gamma_snr_db + 10.0 * config.eta * std::log10(config.R) +
                      10.0 * std::log10(config.sigma2);
  return std::pow(10.0, c_db / 10.0);
}

double large_scale(Position user, Position bs, const SystemConfig& config) {
  const double d = distance(user, bs);
  if (!(d > 0.0)) throw NumericFailure("large-scale fading undefined at zero distance");
  return edge_constant(config) * std::pow(d, -config.eta);
}

AoAInterval aoa_interval(Position user, Position bs, double scatter_radius, bool clamp) {
  const double dx = user.x - bs.x;
  const double dy = user.y - bs.y;
  const double d = std::sqrt(dx * dx + dy * dy);
  const double ratio = d > 0.0 ? scatter_radius / d : INFINITY;
  double half;
  if (ratio < 1.0) {
    half = std::asin(ratio);
  } else if (clamp) {
    half = 0.5 * std::numbers::pi - 1e-6;
  } else {
    throw NumericFailure("user lies within its scatter radius of the BS; AoA half-width undefined");
  }
  return {std::atan2(dy, dx), half};
}

}  // namespace aoapilot
