#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "aoapilot/random.hpp"

namespace aoapilot {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Position a, Position b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// Geometry and physical constants of the multi-cell uplink.
struct SystemConfig {
  int L = 7;                      // cells
  int K = 4;                      // users per cell, equal to the pilot count
  int M = 100;                    // BS antennas
  double eta = 2.5;               // path-loss exponent
  double R = 500.0;               // cell radius [m]
  double gamma_snr_db = 20.0;     // cell-edge SNR [dB]
  double sigma2 = 1.0;            // receiver noise variance
  double spacing = 0.5;           // antenna spacing d / lambda
  double scatter_radius = 50.0;   // r_kl [m]
  double exclusion_radius = 50.0; // minimum user-BS distance [m]
  std::uint64_t seed = 1;
  // When a user sits inside its scatter ring the AoA half-width is clamped to
  // just below pi/2 instead of raising.
  bool clamp_aoa = true;

  void validate() const;  // throws ConfigError
};

struct CellLayout {
  std::vector<Position> bs_positions;  // index 0 is the central cell
};

// user_positions[l * K + k]: k-th user of cell l.
struct UserDrop {
  int L = 0;
  int K = 0;
  std::vector<Position> user_positions;

  Position user(int cell, int k) const { return user_positions[cell * K + k]; }
};

struct AoAInterval {
  double center = 0.0;
  double half_width = 0.0;

  double low() const { return center - half_width; }
  double high() const { return center + half_width; }

  static AoAInterval from_bounds(double low, double high) {
    return {0.5 * (low + high), 0.5 * (high - low)};
  }
};

// Hexagonal preset: central cell plus up to six ring cells at sqrt(3) R.
CellLayout build_layout(const SystemConfig& config);

// True when p lies in the flat-topped hexagon of circumradius R centred at c.
bool inside_hexagon(Position p, Position c, double R);

UserDrop drop_users(const CellLayout& layout, const SystemConfig& config, RandomStream& rng);

// Large-scale fading D = c * dist^-eta with c from the cell-edge SNR.
double edge_constant(const SystemConfig& config);
double large_scale(Position user, Position bs, const SystemConfig& config);

// AoA support of a user seen from a BS. Bearing uses atan2; the half-width
// uses the Euclidean distance in the arcsin.
AoAInterval aoa_interval(Position user, Position bs, double scatter_radius, bool clamp = false);

}  // namespace aoapilot
