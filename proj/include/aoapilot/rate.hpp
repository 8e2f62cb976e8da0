#pragma once

#include <span>
#include <vector>

#include "aoapilot/assignment.hpp"
#include "aoapilot/channel.hpp"
#include "aoapilot/random.hpp"
#include "aoapilot/world.hpp"

namespace aoapilot {

struct RateConfig {
  int realizations = 100;
  double pilot_snr_db = 20.0;
  // log2(1 + E[SINR]) instead of E[log2(1 + SINR)].
  bool rate_of_mean = false;
};

// Channel vectors of every user to every BS for one small-scale realization.
struct ChannelSet {
  int L = 0;
  int K = 0;
  std::vector<ComplexVector> g;  // [(bs * L + cell) * K + user]

  const ComplexVector& at(int bs, int cell, int user) const { return g[(bs * L + cell) * K + user]; }
};

ChannelSet generate_channels(const ScenarioBundle& world, const ChannelConfig& cfg, RandomStream& rng);

// Additive estimation noise per (BS, pilot), drawn BS-major so that the first
// K pilots coincide across pilot maps of different size.
struct PilotNoise {
  int pilot_count = 0;
  std::vector<ComplexVector> n;  // [bs * pilot_count + pilot]
};

PilotNoise generate_pilot_noise(int L, int M, int pilot_count, double variance, RandomStream& rng);

// Noise variance of the least-squares estimate: sigma2 scaled by the gap
// between the cell-edge SNR and the pilot SNR.
double pilot_noise_variance(const SystemConfig& config, double pilot_snr_db);

// LS estimate + MRC. Returns SINR per user, indexed [cell * K + user].
std::vector<double> uplink_sinr(const ChannelSet& channels, const PilotMap& map,
                                const PilotNoise& noise, double sigma2);

struct RateReport {
  std::vector<double> user_rates;  // bits/s/Hz, [cell * K + user]
  std::vector<double> cell_min;
  double min_rate = 0.0;
  int realizations = 0;
  double overhead_factor = 1.0;
};

RateReport summarize_rates(std::vector<double> user_rates, int L, int K, int realizations,
                           double overhead_factor);

// Monte Carlo minimum user rate of a pilot map.
RateReport min_rate(const PilotMap& map, const ScenarioBundle& world, const RateConfig& rate,
                    const ChannelConfig& channel, RandomStream& rng);

// Trailing mean; the first window-1 entries average what is available.
std::vector<double> moving_average(std::span<const double> series, int window);

}  // namespace aoapilot
