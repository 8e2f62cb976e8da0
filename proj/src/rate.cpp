#include "aoapilot/rate.hpp"

#include <algorithm>
#include <cmath>

#include "aoapilot/errors.hpp"

namespace aoapilot {

ChannelSet generate_channels(const ScenarioBundle& world, const ChannelConfig& cfg, RandomStream& rng) {
  const int L = world.L();
  const int K = world.K();
  const SystemConfig& sys = world.config();
  ChannelSet set;
  set.L = L;
  set.K = K;
  set.g.reserve(static_cast<std::size_t>(L) * L * K);
  for (int j = 0; j < L; ++j) {
    for (int l = 0; l < L; ++l) {
      for (int u = 0; u < K; ++u) {
        set.g.push_back(draw_channel(world.interval(j, l, u), world.gain(j, l, u), cfg.paths, sys.M,
                                     sys.spacing, rng, cfg.phase_model));
      }
    }
  }
  return set;
}

PilotNoise generate_pilot_noise(int L, int M, int pilot_count, double variance, RandomStream& rng) {
  PilotNoise noise;
  noise.pilot_count = pilot_count;
  noise.n.reserve(static_cast<std::size_t>(L) * pilot_count);
  const double scale = std::sqrt(variance / 2.0);
  for (int j = 0; j < L; ++j) {
    for (int p = 0; p < pilot_count; ++p) {
      ComplexVector v(M);
      for (int m = 0; m < M; ++m) {
        const double re = rng.normal();
        const double im = rng.normal();
        v[m] = {scale * re, scale * im};
      }
      noise.n.push_back(std::move(v));
    }
  }
  return noise;
}

double pilot_noise_variance(const SystemConfig& config, double pilot_snr_db) {
  return config.sigma2 * std::pow(10.0, (config.gamma_snr_db - pilot_snr_db) / 10.0);
}

std::vector<double> uplink_sinr(const ChannelSet& channels, const PilotMap& map,
                                const PilotNoise& noise, double sigma2) {
  const int L = channels.L;
  const int K = channels.K;
  if (noise.pilot_count < map.pilot_count) throw ConfigError("pilot noise does not cover every pilot");
  std::vector<double> sinr(static_cast<std::size_t>(L) * K, 0.0);
  for (int j = 0; j < L; ++j) {
    for (int u = 0; u < K; ++u) {
      const int p = map.pilot(j, u);
      ComplexVector estimate = noise.n[j * noise.pilot_count + p];
      for (int l = 0; l < L; ++l) {
        for (int v = 0; v < K; ++v) {
          if (map.pilot(l, v) == p) estimate += channels.at(j, l, v);
        }
      }
      double signal = 0.0;
      double interference = 0.0;
      for (int l = 0; l < L; ++l) {
        for (int v = 0; v < K; ++v) {
          const double power = std::norm(estimate.dot(channels.at(j, l, v)));
          if (l == j && v == u) {
            signal = power;
          } else {
            interference += power;
          }
        }
      }
      sinr[j * K + u] = signal / (interference + sigma2 * estimate.squaredNorm());
    }
  }
  return sinr;
}

RateReport summarize_rates(std::vector<double> user_rates, int L, int K, int realizations,
                           double overhead_factor) {
  RateReport r;
  r.user_rates = std::move(user_rates);
  r.realizations = realizations;
  r.overhead_factor = overhead_factor;
  r.cell_min.assign(L, INFINITY);
  for (int l = 0; l < L; ++l) {
    for (int u = 0; u < K; ++u) r.cell_min[l] = std::min(r.cell_min[l], r.user_rates[l * K + u]);
  }
  r.min_rate = *std::min_element(r.cell_min.begin(), r.cell_min.end());
  return r;
}

RateReport min_rate(const PilotMap& map, const ScenarioBundle& world, const RateConfig& rate,
                    const ChannelConfig& channel, RandomStream& rng) {
  if (rate.realizations < 1) throw ConfigError("rate evaluation needs at least one realization");
  const int L = world.L();
  const int K = world.K();
  const SystemConfig& sys = world.config();
  const double noise_var = pilot_noise_variance(sys, rate.pilot_snr_db);
  std::vector<double> acc(static_cast<std::size_t>(L) * K, 0.0);
  for (int r = 0; r < rate.realizations; ++r) {
    const ChannelSet channels = generate_channels(world, channel, rng);
    const PilotNoise noise = generate_pilot_noise(L, sys.M, map.pilot_count, noise_var, rng);
    const std::vector<double> sinr = uplink_sinr(channels, map, noise, sys.sigma2);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      acc[i] += rate.rate_of_mean ? sinr[i] : std::log2(1.0 + sinr[i]);
    }
  }
  for (double& a : acc) {
    a /= rate.realizations;
    if (rate.rate_of_mean) a = std::log2(1.0 + a);
  }
  const double overhead = static_cast<double>(map.pilot_count) / K;
  return summarize_rates(std::move(acc), L, K, rate.realizations, overhead);
}

std::vector<double> moving_average(std::span<const double> series, int window) {
  if (window < 1) throw ConfigError("moving average window must be >= 1");
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t first = i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = first; k <= i; ++k) sum += series[k];
    out[i] = sum / static_cast<double>(i + 1 - first);
  }
  return out;
}

}  // namespace aoapilot
