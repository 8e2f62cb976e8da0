#include "aoapilot/random.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

namespace aoapilot {

RandomStream::RandomStream(std::uint64_t seed) : engine_(seed) {}

RandomStream RandomStream::derive(std::uint64_t seed, StreamId id, std::uint64_t index) {
  const auto tag = static_cast<std::uint64_t>(id);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  RandomStream s;
  s.engine_.seed(seq);
  return s;
}

double RandomStream::uniform() {
  // 53 random mantissa bits; avoids implementation-defined distribution output.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int RandomStream::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return lo + static_cast<int>(x % span);
}

double RandomStream::normal() {
  // Marsaglia polar method without caching, so the engine is the only state.
  while (true) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

std::ostream& operator<<(std::ostream& os, const RandomStream& s) { return os << s.engine_; }
std::istream& operator>>(std::istream& is, RandomStream& s) { return is >> s.engine_; }

}  // namespace aoapilot
