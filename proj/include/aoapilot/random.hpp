#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>

namespace aoapilot {

// Named sub-streams derived from a master seed. Every consumer of randomness
// in an experiment pulls from its own stream so methods can be compared on
// identical world sequences.
enum class StreamId : std::uint64_t {
  kDrop = 1,
  kCalibration = 2,
  kAgent = 3,
  kRandomBaseline = 4,
  kChannel = 5,
  kPilotNoise = 6,
  kInit = 7,
  kEnv = 8,
};

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0);

  // Independent stream for (seed, id, index); pure function of its arguments.
  static RandomStream derive(std::uint64_t seed, StreamId id, std::uint64_t index = 0);

  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  int uniform_int(int lo, int hi);        // inclusive
  double normal();                        // N(0, 1)

  std::mt19937_64& engine() { return engine_; }

  friend std::ostream& operator<<(std::ostream& os, const RandomStream& s);
  friend std::istream& operator>>(std::istream& is, RandomStream& s);
  friend bool operator==(const RandomStream& a, const RandomStream& b) {
    return a.engine_ == b.engine_;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace aoapilot
