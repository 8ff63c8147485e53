#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace blursynth {

// Seeded generator whose draws are identical across standard libraries:
// std::mt19937_64 is fully specified, but the std distributions are not, so
// the mapping from raw words to numbers lives here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n), unbiased by rejection.
  std::uint64_t uniform_index(std::uint64_t n);

  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Child seed for a named sub-stream, e.g. derive_seed(master, "seq_0007").
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label);

}  // namespace blursynth
