#pragma once

#include <array>
#include <cstdint>

namespace urnnet {

/// splitmix64 step; used only to expand seeds into generator state.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ with splitmix64 seeding. Every ensemble run gets an
/// independent stream derived from (master seed, run index), so runs can be
/// scheduled on any number of threads without correlating.
///
/// Draw contract used by the dynamics engine: one uniform per agent per
/// step, consumed in ascending agent order. The uniform is
/// (next() >> 11) * 2^-53, so trajectories are reproducible bit-for-bit
/// across platforms for a fixed (master seed, run index).
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) { reseed(seed); }

  static std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t run_index) {
    std::uint64_t x = master_seed;
    const std::uint64_t m = splitmix64(x);
    return m + 0x9E3779B97F4A7C15ULL * (run_index + 1);
  }

  static Xoshiro256pp for_run(std::uint64_t master_seed, std::uint64_t run_index) {
    return Xoshiro256pp(derive_seed(master_seed, run_index));
  }

  void reseed(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : state_) w = splitmix64(x);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool operator==(const Xoshiro256pp& o) const { return state_ == o.state_; }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace urnnet
