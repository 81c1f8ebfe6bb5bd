#pragma once

#include <cmath>
#include <cstdint>

namespace rcp {

// splitmix64 step, used for key derivation and state seeding.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class StreamPurpose : std::uint64_t {
  init = 1,
  dither = 2,
  suppress = 3,
  minibatch = 4,
  noise = 5,
  attack = 6,
  certify = 7,
  partition = 9,
};

// Counter-derived xoshiro256** stream.
//
// Streams are keyed by (master seed, agent, step, purpose), so every draw an
// agent makes at a given step is reproducible regardless of the order agents
// are processed in. Runs never share a generator.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  static RandomStream derive(std::uint64_t master, std::uint64_t agent,
                             std::uint64_t step, StreamPurpose purpose) {
    std::uint64_t h = master;
    h = mix(h, agent);
    h = mix(h, step);
    h = mix(h, static_cast<std::uint64_t>(purpose));
    return RandomStream(h);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0,1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller. Explicit formula keeps the draw
  // sequence identical across standard library implementations.
  double normal() {
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Uniform integer in [0,n). Modulo bias is ~n/2^64, irrelevant here.
  std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % n; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  static std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return splitmix64(h);
  }

  std::uint64_t state_[4];
};

}  // namespace rcp
