#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace swarm {

// All randomness in the project flows through this generator. Streams are
// derived from a 64-bit master seed by key mixing, so every consumer (each
// environment, action sampling, dropout schedules, evaluation, init) owns an
// independent stream that is stable run-to-run and independent of how other
// streams are consumed.
//
// Generator: xoshiro256++ seeded via SplitMix64 expansion. Both are public
// domain algorithms with well-studied statistical behavior; the uniform
// double conversion uses the top 53 bits so results are bit-portable.

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Mixes a stream tag into a base seed. Chaining calls builds a key path,
// e.g. derive_seed(derive_seed(master, kEnvStream), env_index).
inline uint64_t derive_seed(uint64_t base, uint64_t tag) {
  uint64_t s = base ^ (tag * 0x9e3779b97f4a7c15ull + 0x243f6a8885a308d3ull);
  return splitmix64(s);
}

class Rng {
 public:
  Rng() : Rng(0) {}
  explicit Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  Rng derive(uint64_t tag) const {
    return Rng(derive_seed(state_[0] ^ state_[2], tag));
  }

  uint64_t next() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n). n must be > 0.
  uint64_t below(uint64_t n) {
    const uint64_t threshold = (0 - n) % n;
    for (;;) {
      const uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Standard normal via Box-Muller; both values computed, one returned, so
  // the stream advances by exactly two draws per call.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();  // guard log(0)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  std::array<uint64_t, 4> state() const { return state_; }
  void set_state(const std::array<uint64_t, 4>& s) { state_ = s; }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<uint64_t, 4> state_;
};

// Stream tags used across the project. Kept in one place so the seeding
// layout is documented and stable.
namespace stream {
constexpr uint64_t kEnvInit = 1;     // per-env episode initialization
constexpr uint64_t kAction = 2;      // per-env action sampling
constexpr uint64_t kDropout = 3;     // per-env dropout schedules
constexpr uint64_t kEval = 4;        // evaluation episodes
constexpr uint64_t kParamInit = 5;   // network initialization
constexpr uint64_t kShuffle = 6;     // minibatch shuffling
}  // namespace stream

}  // namespace swarm
