#pragma once

#include "griddyn/common.hpp"

namespace griddyn {

// Counter-based generator: draw i of stream s under seed is
//   mix(mix(seed ^ 0xD2B74407B1CE6E93 * s) + (i + 1) * GAMMA)
// with mix the splitmix64 finalizer. Each draw is a pure function of
// (seed, stream, counter), so results never depend on evaluation order
// and any draw can be replayed in isolation. See docs/rng.md.
struct Rng {
  static constexpr u64 kGamma = 0x9E3779B97F4A7C15ull;

  static u64 mix(u64 z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  u64 seed = 0;
  u64 stream = 0;
  u64 ctr = 0;

  Rng() = default;
  Rng(u64 seed_, u64 stream_) : seed(seed_), stream(stream_) {}

  u64 key() const { return mix(seed ^ (0xD2B74407B1CE6E93ull * stream)); }
  u64 at(u64 i) const { return mix(key() + (i + 1) * kGamma); }
  u64 next() { return at(ctr++); }

  // [0, 1)
  double uniform01() { return (double)(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  // small n only; modulo bias is < n / 2^64
  u64 below(u64 n) { return next() % n; }

  // independent substream, decoupled from this one's counter
  Rng fork(u64 substream) const { return Rng(seed, mix(stream ^ (substream + 0x6A09E667F3BCC909ull))); }
};

}  // namespace griddyn
