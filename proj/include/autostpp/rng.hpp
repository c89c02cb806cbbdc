#pragma once

// Reproducible randomness.
//
// Bits come from Philox4x32-10 (Salmon et al., Random123), a counter-based
// generator: block i of stream (key) is philox(counter = i, key). Streams are
// derived from a user seed and a label ("sim", "train", "mc", ...) so
// components never share a stream. Distribution transforms are spelled out
// below instead of using <random> distributions, whose output is
// implementation-defined:
//   uniform()       (u64 >> 11) * 2^-53, in [0, 1)
//   normal()        Box-Muller on two uniforms, second value cached
//   exponential(r)  -log(1 - u) / r

#include <array>
#include <cstdint>
#include <string_view>

namespace autostpp {

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view label);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double exponential(double rate);
  // Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);

  // Independent child stream, e.g. one per sequence or per seed.
  Rng split(std::string_view label) const;

 private:
  std::array<std::uint32_t, 2> key_{};
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace autostpp
