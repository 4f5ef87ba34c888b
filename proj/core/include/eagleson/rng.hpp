/*
   Copyright 2026 the eagleson authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#ifndef EAGLESON_RNG_HPP
#define EAGLESON_RNG_HPP

#include <cstdint>

namespace eagleson {

/// Finalizer of splitmix64 (Steele/Lea/Flood; Vigna's fixed-increment variant).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
  z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
  return z ^ (z >> 31);
}

/// splitmix64 stream. One instance per trajectory; never shared across threads.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next_u64() {
    state_ += UINT64_C(0x9E3779B97F4A7C15);
    return mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Derives the generator state for trajectory `index` of a batch seeded with
/// `master_seed`. Both words pass through the splitmix64 finalizer so the
/// per-trajectory states are pseudo-randomly spaced in the 2^64 state cycle;
/// consecutive indices do not yield shifted copies of the same stream.
inline constexpr std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                                  std::uint64_t index) {
  std::uint64_t h = mix64(master_seed ^ UINT64_C(0xA0761D6478BD642F));
  h = mix64(h ^ (index + UINT64_C(0xE7037ED1A0B428DB)));
  return h;
}

/// Per-trajectory stream: the contract used by every sampling routine.
inline constexpr SplitMix64 trajectory_stream(std::uint64_t master_seed,
                                              std::uint64_t index) {
  return SplitMix64(derive_stream_seed(master_seed, index));
}

}  // namespace eagleson

#endif  // EAGLESON_RNG_HPP
