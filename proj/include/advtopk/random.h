// Copyright 2026 The advtopk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Counter-based random streams.
//
// Every random quantity in the library is drawn from a stream identified by a
// 64-bit key. Keys are derived from a user seed plus structural coordinates
// (edge endpoints, trial index, ...), so the value of a draw never depends on
// the order in which streams are consumed. This is what makes sampling and
// Monte Carlo sweeps reproducible under any thread schedule.

#ifndef ADVTOPK_RANDOM_H_
#define ADVTOPK_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace advtopk {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// The SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a child key from a parent key and a list of coordinates.
constexpr std::uint64_t DeriveSeed(std::uint64_t base,
                                   std::initializer_list<std::uint64_t> path) {
  std::uint64_t key = Mix64(base + kGoldenGamma);
  for (std::uint64_t coordinate : path) {
    key = Mix64(key ^ Mix64(coordinate + kGoldenGamma));
  }
  return key;
}

// Stream whose n-th output is Mix64(key + (n + 1) * gamma). Satisfies
// UniformRandomBitGenerator so it can drive <random> distributions, but the
// helpers below are preferred because their output is platform independent.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() {
    ++counter_;
    return Mix64(key_ + counter_ * kGoldenGamma);
  }

  // Uniform double in [0, 1) with 53 random bits.
  constexpr double Uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  constexpr bool Bernoulli(double probability) {
    return Uniform() < probability;
  }

  // Uniform integer in [0, bound), bound > 0 (Lemire's multiply-shift with
  // rejection).
  std::uint64_t Below(std::uint64_t bound) {
    for (;;) {
      const unsigned __int128 product =
          static_cast<unsigned __int128>((*this)()) * bound;
      const auto low = static_cast<std::uint64_t>(product);
      if (low >= bound || low >= (-bound) % bound) {
        return static_cast<std::uint64_t>(product >> 64);
      }
    }
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace advtopk

#endif  // ADVTOPK_RANDOM_H_
