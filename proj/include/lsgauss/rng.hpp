// Copyright 2026 The lsgauss Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Counter-based uniforms. A draw is a pure function of
// (seed, purpose, replication, index), so replications can run on any thread
// in any order and a single coordinate of the seed sequence can be swapped
// without disturbing the others.
//
// Philox4x32-10: Salmon et al., "Parallel random numbers: as easy as 1, 2, 3",
// SC 2011.

#ifndef LSGAUSS_RNG_HPP
#define LSGAUSS_RNG_HPP

#include <array>
#include <cstdint>

namespace lsg {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) noexcept {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{0xD2511F53} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{0xCD9E8D57} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += 0x9E3779B9;
    key[1] += 0xBB67AE85;
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Independent stream families under one seed.
enum class StreamPurpose : std::uint32_t {
  Innovation = 0,
  InnovationCopy = 1,
  Gaussian = 2,
  Bootstrap = 3,
};

// Replications at or above this index belong to critical-value simulation.
inline constexpr std::uint64_t kCriticalValueReplicationBase = std::uint64_t{1} << 32;

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t replication, StreamPurpose purpose) noexcept;

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform(std::uint64_t index) const noexcept { return uniform_pair(index >> 1)[index & 1u]; }

  // Both uniforms of one Philox block: indices 2*block and 2*block + 1.
  std::array<double, 2> uniform_pair(std::uint64_t block) const noexcept {
    const PhiloxCounter out =
        philox4x32({static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                    static_cast<std::uint32_t>(replication_), static_cast<std::uint32_t>(replication_ >> 32)},
                   key_);
    const std::uint64_t a = out[0] | (static_cast<std::uint64_t>(out[1]) << 32);
    const std::uint64_t b = out[2] | (static_cast<std::uint64_t>(out[3]) << 32);
    // 53 random bits, shifted to the open interval (0, 1).
    return {(static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53, (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53};
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t replication() const noexcept { return replication_; }

 private:
  std::uint64_t seed_;
  std::uint64_t replication_;
  PhiloxKey key_;
};

// Sequential reader over a CounterRng starting at an arbitrary index.
class UniformStream {
 public:
  UniformStream(const CounterRng& rng, std::uint64_t start) noexcept : rng_(rng), index_(start) {
    if (index_ & 1u) pair_ = rng_.uniform_pair(index_ >> 1);
  }

  double next() noexcept {
    if ((index_ & 1u) == 0u) {
      pair_ = rng_.uniform_pair(index_ >> 1);
    }
    return pair_[index_++ & 1u];
  }

 private:
  CounterRng rng_;
  std::uint64_t index_;
  std::array<double, 2> pair_{};
};

// Standard normal quantile, Acklam's rational approximation
// (relative error below 1.2e-9 on (0, 1)).
double inverse_normal_cdf(double p) noexcept;

double normal_cdf(double x) noexcept;

}  // namespace lsg

#endif  // LSGAUSS_RNG_HPP
