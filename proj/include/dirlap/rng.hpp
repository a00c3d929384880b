// Copyright 2026 The dirlap authors.
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

#ifndef DIRLAP_RNG_HPP_
#define DIRLAP_RNG_HPP_

#include <cstdint>
#include <random>

namespace dirlap {

/// Counter-keyed random stream. Two streams constructed from the same
/// (seed, stream_id) pair produce bit-identical draw sequences; distinct
/// stream ids give statistically independent streams suitable for parallel
/// chains and replicates.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id), engine_(init_state(seed, stream_id)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform draw on the open interval (0, 1); never returns 0 or 1.
  double uniform() {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

 private:
  // SplitMix64 over a combination of seed and stream id; used only to
  // expand the key into a full mt19937_64 state.
  static std::mt19937_64 init_state(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t x = seed ^ (stream_id * 0x9e3779b97f4a7c15ULL + 0x5851f42d4c957f2dULL);
    auto splitmix = [&x]() {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      return z ^ (z >> 31);
    };
    std::seed_seq seq{
        static_cast<std::uint32_t>(splitmix()), static_cast<std::uint32_t>(splitmix() >> 32),
        static_cast<std::uint32_t>(splitmix()), static_cast<std::uint32_t>(splitmix() >> 32),
        static_cast<std::uint32_t>(splitmix()), static_cast<std::uint32_t>(splitmix() >> 32),
        static_cast<std::uint32_t>(splitmix()), static_cast<std::uint32_t>(splitmix() >> 32)};
    return std::mt19937_64(seq);
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace dirlap

#endif  // DIRLAP_RNG_HPP_
