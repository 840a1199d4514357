// Copyright 2026 The PORA Authors
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

#pragma once

#include <cmath>
#include <cstdint>

namespace pora
{

/// splitmix64 finalizer; full-period bijection on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based generator: output i of stream (seed, stream) is a pure
/// function of (seed, stream, i), so substreams are independent of the order
/// in which agents or episodes happen to be evaluated.
class Rng
{
public:
  Rng(std::uint64_t seed, std::uint64_t stream = 0)
  : key_(mix64(seed ^ mix64(stream * 0xda3e39cb94b95bdbULL + 1)))
  {
  }

  Rng substream(std::uint64_t stream) const { return Rng(key_, stream + 1); }

  std::uint64_t next_u64() { return mix64(key_ + ++counter_); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

  /// Standard normal via Box-Muller (second variate discarded).
  double normal()
  {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPiInternal * u2);
  }

private:
  static constexpr double kPiInternal = 3.14159265358979323846;

  std::uint64_t key_;
  std::uint64_t counter_{0};
};

}  // namespace pora
