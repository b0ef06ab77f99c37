//
// Copyright 2026 The OraclePriv Authors
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
//

#ifndef ORACLEPRIV_RNG_H_
#define ORACLEPRIV_RNG_H_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace oraclepriv {

// SplitMix64 mixing step.  Also used to fold seed words into stream keys.
constexpr uint64_t SplitMix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a over a short tag.  Role tags keep substreams for different purposes
// (noise, data, pseudo-labels, ...) disjoint even at equal indices.
constexpr uint64_t RoleTag(std::string_view tag) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Deterministic counter-less PRNG stream (SplitMix64).  A stream is fully
// identified by its 64-bit key; substreams are derived by hashing the key
// with index words, so any (sweep, trial, role) cell is reproducible in
// isolation and independent of scheduling.
class Rng {
 public:
  explicit Rng(uint64_t key) : state_(SplitMix64(key ^ 0x8000000000000000ULL)), key_(key) {}

  uint64_t key() const { return key_; }

  uint64_t NextU64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1).
  double Uniform() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1); never returns an endpoint.
  double UniformOpen() {
    return (static_cast<double>(NextU64() >> 12) + 0.5) * 0x1.0p-52;
  }

  // Uniform integer in [lo, hi] inclusive.
  int64_t UniformInt(int64_t lo, int64_t hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int64_t>(NextU64() % span);
  }

  // Standard normal via Box-Muller.  The second value of each pair is
  // discarded so the draw count per call is fixed.
  double Normal() {
    double u1 = UniformOpen();
    double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // Unit-scale Laplace (density e^{-|x|}/2, variance 2) by inverse CDF.
  double Laplace() {
    double v = UniformOpen() - 0.5;
    double s = v < 0 ? -1.0 : 1.0;
    return -s * std::log(1.0 - 2.0 * std::fabs(v));
  }

  // Substream keyed by index words.  Derivation uses only the parent key,
  // never the mutable state, so derivation order is irrelevant.
  Rng Substream(std::initializer_list<uint64_t> words) const {
    uint64_t k = key_;
    for (uint64_t w : words) k = SplitMix64(k ^ SplitMix64(w));
    return Rng(k);
  }
  Rng Substream(uint64_t a) const { return Substream({a}); }
  Rng Substream(uint64_t a, uint64_t b) const { return Substream({a, b}); }
  Rng Substream(uint64_t a, uint64_t b, uint64_t c) const {
    return Substream({a, b, c});
  }

 private:
  uint64_t state_;
  uint64_t key_;
};

// Stream key for a (master seed, sweep index, trial index, role) cell.
inline uint64_t StreamKey(uint64_t master_seed, uint64_t sweep_index,
                          uint64_t trial_index, std::string_view role) {
  uint64_t k = SplitMix64(master_seed);
  k = SplitMix64(k ^ SplitMix64(sweep_index));
  k = SplitMix64(k ^ SplitMix64(trial_index));
  k = SplitMix64(k ^ RoleTag(role));
  return k;
}

}  // namespace oraclepriv

#endif  // ORACLEPRIV_RNG_H_
