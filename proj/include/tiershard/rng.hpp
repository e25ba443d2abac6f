// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tiershard/hashing.hpp"

namespace tiershard {

/// SplitMix64 pseudo-random stream. Self-contained so that sampled workloads
/// are bit-reproducible regardless of standard library implementation.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    uint64_t z = state_;
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  /// Uniform double in [0, 1).
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n) via the multiply-shift range reduction.
  uint64_t next_below(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  uint64_t state_;
};

/// Poisson draw with mean `mean`. Multiplication (Knuth) inversion below
/// mean 10, Hormann's PTRD transformed-rejection sampler above; both paths
/// use only the SplitMix64 stream.
uint32_t poisson(SplitMix64& rng, double mean);

/// Walker/Vose alias table for O(1) categorical sampling over row weights.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  uint32_t sample(SplitMix64& rng) const {
    const uint32_t bucket = static_cast<uint32_t>(rng.next_below(prob_.size()));
    return rng.next_double() < prob_[bucket] ? bucket : alias_[bucket];
  }

  size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<uint32_t> alias_;
};

}  // namespace tiershard
