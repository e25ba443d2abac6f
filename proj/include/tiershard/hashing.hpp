// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace tiershard {

/// SplitMix64 step: golden-ratio increment followed by Stafford's mix13
/// finalizer. This is the one integer mixer used for row placement and for
/// seed derivation; it is part of the on-disk/plan contract and must not
/// change between versions.
inline constexpr uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

/// Placement hash for an embedding row. Row-wise owners take this mod U,
/// Flex intra-node slots take it mod W.
inline constexpr uint64_t row_key_hash(uint32_t table_id, uint64_t row_id,
                                       uint64_t seed) {
  return mix64(mix64(seed ^ (uint64_t{table_id} * 0x9E3779B97F4A7C15ull)) ^
               row_id);
}

/// Default placement seed. Fixed so that plans and simulations are
/// reproducible across runs without configuration.
inline constexpr uint64_t kDefaultPlacementSeed = 2;

/// Stream seed for iteration `index` of a simulation seeded with `seed`.
inline constexpr uint64_t derive_seed(uint64_t seed, uint64_t index) {
  return mix64(seed ^ mix64(index + 1));
}

}  // namespace tiershard
