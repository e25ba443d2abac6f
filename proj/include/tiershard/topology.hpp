// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace tiershard {

/// Bytes per GiB; bandwidth config files use GiB/s.
inline constexpr double kGiB = 1073741824.0;

/// Training cluster shape and measured collective bandwidths. Bandwidths are
/// stored in bytes/second. Immutable after construction; safe to share
/// across threads.
struct Topology {
  uint32_t num_nodes = 1;      // N
  uint32_t gpus_per_node = 1;  // W
  double a2a_global = 0.0;     // global all-to-all, bytes/s
  double a2a_intra = 0.0;      // intra-node all-to-all, bytes/s
  double ar_global = 0.0;      // global all-reduce, bytes/s
  double ar_cross = 0.0;       // cross-node all-reduce, bytes/s

  uint32_t total_gpus() const { return num_nodes * gpus_per_node; }  // U

  /// True when the intra-node all-to-all tier is strictly faster than the
  /// global one; the Flex strategy only has a communication breakpoint then.
  bool has_fast_intra_tier() const { return a2a_intra > a2a_global; }

  /// Throws ConfigError on non-positive counts/bandwidths or on
  /// a2a_intra < a2a_global ("degenerate topology").
  void validate() const;
};

/// Reads a topology from a JSON document with the six required keys
/// num_nodes, gpus_per_node, a2a_global_gibs, a2a_intra_gibs,
/// ar_global_gibs, ar_cross_gibs. Bandwidth values are GiB/s.
Topology load_topology(const std::filesystem::path& path);
Topology load_topology(std::istream& in);

void save_topology(const Topology& topo, const std::filesystem::path& path);
void save_topology(const Topology& topo, std::ostream& out);

}  // namespace tiershard
