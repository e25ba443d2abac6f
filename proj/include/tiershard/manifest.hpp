// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tiershard/cost_model.hpp"
#include "tiershard/distribution.hpp"
#include "tiershard/topology.hpp"

namespace tiershard {

/// One table of the workload: either a histogram file to load or a Zipf
/// synthesis recipe. Synthesized tables always carry kSynthNumSamples.
struct TableSpec {
  uint32_t table_id = 0;
  uint64_t rows = 0;  // E, including zero-probability rows

  std::optional<std::filesystem::path> histogram;  // resolved against manifest dir
  std::optional<uint64_t> num_samples;             // required with histogram

  struct Zipf {
    double exponent = 1.0;
    double target_length = 1.0;
  };
  std::optional<Zipf> zipf;
};

/// Experiment description: one JSON document instead of many flags, so runs
/// are reproducible and diffable.
struct Manifest {
  std::filesystem::path topology_path;
  CostModelConfig cost_model;
  std::vector<TableSpec> tables;
  std::string plan_goal = "2tier";  // 2tier | 3tier | frontier | budget:<bytes>
  bool budget_allow_flex = false;
  uint64_t seed = 0;
  uint64_t hash_seed;  // defaults to kDefaultPlacementSeed
  uint32_t sim_iterations = 200;
  std::filesystem::path output_dir = "out";
  std::filesystem::path base_dir;  // directory of the manifest file

  Manifest();
};

Manifest load_manifest(const std::filesystem::path& path);

/// Loads the manifest's topology file.
Topology manifest_topology(const Manifest& manifest);

/// Builds one table's distribution (loads the histogram or synthesizes).
RowDistribution build_table(const Manifest& manifest, const TableSpec& spec);

/// Builds and merges every table of the manifest.
RowDistribution build_merged_distribution(const Manifest& manifest);

/// Seed for synthesizing a given table, derived from the manifest seed.
uint64_t table_synth_seed(const Manifest& manifest, uint32_t table_id);

}  // namespace tiershard
