// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tiershard/cost_model.hpp"
#include "tiershard/distribution.hpp"
#include "tiershard/hashing.hpp"
#include "tiershard/planner.hpp"
#include "tiershard/rng.hpp"

namespace tiershard {

/// One materialized training iteration: a global batch of U * B samples,
/// each an occurrence sequence of row indices into the canonical row order.
/// Samples are laid out GPU-major: GPU g owns samples [g*B, (g+1)*B).
struct IterationBatch {
  uint32_t local_batch = 0;
  uint32_t num_gpus = 0;
  std::vector<uint32_t> rows;             // occurrence row indices
  std::vector<uint64_t> sample_offsets;   // size U*B + 1

  uint64_t occurrences() const { return rows.size(); }
};

/// Workload descriptor. Iterations are materialized on demand from one
/// derived seed per iteration, so any subset can be produced independently
/// and in any order (thread-count independence falls out of that).
///
/// Generative model: each sample independently draws its total occurrence
/// count ~ Poisson(L) and assigns rows from the normalized probability
/// distribution, which is equivalent to per-row counts ~ Poisson(p_i).
class Workload {
 public:
  Workload(std::shared_ptr<const RowDistribution> dist, uint32_t local_batch,
           uint32_t num_gpus, uint64_t seed, uint32_t num_iterations);

  const RowDistribution& distribution() const { return *dist_; }
  std::shared_ptr<const RowDistribution> distribution_ptr() const {
    return dist_;
  }
  uint32_t local_batch() const { return local_batch_; }
  uint32_t num_gpus() const { return num_gpus_; }
  uint64_t seed() const { return seed_; }
  uint32_t num_iterations() const { return num_iterations_; }

  void materialize_iteration(uint32_t iteration, IterationBatch& out) const;

 private:
  std::shared_ptr<const RowDistribution> dist_;
  AliasTable alias_;
  double expected_length_ = 0.0;
  uint32_t local_batch_ = 0;
  uint32_t num_gpus_ = 0;
  uint64_t seed_ = 0;
  uint32_t num_iterations_ = 0;
};

Workload sample_workload(std::shared_ptr<const RowDistribution> dist,
                         const CostModelConfig& cfg, const Topology& topo,
                         uint64_t seed, uint32_t num_iterations);

enum class Tier : uint8_t { kDataParallel = 0, kFlex = 1, kRowWise = 2 };

const char* tier_name(Tier t);

/// Placement of one row under a plan. RW rows live on owner_gpu; Flex rows
/// live on intra-node slot flex_slot of every node (GPU numbering is
/// node-major: gpu = node * W + slot); DP rows live on every GPU.
struct RowPlacement {
  Tier tier = Tier::kRowWise;
  uint32_t owner_gpu = 0;
  uint32_t flex_slot = 0;
};

/// Maps every materialized row to its placement. RW owners are
/// row_key_hash(table, row, seed) mod U; Flex slots take the same hash mod W.
std::vector<RowPlacement> assign_rows(const ShardingPlan& plan,
                                      const RowDistribution& dist,
                                      const Topology& topo,
                                      uint64_t hash_seed = kDefaultPlacementSeed);

/// Realized metrics of one simulated iteration. All-to-all byte fields are
/// one direction of one (forward) pass; latencies apply the configured pass
/// multipliers to the max-over-GPUs payload.
struct IterationMetrics {
  double global_a2a_send_max = 0.0;
  double global_a2a_recv_max = 0.0;
  double global_a2a_bytes_mean = 0.0;
  double global_a2a_total = 0.0;
  double intra_a2a_send_max = 0.0;
  double intra_a2a_recv_max = 0.0;
  double intra_a2a_bytes_mean = 0.0;
  double intra_a2a_total = 0.0;
  double ar_global_bytes = 0.0;      // identical on every GPU
  double ar_cross_bytes_max = 0.0;
  double ar_cross_bytes_mean = 0.0;

  double global_a2a_seconds = 0.0;
  double intra_a2a_seconds = 0.0;
  double ar_global_seconds = 0.0;
  double ar_cross_seconds = 0.0;
  double total_seconds = 0.0;
  double total_seconds_critical = 0.0;  // without overlappable collectives

  double peak_dynamic_memory_bytes = 0.0;  // max over GPUs

  double rows_accessed_scalars_min = 0.0;
  double rows_accessed_scalars_max = 0.0;
  double rows_accessed_scalars_mean = 0.0;
  double load_imbalance = 0.0;  // max/mean of occurrences served

  double distinct_rows_min = 0.0;
  double distinct_rows_max = 0.0;
  double distinct_rows_mean = 0.0;
  double distinct_row_imbalance = 0.0;  // hash-bucket uniformity of served rows
};

struct SimReport {
  uint64_t seed = 0;
  uint64_t hash_seed = 0;
  uint32_t num_iterations = 0;
  std::vector<IterationMetrics> iterations;
  IterationMetrics mean;  // arithmetic mean over iterations, field by field
};

/// Replays the workload against the plan's placements. `threads` only
/// parallelizes independent iterations; results are byte-identical for any
/// thread count. Throws ValidationError when the workload's distribution
/// does not match the plan.
SimReport simulate(const ShardingPlan& plan, const Workload& workload,
                   const CostModelConfig& cfg, const Topology& topo,
                   uint64_t hash_seed = kDefaultPlacementSeed,
                   unsigned threads = 1);

/// Reduction/speedup of a plan simulation against the pure-RW baseline
/// simulation of the same workload (same seeds).
struct SimComparison {
  double baseline_global_a2a_bytes = 0.0;  // mean per-iteration totals
  double plan_global_a2a_bytes = 0.0;
  double global_a2a_reduction = 0.0;
  double baseline_total_seconds = 0.0;
  double plan_total_seconds = 0.0;
  double plan_total_seconds_critical = 0.0;
  double latency_improvement = 0.0;           // all collectives counted
  double latency_improvement_critical = 0.0;  // overlappable excluded
  double baseline_peak_dynamic_memory_bytes = 0.0;
  double plan_peak_dynamic_memory_bytes = 0.0;
};

SimComparison compare_to_baseline(const SimReport& baseline,
                                  const SimReport& plan);

/// Predicted-vs-observed discrepancy for one metric.
struct MetricDiscrepancy {
  std::string metric;
  double predicted = 0.0;
  double simulated = 0.0;
  double relative_error = 0.0;
  bool flagged = false;
};

/// Relative error per metric between a plan's predicted report and a
/// simulation's averaged metrics; entries beyond `tolerance` are flagged.
std::vector<MetricDiscrepancy> compare(const CostReport& predicted,
                                       const SimReport& simulated,
                                       double tolerance = 0.02);

}  // namespace tiershard
