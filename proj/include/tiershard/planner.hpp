// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tiershard/cost_model.hpp"
#include "tiershard/distribution.hpp"

namespace tiershard {

/// Cumulative marginal costs of moving the hottest k rows off row-wise.
/// Point k holds the per-GPU memory and communication deltas versus an
/// all-RW sharding after rows [0, k) of the canonical order have moved.
struct FrontierPoint {
  uint64_t row_index = 0;
  double cum_memory_bytes = 0.0;
  double cum_comm_seconds = 0.0;
};

class Frontier {
 public:
  Frontier(Strategy strategy, std::vector<double> memory,
           std::vector<double> comm)
      : strategy_(strategy), memory_(std::move(memory)), comm_(std::move(comm)) {}

  Strategy strategy() const { return strategy_; }
  size_t size() const { return memory_.size(); }  // row count + 1
  double memory_at(size_t k) const { return memory_[k]; }
  double comm_at(size_t k) const { return comm_[k]; }
  FrontierPoint point(size_t k) const { return {k, memory_[k], comm_[k]}; }

 private:
  Strategy strategy_;
  std::vector<double> memory_;
  std::vector<double> comm_;
};

/// Builds the cumulative marginal-cost curve for moving rows to `strategy`
/// (kDataParallel or kFlex) in canonical order. Compensated accumulation;
/// one point per row plus the origin.
Frontier build_frontier(const RowDistribution& dist, const CostModelConfig& cfg,
                        const Topology& topo, Strategy strategy);

/// Landmarks of the DP-vs-RW frontier:
///   a: index with maximum memory savings (argmin, first on ties)
///   b: largest index whose cumulative memory is still <= 0 (memory-neutral)
///   c: largest index whose row probability >= p_comm_dp (comm-maximal)
///   d: final index (whole table replicated)
struct FrontierLandmarks {
  size_t a = 0;
  size_t b = 0;
  size_t c = 0;
  size_t d = 0;
};

FrontierLandmarks find_points(const Frontier& frontier,
                              const RowDistribution& dist,
                              const CostModelConfig& cfg, const Topology& topo);

struct TierSummary {
  uint64_t row_count = 0;  // RW additionally counts zero-probability capacity
  double expected_length = 0.0;
  double coverage = 0.0;  // expected_length / total expected length
};

/// Predicted per-GPU, per-iteration costs of a tiered plan next to the pure
/// row-wise baseline. All-to-all byte fields are one direction of one pass;
/// latencies apply the pass multipliers.
struct CostReport {
  TierSummary dp, flex, rw;

  double static_memory_bytes = 0.0;
  double baseline_static_memory_bytes = 0.0;
  double peak_dynamic_memory_bytes = 0.0;
  double baseline_peak_dynamic_memory_bytes = 0.0;
  double rows_accessed_scalars = 0.0;
  double input_id_count = 0.0;
  double baseline_input_id_count = 0.0;

  double global_a2a_bytes = 0.0;
  double intra_a2a_bytes = 0.0;
  double ar_global_bytes = 0.0;
  double ar_cross_bytes = 0.0;
  double global_a2a_seconds = 0.0;
  double intra_a2a_seconds = 0.0;
  double ar_global_seconds = 0.0;
  double ar_cross_seconds = 0.0;

  double baseline_global_a2a_bytes = 0.0;
  double baseline_global_a2a_seconds = 0.0;

  /// Fraction of expected global all-to-all traffic redirected or avoided;
  /// equals DP coverage + Flex coverage in this model.
  double global_a2a_reduction = 0.0;

  double total_seconds = 0.0;
  /// Excludes the overlappable collectives (intra-node all-to-all and
  /// cross-node all-reduce).
  double total_seconds_critical = 0.0;
  double baseline_total_seconds = 0.0;
  double latency_improvement = 0.0;
  double latency_improvement_critical = 0.0;
};

/// Tier assignment as cut indices into the canonical row order:
/// rows [0, dp_cut) replicate DP, rows [dp_cut, flex_cut) shard Flex,
/// the rest (including non-materialized zero-probability rows) shard RW.
struct ShardingPlan {
  uint64_t dp_cut = 0;
  uint64_t flex_cut = 0;
  uint64_t total_rows = 0;  // materialized rows the cuts index into
  std::string goal;
  std::vector<std::string> warnings;
  CostReport predicted;
  /// Cumulative marginal coordinates actually reached (budget plans).
  std::optional<double> achieved_memory_bytes;
  std::optional<double> achieved_comm_seconds;
};

CostReport predict_cost(const RowDistribution& dist, uint64_t dp_cut,
                        uint64_t flex_cut, const CostModelConfig& cfg,
                        const Topology& topo);

/// Memory-neutral DP/RW plan: dp_cut at the frontier's x-intercept (point b).
ShardingPlan plan_2tier(const RowDistribution& dist, const CostModelConfig& cfg,
                        const Topology& topo);

/// DP until the memory breakpoint (point a), then Flex while the memory
/// savings last and rows stay above the Flex comm breakpoint, RW after.
/// Degrades to plan_2tier with a warning on homogeneous topologies.
ShardingPlan plan_3tier(const RowDistribution& dist, const CostModelConfig& cfg,
                        const Topology& topo);

/// Maximal traversal of the frontier whose cumulative marginal memory stays
/// within `memory_budget_bytes` (negative budgets demand net savings), capped
/// at the communication-maximal point. With allow_flex, rows past the DP
/// memory breakpoint may take the cheaper of DP/Flex per row; this extension
/// is flagged in the plan goal. Throws ValidationError("infeasible budget")
/// when even the maximum-savings traversal cannot meet a negative budget.
ShardingPlan plan_for_budget(const RowDistribution& dist,
                             const CostModelConfig& cfg, const Topology& topo,
                             double memory_budget_bytes, bool allow_flex);

struct CoverageReport {
  TierSummary dp, flex, rw;
};

CoverageReport coverage_report(const ShardingPlan& plan,
                               const RowDistribution& dist);

}  // namespace tiershard
