// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tiershard/topology.hpp"

namespace tiershard {

enum class Strategy {
  kRowWise,       // contiguous row blocks over all GPUs, global all-to-all
  kColumnWise,    // split along the embedding dimension
  kDataParallel,  // full replication, gradients via global all-reduce
  kFlex,          // row-wise within a node, replicated across nodes
};

const char* strategy_name(Strategy s);

/// Knobs of the per-GPU cost model. All costs are expected values for one
/// training iteration.
struct CostModelConfig {
  uint32_t local_batch = 4096;   // B, samples per GPU
  uint32_t embedding_dim = 256;  // D, scalars per row
  uint32_t scalar_bytes = 4;     // FP32

  /// Framework overhead multiplier for replicated parameters (optimizer
  /// state, gradients, ...). TorchRec-style estimate is 6.
  double dp_replication_multiplier = 6.0;

  uint32_t dynamic_pass_count = 2;  // forward + backward
  uint32_t static_pass_count = 1;   // backward only

  /// When set, input-ID distribution traffic is charged to all-to-all
  /// latency at bytes_per_id per ID, once per iteration. Off by default:
  /// observed collective sizes report embedding payloads only.
  bool include_id_bytes = false;
  double bytes_per_id = 8.0;

  /// When set (default), dynamic memory participates in the marginal memory
  /// accounting next to static memory; clearing it makes the DP-vs-RW
  /// memory marginal a constant positive price with no breakpoint.
  bool count_dynamic_memory = true;

  void validate() const;
};

/// Per-GPU expected costs of one strategy for one table (or one row when
/// rows == 1). Fields that do not apply to a strategy are exactly zero.
struct StrategyCost {
  double static_memory_bytes = 0.0;
  double dynamic_memory_bytes = 0.0;
  double rows_accessed_scalars = 0.0;
  double input_id_count = 0.0;
  double dynamic_comm_seconds = 0.0;
  double static_comm_seconds = 0.0;

  double memory_bytes(bool with_dynamic) const {
    return static_memory_bytes + (with_dynamic ? dynamic_memory_bytes : 0.0);
  }
  double comm_seconds() const {
    return dynamic_comm_seconds + static_comm_seconds;
  }
};

/// Expected per-GPU cost of holding a table of `rows` rows with expected
/// feature length `expected_length` under `strategy`. `rows` is real-valued
/// so single-row marginals can be formed by differencing at rows == 1.
StrategyCost table_cost(Strategy strategy, double rows, double expected_length,
                        const CostModelConfig& cfg, const Topology& topo);

/// Marginal per-GPU cost of moving one row of probability p off row-wise.
/// Computed by differencing table_cost at rows = 1 so the table formulas
/// exist in exactly one place.
struct MarginalCost {
  double memory_bytes = 0.0;
  double comm_seconds = 0.0;
};

MarginalCost marginal_cost_dp(double p, const CostModelConfig& cfg,
                              const Topology& topo);
MarginalCost marginal_cost_flex(double p, const CostModelConfig& cfg,
                                const Topology& topo);

/// Row probabilities at which a strategy is memory- or communication-neutral
/// with row-wise. Absent optionals mean the marginal never crosses zero:
/// p_mem_dp when dynamic memory is excluded from the accounting, p_comm_flex
/// on topologies without a fast intra-node tier.
struct Breakpoints {
  std::optional<double> p_mem_dp;
  double p_comm_dp = 0.0;
  /// Flex-vs-RW memory marginal is probability-independent; the planner
  /// consumes it as a constant per-row price instead of a root.
  double flex_mem_price_bytes = 0.0;
  std::optional<double> p_comm_flex;
};

/// Locates the breakpoints by bisection on the differenced marginal
/// functions and cross-checks each root against its closed form; throws if
/// the two disagree beyond 1e-9 relative.
Breakpoints find_breakpoints(const CostModelConfig& cfg, const Topology& topo);

/// One point of the DP-normalized-to-RW cost curves at L = alpha * rows.
/// Ratios are total (static + dynamic) DP cost over total RW cost.
struct RatioPoint {
  double alpha = 0.0;
  double mem_ratio = 0.0;
  double comm_ratio = 0.0;
};

std::vector<RatioPoint> normalized_ratio_curve(double rows,
                                               std::span<const double> alphas,
                                               const CostModelConfig& cfg,
                                               const Topology& topo);

}  // namespace tiershard
