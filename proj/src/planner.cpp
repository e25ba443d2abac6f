// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#include "tiershard/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tiershard/error.hpp"
#include "tiershard/numeric.hpp"

namespace tiershard {

Frontier build_frontier(const RowDistribution& dist, const CostModelConfig& cfg,
                        const Topology& topo, Strategy strategy) {
  if (strategy != Strategy::kDataParallel && strategy != Strategy::kFlex) {
    throw ValidationError("frontier: strategy must be DP or Flex");
  }
  if (dist.rows().empty()) {
    throw ValidationError("frontier: distribution has no materialized rows");
  }
  if (!dist.is_sorted()) {
    throw ValidationError("frontier: distribution is not in canonical order");
  }
  const size_t n = dist.rows().size();
  std::vector<double> memory(n + 1, 0.0);
  std::vector<double> comm(n + 1, 0.0);
  CompensatedSum mem_sum;
  CompensatedSum comm_sum;
  for (size_t k = 0; k < n; ++k) {
    const double p = dist.rows()[k].probability;
    const MarginalCost m = strategy == Strategy::kDataParallel
                               ? marginal_cost_dp(p, cfg, topo)
                               : marginal_cost_flex(p, cfg, topo);
    mem_sum.add(m.memory_bytes);
    comm_sum.add(m.comm_seconds);
    memory[k + 1] = mem_sum.value();
    comm[k + 1] = comm_sum.value();
  }
  return Frontier(strategy, std::move(memory), std::move(comm));
}

FrontierLandmarks find_points(const Frontier& frontier,
                              const RowDistribution& dist,
                              const CostModelConfig& cfg,
                              const Topology& topo) {
  if (frontier.strategy() != Strategy::kDataParallel) {
    throw ValidationError("find_points: frontier must be built for DP");
  }
  const size_t n = frontier.size() - 1;
  FrontierLandmarks pts;
  pts.d = n;

  double best = frontier.memory_at(0);
  for (size_t k = 1; k <= n; ++k) {
    if (frontier.memory_at(k) < best) {
      best = frontier.memory_at(k);
      pts.a = k;
    }
  }
  for (size_t k = 0; k <= n; ++k) {
    if (frontier.memory_at(k) <= 0.0) pts.b = k;
  }

  const Breakpoints bp = find_breakpoints(cfg, topo);
  size_t c = 0;
  while (c < n && dist.rows()[c].probability >= bp.p_comm_dp) ++c;
  pts.c = c;
  return pts;
}

namespace {

TierSummary summarize_tier(const RowDistribution& dist, size_t begin,
                           size_t end, double total_length,
                           uint64_t extra_capacity) {
  TierSummary t;
  t.row_count = (end - begin) + extra_capacity;
  t.expected_length = dist.expected_length(begin, end);
  t.coverage = total_length > 0.0 ? t.expected_length / total_length : 0.0;
  return t;
}

}  // namespace

CostReport predict_cost(const RowDistribution& dist, uint64_t dp_cut,
                        uint64_t flex_cut, const CostModelConfig& cfg,
                        const Topology& topo) {
  const size_t n = dist.rows().size();
  if (dp_cut > flex_cut || flex_cut > n) {
    throw ValidationError("predict_cost: invalid cuts");
  }
  const double total_length = dist.expected_length();
  const uint64_t capacity = dist.capacity();
  const uint64_t rw_extra = capacity - n;  // zero-probability rows stay RW

  CostReport rep;
  rep.dp = summarize_tier(dist, 0, dp_cut, total_length, 0);
  rep.flex = summarize_tier(dist, dp_cut, flex_cut, total_length, 0);
  rep.rw = summarize_tier(dist, flex_cut, n, total_length, rw_extra);
  if (total_length == 0.0) rep.rw.coverage = 1.0;

  const double e_dp = static_cast<double>(dp_cut);
  const double e_flex = static_cast<double>(flex_cut - dp_cut);
  const double e_rw = static_cast<double>(capacity - flex_cut);

  const StrategyCost dp_cost =
      table_cost(Strategy::kDataParallel, e_dp, rep.dp.expected_length, cfg, topo);
  const StrategyCost flex_cost =
      table_cost(Strategy::kFlex, e_flex, rep.flex.expected_length, cfg, topo);
  const StrategyCost rw_cost =
      table_cost(Strategy::kRowWise, e_rw, rep.rw.expected_length, cfg, topo);
  const StrategyCost base_cost = table_cost(
      Strategy::kRowWise, static_cast<double>(capacity), total_length, cfg, topo);

  rep.static_memory_bytes = dp_cost.static_memory_bytes +
                            flex_cost.static_memory_bytes +
                            rw_cost.static_memory_bytes;
  rep.baseline_static_memory_bytes = base_cost.static_memory_bytes;
  rep.peak_dynamic_memory_bytes = dp_cost.dynamic_memory_bytes +
                                  flex_cost.dynamic_memory_bytes +
                                  rw_cost.dynamic_memory_bytes;
  rep.baseline_peak_dynamic_memory_bytes = base_cost.dynamic_memory_bytes;
  rep.rows_accessed_scalars = dp_cost.rows_accessed_scalars +
                              flex_cost.rows_accessed_scalars +
                              rw_cost.rows_accessed_scalars;
  rep.input_id_count = flex_cost.input_id_count + rw_cost.input_id_count;
  rep.baseline_input_id_count = base_cost.input_id_count;

  const double b = cfg.local_batch;
  const double row_bytes =
      static_cast<double>(cfg.embedding_dim) * cfg.scalar_bytes;
  rep.global_a2a_bytes = b * rep.rw.expected_length * row_bytes;
  rep.intra_a2a_bytes = b * rep.flex.expected_length * row_bytes;
  rep.ar_global_bytes = e_dp * row_bytes;
  rep.ar_cross_bytes = (e_flex / topo.gpus_per_node) * row_bytes;
  rep.baseline_global_a2a_bytes = b * total_length * row_bytes;

  rep.global_a2a_seconds = rw_cost.dynamic_comm_seconds;
  rep.intra_a2a_seconds = flex_cost.dynamic_comm_seconds;
  rep.ar_global_seconds = dp_cost.static_comm_seconds;
  rep.ar_cross_seconds = flex_cost.static_comm_seconds;
  rep.baseline_global_a2a_seconds = base_cost.dynamic_comm_seconds;

  rep.global_a2a_reduction =
      rep.baseline_global_a2a_bytes > 0.0
          ? 1.0 - rep.global_a2a_bytes / rep.baseline_global_a2a_bytes
          : 0.0;

  rep.total_seconds = rep.global_a2a_seconds + rep.intra_a2a_seconds +
                      rep.ar_global_seconds + rep.ar_cross_seconds;
  rep.total_seconds_critical = rep.global_a2a_seconds + rep.ar_global_seconds;
  rep.baseline_total_seconds = rep.baseline_global_a2a_seconds;
  rep.latency_improvement = rep.total_seconds > 0.0
                                ? rep.baseline_total_seconds / rep.total_seconds
                                : 1.0;
  rep.latency_improvement_critical =
      rep.total_seconds_critical > 0.0
          ? rep.baseline_total_seconds / rep.total_seconds_critical
          : 1.0;
  return rep;
}

namespace {

ShardingPlan make_plan(const RowDistribution& dist, const CostModelConfig& cfg,
                       const Topology& topo, uint64_t dp_cut, uint64_t flex_cut,
                       std::string goal) {
  ShardingPlan plan;
  plan.dp_cut = dp_cut;
  plan.flex_cut = flex_cut;
  plan.total_rows = dist.rows().size();
  plan.goal = std::move(goal);
  plan.predicted = predict_cost(dist, dp_cut, flex_cut, cfg, topo);
  if (dp_cut == 0 && flex_cut == 0) {
    plan.warnings.push_back(
        "plan degenerates to pure row-wise sharding (no rows clear the breakpoints)");
  }
  return plan;
}

}  // namespace

ShardingPlan plan_2tier(const RowDistribution& dist, const CostModelConfig& cfg,
                        const Topology& topo) {
  cfg.validate();
  topo.validate();
  if (dist.rows().empty()) {
    ShardingPlan plan = make_plan(dist, cfg, topo, 0, 0, "2tier");
    plan.warnings.push_back("distribution has no materialized rows");
    return plan;
  }
  const Frontier frontier = build_frontier(dist, cfg, topo, Strategy::kDataParallel);
  const FrontierLandmarks pts = find_points(frontier, dist, cfg, topo);
  ShardingPlan plan = make_plan(dist, cfg, topo, pts.b, pts.b, "2tier");
  if (pts.b > pts.c) {
    plan.warnings.push_back(
        "memory-neutral cut extends past the communication breakpoint; "
        "rows beyond it cost communication");
  }
  plan.achieved_memory_bytes = frontier.memory_at(pts.b);
  plan.achieved_comm_seconds = frontier.comm_at(pts.b);
  return plan;
}

ShardingPlan plan_3tier(const RowDistribution& dist, const CostModelConfig& cfg,
                        const Topology& topo) {
  cfg.validate();
  topo.validate();
  if (!topo.has_fast_intra_tier()) {
    ShardingPlan plan = plan_2tier(dist, cfg, topo);
    plan.goal = "3tier";
    plan.warnings.push_back(
        "homogeneous all-to-all tiers: no Flex communication breakpoint; "
        "degraded to the 2-tier plan");
    return plan;
  }
  if (dist.rows().empty()) {
    ShardingPlan plan = make_plan(dist, cfg, topo, 0, 0, "3tier");
    plan.warnings.push_back("distribution has no materialized rows");
    return plan;
  }

  const Frontier frontier = build_frontier(dist, cfg, topo, Strategy::kDataParallel);
  const FrontierLandmarks pts = find_points(frontier, dist, cfg, topo);
  const Breakpoints bp = find_breakpoints(cfg, topo);
  const double flex_price = bp.flex_mem_price_bytes;
  const double p_comm_flex = *bp.p_comm_flex;

  const uint64_t dp_cut = pts.a;
  CompensatedSum cum_mem;
  cum_mem.add(frontier.memory_at(dp_cut));
  CompensatedSum cum_comm;
  cum_comm.add(frontier.comm_at(dp_cut));

  const size_t n = dist.rows().size();
  uint64_t flex_cut = dp_cut;
  while (flex_cut < n) {
    const double p = dist.rows()[flex_cut].probability;
    if (p < p_comm_flex) break;
    if (cum_mem.value() + flex_price > 0.0) break;
    cum_mem.add(flex_price);
    cum_comm.add(marginal_cost_flex(p, cfg, topo).comm_seconds);
    ++flex_cut;
  }

  ShardingPlan plan = make_plan(dist, cfg, topo, dp_cut, flex_cut, "3tier");
  if (flex_price <= 0.0) {
    plan.warnings.push_back(
        "flex memory price is non-positive; the flex tier is bounded only by "
        "the communication breakpoint");
  }
  plan.achieved_memory_bytes = cum_mem.value();
  plan.achieved_comm_seconds = cum_comm.value();
  return plan;
}

ShardingPlan plan_for_budget(const RowDistribution& dist,
                             const CostModelConfig& cfg, const Topology& topo,
                             double memory_budget_bytes, bool allow_flex) {
  cfg.validate();
  topo.validate();
  if (std::isnan(memory_budget_bytes)) {
    throw ValidationError("budget plan: budget must not be NaN");
  }
  if (dist.rows().empty()) {
    if (memory_budget_bytes < 0.0) {
      throw ValidationError("infeasible budget: no rows to traverse");
    }
    ShardingPlan plan = make_plan(dist, cfg, topo, 0, 0,
                                  allow_flex ? "budget+flex" : "budget");
    plan.achieved_memory_bytes = 0.0;
    plan.achieved_comm_seconds = 0.0;
    return plan;
  }

  const size_t n = dist.rows().size();

  if (!allow_flex) {
    const Frontier frontier =
        build_frontier(dist, cfg, topo, Strategy::kDataParallel);
    const FrontierLandmarks pts = find_points(frontier, dist, cfg, topo);
    // Largest traversal within budget; rows past point c only cost
    // communication, so the search stops there.
    std::optional<size_t> cut;
    for (size_t k = 0; k <= pts.c; ++k) {
      if (frontier.memory_at(k) <= memory_budget_bytes) cut = k;
    }
    if (!cut) {
      throw ValidationError(
          "infeasible budget: even the maximum-savings traversal exceeds it");
    }
    ShardingPlan plan = make_plan(dist, cfg, topo, *cut, *cut, "budget");
    plan.achieved_memory_bytes = frontier.memory_at(*cut);
    plan.achieved_comm_seconds = frontier.comm_at(*cut);
    return plan;
  }

  // Flex-enabled budget traversal. Each row takes the feasible strategy with
  // the lower (negative) marginal communication; ties prefer DP. Because both
  // marginals are affine in p and DP's memory price only grows as p drops,
  // the resulting assignment is a DP prefix followed by a Flex run.
  const Breakpoints bp = find_breakpoints(cfg, topo);
  const double flex_price = bp.flex_mem_price_bytes;
  CompensatedSum cum_mem;
  CompensatedSum cum_comm;
  uint64_t dp_cut = 0;
  uint64_t flex_cut = 0;
  bool in_flex = false;
  bool any_feasible_seen = false;
  for (size_t k = 0; k < n; ++k) {
    const double p = dist.rows()[k].probability;
    const MarginalCost dp_m = marginal_cost_dp(p, cfg, topo);
    const bool dp_ok = cum_mem.value() + dp_m.memory_bytes <= memory_budget_bytes &&
                       dp_m.comm_seconds < 0.0;
    const MarginalCost flex_m = marginal_cost_flex(p, cfg, topo);
    const bool flex_ok =
        topo.has_fast_intra_tier() &&
        cum_mem.value() + flex_price <= memory_budget_bytes &&
        flex_m.comm_seconds < 0.0;
    if (!dp_ok && !flex_ok) break;
    any_feasible_seen = true;
    const bool pick_dp = dp_ok && (!flex_ok || dp_m.comm_seconds <= flex_m.comm_seconds);
    if (pick_dp && in_flex) break;  // keep the DP-prefix/Flex-run structure
    if (pick_dp) {
      cum_mem.add(dp_m.memory_bytes);
      cum_comm.add(dp_m.comm_seconds);
      dp_cut = k + 1;
      flex_cut = k + 1;
    } else {
      in_flex = true;
      cum_mem.add(flex_price);
      cum_comm.add(flex_m.comm_seconds);
      flex_cut = k + 1;
    }
  }
  if (memory_budget_bytes < 0.0 && !any_feasible_seen) {
    throw ValidationError(
        "infeasible budget: even the maximum-savings traversal exceeds it");
  }
  ShardingPlan plan = make_plan(dist, cfg, topo, dp_cut, flex_cut, "budget+flex");
  plan.warnings.push_back(
      "budgeted flex assignment is an extension beyond the memory-neutral designs");
  plan.achieved_memory_bytes = cum_mem.value();
  plan.achieved_comm_seconds = cum_comm.value();
  return plan;
}

CoverageReport coverage_report(const ShardingPlan& plan,
                               const RowDistribution& dist) {
  if (plan.total_rows != dist.rows().size() || plan.flex_cut > plan.total_rows ||
      plan.dp_cut > plan.flex_cut) {
    throw ValidationError("coverage: plan does not match distribution");
  }
  const double total_length = dist.expected_length();
  const size_t n = dist.rows().size();
  CoverageReport rep;
  rep.dp = summarize_tier(dist, 0, plan.dp_cut, total_length, 0);
  rep.flex = summarize_tier(dist, plan.dp_cut, plan.flex_cut, total_length, 0);
  rep.rw = summarize_tier(dist, plan.flex_cut, n, total_length,
                          dist.capacity() - n);
  if (total_length == 0.0) rep.rw.coverage = 1.0;
  return rep;
}

}  // namespace tiershard
