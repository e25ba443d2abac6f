// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#include "tiershard/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tiershard/error.hpp"

namespace tiershard {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kRowWise:
      return "rw";
    case Strategy::kColumnWise:
      return "cw";
    case Strategy::kDataParallel:
      return "dp";
    case Strategy::kFlex:
      return "flex";
  }
  return "?";
}

void CostModelConfig::validate() const {
  if (local_batch < 1 || embedding_dim < 1 || scalar_bytes < 1) {
    throw ConfigError("cost model: B, D and scalar_bytes must be >= 1");
  }
  if (!(dp_replication_multiplier >= 1.0) ||
      !std::isfinite(dp_replication_multiplier)) {
    throw ConfigError("cost model: dp_replication_multiplier must be >= 1");
  }
  if (dynamic_pass_count < 1 || static_pass_count < 1) {
    throw ConfigError("cost model: pass counts must be >= 1");
  }
  if (!(bytes_per_id > 0.0)) {
    throw ConfigError("cost model: bytes_per_id must be positive");
  }
}

StrategyCost table_cost(Strategy strategy, double rows, double expected_length,
                        const CostModelConfig& cfg, const Topology& topo) {
  if (rows < 0.0 || expected_length < 0.0) {
    throw ValidationError("table_cost: rows and expected_length must be >= 0");
  }
  const double e = rows;
  const double l = expected_length;
  const double u = topo.total_gpus();
  const double w = topo.gpus_per_node;
  const double b = cfg.local_batch;
  const double d = cfg.embedding_dim;
  const double s = cfg.scalar_bytes;
  const double r = cfg.dp_replication_multiplier;
  const double dyn_passes = cfg.dynamic_pass_count;
  const double stat_passes = cfg.static_pass_count;
  const double row_bytes = d * s;

  StrategyCost cost;
  switch (strategy) {
    case Strategy::kRowWise:
      cost.static_memory_bytes = (e / u) * row_bytes;
      cost.rows_accessed_scalars = b * l * d;
      cost.dynamic_memory_bytes = 2.0 * b * l * row_bytes;
      cost.input_id_count = b * l;
      cost.dynamic_comm_seconds = dyn_passes * (b * l * row_bytes) / topo.a2a_global;
      if (cfg.include_id_bytes) {
        cost.dynamic_comm_seconds +=
            cost.input_id_count * cfg.bytes_per_id / topo.a2a_global;
      }
      break;
    case Strategy::kColumnWise:
      cost.static_memory_bytes = e * (d / u) * s;
      cost.rows_accessed_scalars = u * b * l * (d / u);
      cost.dynamic_memory_bytes = 2.0 * b * l * row_bytes;
      cost.input_id_count = u * b * l;
      cost.dynamic_comm_seconds = dyn_passes * (b * l * row_bytes) / topo.a2a_global;
      if (cfg.include_id_bytes) {
        cost.dynamic_comm_seconds +=
            cost.input_id_count * cfg.bytes_per_id / topo.a2a_global;
      }
      break;
    case Strategy::kDataParallel:
      cost.static_memory_bytes = r * e * row_bytes;
      cost.rows_accessed_scalars = b * l * d;
      cost.dynamic_memory_bytes = b * l * row_bytes;
      cost.static_comm_seconds = stat_passes * (e * row_bytes) / topo.ar_global;
      break;
    case Strategy::kFlex:
      cost.static_memory_bytes = r * (e / w) * row_bytes;
      cost.rows_accessed_scalars = w * b * (l / w) * d;
      cost.dynamic_memory_bytes = 2.0 * b * l * row_bytes;
      cost.input_id_count = b * l;
      cost.dynamic_comm_seconds = dyn_passes * (b * l * row_bytes) / topo.a2a_intra;
      if (cfg.include_id_bytes) {
        cost.dynamic_comm_seconds +=
            cost.input_id_count * cfg.bytes_per_id / topo.a2a_intra;
      }
      cost.static_comm_seconds =
          stat_passes * ((e / w) * row_bytes) / topo.ar_cross;
      break;
  }
  return cost;
}

namespace {

MarginalCost marginal_vs_rowwise(Strategy strategy, double p,
                                 const CostModelConfig& cfg,
                                 const Topology& topo) {
  const StrategyCost moved = table_cost(strategy, 1.0, p, cfg, topo);
  const StrategyCost kept = table_cost(Strategy::kRowWise, 1.0, p, cfg, topo);
  MarginalCost m;
  m.memory_bytes = moved.memory_bytes(cfg.count_dynamic_memory) -
                   kept.memory_bytes(cfg.count_dynamic_memory);
  m.comm_seconds = moved.comm_seconds() - kept.comm_seconds();
  return m;
}

/// Bisection root of an affine decreasing marginal over [0, hi]. Returns
/// nullopt when the function does not cross zero on the bracket.
template <typename F>
std::optional<double> bisect_root(double hi, F&& f) {
  double lo = 0.0;
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo <= 0.0) return lo;
  if (f_hi > 0.0) return std::nullopt;
  for (int i = 0; i < 200 && (hi - lo) > 1e-18 * std::max(hi, 1.0); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void cross_check(const char* what, double bisected, double closed) {
  const double tol = 1e-9 * std::max(std::abs(closed), 1e-300);
  if (std::abs(bisected - closed) > tol) {
    throw Error(std::string("breakpoints: bisection and closed form disagree for ") +
                what + " (" + std::to_string(bisected) + " vs " +
                std::to_string(closed) + ")");
  }
}

}  // namespace

MarginalCost marginal_cost_dp(double p, const CostModelConfig& cfg,
                              const Topology& topo) {
  return marginal_vs_rowwise(Strategy::kDataParallel, p, cfg, topo);
}

MarginalCost marginal_cost_flex(double p, const CostModelConfig& cfg,
                                const Topology& topo) {
  return marginal_vs_rowwise(Strategy::kFlex, p, cfg, topo);
}

Breakpoints find_breakpoints(const CostModelConfig& cfg, const Topology& topo) {
  cfg.validate();
  topo.validate();

  const double u = topo.total_gpus();
  const double w = topo.gpus_per_node;
  const double b = cfg.local_batch;
  const double d = cfg.embedding_dim;
  const double s = cfg.scalar_bytes;
  const double r = cfg.dp_replication_multiplier;
  const double row_bytes = d * s;
  const double dyn_passes = cfg.dynamic_pass_count;
  const double stat_passes = cfg.static_pass_count;
  // Per-ID latency rides the same all-to-all as the payload when enabled.
  const double id_bytes = cfg.include_id_bytes ? cfg.bytes_per_id : 0.0;

  Breakpoints bp;
  bp.flex_mem_price_bytes = (r / w - 1.0 / u) * row_bytes;

  if (cfg.count_dynamic_memory) {
    const double closed = (r - 1.0 / u) / b;
    const auto root = bisect_root(10.0 * std::max(closed, 1.0), [&](double p) {
      return marginal_cost_dp(p, cfg, topo).memory_bytes;
    });
    if (!root) {
      throw Error("breakpoints: DP memory marginal did not bracket a root");
    }
    cross_check("p_mem_dp", *root, closed);
    bp.p_mem_dp = closed;
  }

  {
    const double closed = stat_passes * row_bytes / topo.ar_global *
                          topo.a2a_global /
                          (b * (dyn_passes * row_bytes + id_bytes));
    const auto root = bisect_root(10.0 * std::max(closed, 1.0), [&](double p) {
      return marginal_cost_dp(p, cfg, topo).comm_seconds;
    });
    if (!root) {
      throw Error("breakpoints: DP comm marginal did not bracket a root");
    }
    cross_check("p_comm_dp", *root, closed);
    bp.p_comm_dp = closed;
  }

  if (topo.has_fast_intra_tier()) {
    const double closed =
        stat_passes * row_bytes /
        (w * topo.ar_cross * b * (dyn_passes * row_bytes + id_bytes) *
         (1.0 / topo.a2a_global - 1.0 / topo.a2a_intra));
    const auto root = bisect_root(10.0 * std::max(closed, 1.0), [&](double p) {
      return marginal_cost_flex(p, cfg, topo).comm_seconds;
    });
    if (!root) {
      throw Error("breakpoints: Flex comm marginal did not bracket a root");
    }
    cross_check("p_comm_flex", *root, closed);
    bp.p_comm_flex = closed;
  } else {
    // Homogeneous all-to-all tiers: the Flex comm marginal is positive for
    // every p, so there is no communication breakpoint. Represented
    // explicitly, never as a sentinel value.
    bp.p_comm_flex = std::nullopt;
  }
  return bp;
}

std::vector<RatioPoint> normalized_ratio_curve(double rows,
                                               std::span<const double> alphas,
                                               const CostModelConfig& cfg,
                                               const Topology& topo) {
  std::vector<RatioPoint> curve;
  curve.reserve(alphas.size());
  for (double alpha : alphas) {
    if (!(alpha > 0.0)) {
      throw ValidationError("ratio curve: alpha must be positive");
    }
    const double l = alpha * rows;
    const StrategyCost dp = table_cost(Strategy::kDataParallel, rows, l, cfg, topo);
    const StrategyCost rw = table_cost(Strategy::kRowWise, rows, l, cfg, topo);
    RatioPoint pt;
    pt.alpha = alpha;
    pt.mem_ratio = dp.memory_bytes(true) / rw.memory_bytes(true);
    pt.comm_ratio = dp.comm_seconds() / rw.comm_seconds();
    curve.push_back(pt);
  }
  return curve;
}

}  // namespace tiershard
