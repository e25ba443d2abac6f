// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tiershard/cost_model.hpp"
#include "tiershard/distribution.hpp"
#include "tiershard/manifest.hpp"
#include "tiershard/planner.hpp"
#include "tiershard/simulator.hpp"
#include "tiershard/topology.hpp"

namespace tiershard {

nlohmann::json to_json(const Topology& topo);
nlohmann::json to_json(const CostModelConfig& cfg);
nlohmann::json to_json(const Breakpoints& bp);
nlohmann::json to_json(const TierSummary& tier);
nlohmann::json to_json(const CostReport& report);
nlohmann::json to_json(const IterationMetrics& m);
nlohmann::json to_json(const SimComparison& cmp);
nlohmann::json to_json(const std::vector<MetricDiscrepancy>& diffs);

/// Everything a plan file records besides the cuts: enough to rebuild and
/// verify the distribution it was computed for.
struct PlanDocument {
  std::string tool_version;
  ShardingPlan plan;
  Topology topology;
  CostModelConfig cost_model;

  struct TableEcho {
    uint32_t table_id = 0;
    uint64_t rows = 0;
    uint64_t num_samples = 0;
    double expected_length = 0.0;
  };
  std::vector<TableEcho> tables;
  uint64_t capacity = 0;
  double total_expected_length = 0.0;
  uint64_t seed = 0;
  uint64_t hash_seed = 0;

  std::optional<FrontierLandmarks> landmarks;
  std::vector<FrontierPoint> landmark_points;  // a, b, c, d coordinates
};

/// Serializes a plan document. The DP and Flex tier membership is written as
/// explicit (table_id, row_id) lists; the RW remainder is implicit.
nlohmann::json plan_document_json(const PlanDocument& doc,
                                  const RowDistribution& dist);

void save_plan_document(const PlanDocument& doc, const RowDistribution& dist,
                        const std::filesystem::path& path);
PlanDocument load_plan_document(const std::filesystem::path& path);

/// Writes the frontier as CSV, downsampled to at most 10k points while
/// always keeping the landmark indices.
void write_frontier_csv(const Frontier& frontier, const RowDistribution& dist,
                        const FrontierLandmarks& landmarks,
                        const std::filesystem::path& path);

void write_coverage_csv(const CoverageReport& coverage,
                        const std::filesystem::path& path);
std::string format_coverage_table(const CoverageReport& coverage);

/// Flat per-row tier assignment (table_id,row_id,tier), canonical order.
void write_assignment_csv(const ShardingPlan& plan, const RowDistribution& dist,
                          const std::filesystem::path& path);

/// One row per iteration per metric.
void write_sim_csv(const SimReport& report, const std::filesystem::path& path);

nlohmann::json sim_report_json(const SimReport& baseline, const SimReport& plan,
                               const SimComparison& comparison);

}  // namespace tiershard
