// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#include "tiershard/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tiershard/error.hpp"
#include "tiershard/numeric.hpp"
#include "tiershard/version.hpp"

namespace tiershard {

using nlohmann::json;

json to_json(const Topology& topo) {
  return json{{"num_nodes", topo.num_nodes},
              {"gpus_per_node", topo.gpus_per_node},
              {"a2a_global_gibs", topo.a2a_global / kGiB},
              {"a2a_intra_gibs", topo.a2a_intra / kGiB},
              {"ar_global_gibs", topo.ar_global / kGiB},
              {"ar_cross_gibs", topo.ar_cross / kGiB}};
}

json to_json(const CostModelConfig& cfg) {
  return json{{"local_batch", cfg.local_batch},
              {"embedding_dim", cfg.embedding_dim},
              {"scalar_bytes", cfg.scalar_bytes},
              {"dp_replication_multiplier", cfg.dp_replication_multiplier},
              {"dynamic_pass_count", cfg.dynamic_pass_count},
              {"static_pass_count", cfg.static_pass_count},
              {"include_id_bytes", cfg.include_id_bytes},
              {"bytes_per_id", cfg.bytes_per_id},
              {"count_dynamic_memory", cfg.count_dynamic_memory}};
}

json to_json(const Breakpoints& bp) {
  json doc;
  doc["p_mem_dp"] = bp.p_mem_dp ? json(*bp.p_mem_dp) : json();
  doc["p_comm_dp"] = bp.p_comm_dp;
  doc["flex_mem_price_bytes"] = bp.flex_mem_price_bytes;
  doc["p_comm_flex"] = bp.p_comm_flex ? json(*bp.p_comm_flex) : json();
  return doc;
}

json to_json(const TierSummary& tier) {
  return json{{"rows", tier.row_count},
              {"expected_length", tier.expected_length},
              {"coverage", tier.coverage}};
}

json to_json(const CostReport& r) {
  json doc;
  doc["tiers"] = {{"dp", to_json(r.dp)}, {"flex", to_json(r.flex)}, {"rw", to_json(r.rw)}};
  doc["static_memory_bytes"] = r.static_memory_bytes;
  doc["baseline_static_memory_bytes"] = r.baseline_static_memory_bytes;
  doc["peak_dynamic_memory_bytes"] = r.peak_dynamic_memory_bytes;
  doc["baseline_peak_dynamic_memory_bytes"] = r.baseline_peak_dynamic_memory_bytes;
  doc["rows_accessed_scalars"] = r.rows_accessed_scalars;
  doc["input_id_count"] = r.input_id_count;
  doc["baseline_input_id_count"] = r.baseline_input_id_count;
  doc["global_a2a_bytes"] = r.global_a2a_bytes;
  doc["intra_a2a_bytes"] = r.intra_a2a_bytes;
  doc["ar_global_bytes"] = r.ar_global_bytes;
  doc["ar_cross_bytes"] = r.ar_cross_bytes;
  doc["global_a2a_seconds"] = r.global_a2a_seconds;
  doc["intra_a2a_seconds"] = r.intra_a2a_seconds;
  doc["ar_global_seconds"] = r.ar_global_seconds;
  doc["ar_cross_seconds"] = r.ar_cross_seconds;
  doc["baseline_global_a2a_bytes"] = r.baseline_global_a2a_bytes;
  doc["baseline_global_a2a_seconds"] = r.baseline_global_a2a_seconds;
  doc["global_a2a_reduction"] = r.global_a2a_reduction;
  doc["total_seconds"] = r.total_seconds;
  doc["total_seconds_critical"] = r.total_seconds_critical;
  doc["baseline_total_seconds"] = r.baseline_total_seconds;
  doc["latency_improvement"] = r.latency_improvement;
  doc["latency_improvement_critical"] = r.latency_improvement_critical;
  return doc;
}

namespace {

CostReport cost_report_from_json(const json& doc) {
  CostReport r;
  auto tier = [&](const char* key) {
    TierSummary t;
    const json& j = doc.at("tiers").at(key);
    t.row_count = j.at("rows").get<uint64_t>();
    t.expected_length = j.at("expected_length").get<double>();
    t.coverage = j.at("coverage").get<double>();
    return t;
  };
  r.dp = tier("dp");
  r.flex = tier("flex");
  r.rw = tier("rw");
  r.static_memory_bytes = doc.at("static_memory_bytes").get<double>();
  r.baseline_static_memory_bytes = doc.at("baseline_static_memory_bytes").get<double>();
  r.peak_dynamic_memory_bytes = doc.at("peak_dynamic_memory_bytes").get<double>();
  r.baseline_peak_dynamic_memory_bytes =
      doc.at("baseline_peak_dynamic_memory_bytes").get<double>();
  r.rows_accessed_scalars = doc.at("rows_accessed_scalars").get<double>();
  r.input_id_count = doc.at("input_id_count").get<double>();
  r.baseline_input_id_count = doc.at("baseline_input_id_count").get<double>();
  r.global_a2a_bytes = doc.at("global_a2a_bytes").get<double>();
  r.intra_a2a_bytes = doc.at("intra_a2a_bytes").get<double>();
  r.ar_global_bytes = doc.at("ar_global_bytes").get<double>();
  r.ar_cross_bytes = doc.at("ar_cross_bytes").get<double>();
  r.global_a2a_seconds = doc.at("global_a2a_seconds").get<double>();
  r.intra_a2a_seconds = doc.at("intra_a2a_seconds").get<double>();
  r.ar_global_seconds = doc.at("ar_global_seconds").get<double>();
  r.ar_cross_seconds = doc.at("ar_cross_seconds").get<double>();
  r.baseline_global_a2a_bytes = doc.at("baseline_global_a2a_bytes").get<double>();
  r.baseline_global_a2a_seconds = doc.at("baseline_global_a2a_seconds").get<double>();
  r.global_a2a_reduction = doc.at("global_a2a_reduction").get<double>();
  r.total_seconds = doc.at("total_seconds").get<double>();
  r.total_seconds_critical = doc.at("total_seconds_critical").get<double>();
  r.baseline_total_seconds = doc.at("baseline_total_seconds").get<double>();
  r.latency_improvement = doc.at("latency_improvement").get<double>();
  r.latency_improvement_critical = doc.at("latency_improvement_critical").get<double>();
  return r;
}

Topology topology_from_json(const json& doc) {
  Topology topo;
  topo.num_nodes = doc.at("num_nodes").get<uint32_t>();
  topo.gpus_per_node = doc.at("gpus_per_node").get<uint32_t>();
  topo.a2a_global = doc.at("a2a_global_gibs").get<double>() * kGiB;
  topo.a2a_intra = doc.at("a2a_intra_gibs").get<double>() * kGiB;
  topo.ar_global = doc.at("ar_global_gibs").get<double>() * kGiB;
  topo.ar_cross = doc.at("ar_cross_gibs").get<double>() * kGiB;
  topo.validate();
  return topo;
}

CostModelConfig cost_model_from_json(const json& doc) {
  CostModelConfig cfg;
  cfg.local_batch = doc.at("local_batch").get<uint32_t>();
  cfg.embedding_dim = doc.at("embedding_dim").get<uint32_t>();
  cfg.scalar_bytes = doc.at("scalar_bytes").get<uint32_t>();
  cfg.dp_replication_multiplier = doc.at("dp_replication_multiplier").get<double>();
  cfg.dynamic_pass_count = doc.at("dynamic_pass_count").get<uint32_t>();
  cfg.static_pass_count = doc.at("static_pass_count").get<uint32_t>();
  cfg.include_id_bytes = doc.at("include_id_bytes").get<bool>();
  cfg.bytes_per_id = doc.at("bytes_per_id").get<double>();
  cfg.count_dynamic_memory = doc.at("count_dynamic_memory").get<bool>();
  cfg.validate();
  return cfg;
}

}  // namespace

json to_json(const IterationMetrics& m) {
  return json{{"global_a2a_send_max", m.global_a2a_send_max},
              {"global_a2a_recv_max", m.global_a2a_recv_max},
              {"global_a2a_bytes_mean", m.global_a2a_bytes_mean},
              {"global_a2a_total", m.global_a2a_total},
              {"intra_a2a_send_max", m.intra_a2a_send_max},
              {"intra_a2a_recv_max", m.intra_a2a_recv_max},
              {"intra_a2a_bytes_mean", m.intra_a2a_bytes_mean},
              {"intra_a2a_total", m.intra_a2a_total},
              {"ar_global_bytes", m.ar_global_bytes},
              {"ar_cross_bytes_max", m.ar_cross_bytes_max},
              {"ar_cross_bytes_mean", m.ar_cross_bytes_mean},
              {"global_a2a_seconds", m.global_a2a_seconds},
              {"intra_a2a_seconds", m.intra_a2a_seconds},
              {"ar_global_seconds", m.ar_global_seconds},
              {"ar_cross_seconds", m.ar_cross_seconds},
              {"total_seconds", m.total_seconds},
              {"total_seconds_critical", m.total_seconds_critical},
              {"peak_dynamic_memory_bytes", m.peak_dynamic_memory_bytes},
              {"rows_accessed_scalars_min", m.rows_accessed_scalars_min},
              {"rows_accessed_scalars_max", m.rows_accessed_scalars_max},
              {"rows_accessed_scalars_mean", m.rows_accessed_scalars_mean},
              {"load_imbalance", m.load_imbalance},
              {"distinct_rows_min", m.distinct_rows_min},
              {"distinct_rows_max", m.distinct_rows_max},
              {"distinct_rows_mean", m.distinct_rows_mean},
              {"distinct_row_imbalance", m.distinct_row_imbalance}};
}

json to_json(const SimComparison& cmp) {
  return json{{"baseline_global_a2a_bytes", cmp.baseline_global_a2a_bytes},
              {"plan_global_a2a_bytes", cmp.plan_global_a2a_bytes},
              {"global_a2a_reduction", cmp.global_a2a_reduction},
              {"baseline_total_seconds", cmp.baseline_total_seconds},
              {"plan_total_seconds", cmp.plan_total_seconds},
              {"plan_total_seconds_critical", cmp.plan_total_seconds_critical},
              {"latency_improvement", cmp.latency_improvement},
              {"latency_improvement_critical", cmp.latency_improvement_critical},
              {"baseline_peak_dynamic_memory_bytes",
               cmp.baseline_peak_dynamic_memory_bytes},
              {"plan_peak_dynamic_memory_bytes",
               cmp.plan_peak_dynamic_memory_bytes}};
}

json to_json(const std::vector<MetricDiscrepancy>& diffs) {
  json arr = json::array();
  for (const MetricDiscrepancy& d : diffs) {
    arr.push_back(json{{"metric", d.metric},
                       {"predicted", d.predicted},
                       {"simulated", d.simulated},
                       {"relative_error", d.relative_error},
                       {"flagged", d.flagged}});
  }
  return arr;
}

json plan_document_json(const PlanDocument& doc, const RowDistribution& dist) {
  json out;
  out["tool_version"] = doc.tool_version;
  out["goal"] = doc.plan.goal;
  out["warnings"] = doc.plan.warnings;
  out["topology"] = to_json(doc.topology);
  out["cost_model"] = to_json(doc.cost_model);

  json tables = json::array();
  for (const auto& t : doc.tables) {
    tables.push_back(json{{"table_id", t.table_id},
                          {"rows", t.rows},
                          {"num_samples", t.num_samples},
                          {"expected_length", t.expected_length}});
  }
  out["tables"] = tables;
  out["capacity"] = doc.capacity;
  out["total_expected_length"] = doc.total_expected_length;
  out["total_rows"] = doc.plan.total_rows;
  out["seed"] = doc.seed;
  out["hash_seed"] = doc.hash_seed;

  out["dp_cut"] = doc.plan.dp_cut;
  out["flex_cut"] = doc.plan.flex_cut;

  auto tier_rows = [&](uint64_t begin, uint64_t end) {
    json rows = json::array();
    for (uint64_t i = begin; i < end; ++i) {
      rows.push_back(json::array(
          {dist.rows()[i].table_id, dist.rows()[i].row_id}));
    }
    return rows;
  };
  out["dp_rows"] = tier_rows(0, doc.plan.dp_cut);
  out["flex_rows"] = tier_rows(doc.plan.dp_cut, doc.plan.flex_cut);

  out["predicted"] = to_json(doc.plan.predicted);
  if (doc.plan.achieved_memory_bytes) {
    out["achieved"] = json{{"memory_bytes", *doc.plan.achieved_memory_bytes},
                           {"comm_seconds", *doc.plan.achieved_comm_seconds}};
  } else {
    out["achieved"] = json();
  }
  if (doc.landmarks) {
    auto point = [&](size_t which) {
      const FrontierPoint& p = doc.landmark_points[which];
      return json{{"index", p.row_index},
                  {"memory_bytes", p.cum_memory_bytes},
                  {"comm_seconds", p.cum_comm_seconds}};
    };
    out["points"] = json{{"a", point(0)}, {"b", point(1)}, {"c", point(2)}, {"d", point(3)}};
  } else {
    out["points"] = json();
  }
  return out;
}

void save_plan_document(const PlanDocument& doc, const RowDistribution& dist,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("plan: cannot write '" + path.string() + "'");
  }
  out << plan_document_json(doc, dist).dump(2) << '\n';
}

PlanDocument load_plan_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("plan: cannot open '" + path.string() + "'");
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("plan: invalid JSON: ") + e.what());
  }

  PlanDocument out;
  out.tool_version = doc.at("tool_version").get<std::string>();
  out.topology = topology_from_json(doc.at("topology"));
  out.cost_model = cost_model_from_json(doc.at("cost_model"));
  for (const json& t : doc.at("tables")) {
    PlanDocument::TableEcho echo;
    echo.table_id = t.at("table_id").get<uint32_t>();
    echo.rows = t.at("rows").get<uint64_t>();
    echo.num_samples = t.at("num_samples").get<uint64_t>();
    echo.expected_length = t.at("expected_length").get<double>();
    out.tables.push_back(echo);
  }
  out.capacity = doc.at("capacity").get<uint64_t>();
  out.total_expected_length = doc.at("total_expected_length").get<double>();
  out.seed = doc.at("seed").get<uint64_t>();
  out.hash_seed = doc.at("hash_seed").get<uint64_t>();

  out.plan.goal = doc.at("goal").get<std::string>();
  out.plan.warnings = doc.at("warnings").get<std::vector<std::string>>();
  out.plan.dp_cut = doc.at("dp_cut").get<uint64_t>();
  out.plan.flex_cut = doc.at("flex_cut").get<uint64_t>();
  out.plan.total_rows = doc.at("total_rows").get<uint64_t>();
  out.plan.predicted = cost_report_from_json(doc.at("predicted"));
  if (!doc.at("achieved").is_null()) {
    out.plan.achieved_memory_bytes =
        doc.at("achieved").at("memory_bytes").get<double>();
    out.plan.achieved_comm_seconds =
        doc.at("achieved").at("comm_seconds").get<double>();
  }
  return out;
}

void write_frontier_csv(const Frontier& frontier, const RowDistribution& dist,
                        const FrontierLandmarks& landmarks,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("frontier: cannot write '" + path.string() + "'");
  }
  const size_t n = frontier.size() - 1;
  const size_t max_points = 10000;
  const size_t stride = n / max_points + 1;

  std::vector<size_t> indices;
  for (size_t k = 0; k <= n; k += stride) indices.push_back(k);
  for (size_t k : {landmarks.a, landmarks.b, landmarks.c, landmarks.d, n}) {
    indices.push_back(k);
  }
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());

  out << "row_index,last_row_probability,cum_marginal_memory_bytes,cum_marginal_comm_seconds\n";
  for (size_t k : indices) {
    out << k << ',';
    if (k > 0) out << format_double(dist.rows()[k - 1].probability);
    out << ',' << format_double(frontier.memory_at(k)) << ','
        << format_double(frontier.comm_at(k)) << '\n';
  }
}

std::string format_coverage_table(const CoverageReport& coverage) {
  std::ostringstream os;
  os << "tier    rows          expected_length  coverage\n";
  auto line = [&](const char* name, const TierSummary& t) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-7s %-13llu %-16.6g %7.3f%%\n", name,
                  static_cast<unsigned long long>(t.row_count),
                  t.expected_length, t.coverage * 100.0);
    os << buf;
  };
  line("dp", coverage.dp);
  line("flex", coverage.flex);
  line("rw", coverage.rw);
  return os.str();
}

void write_coverage_csv(const CoverageReport& coverage,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("coverage: cannot write '" + path.string() + "'");
  }
  out << "tier,rows,expected_length,coverage\n";
  auto line = [&](const char* name, const TierSummary& t) {
    out << name << ',' << t.row_count << ',' << format_double(t.expected_length)
        << ',' << format_double(t.coverage) << '\n';
  };
  line("dp", coverage.dp);
  line("flex", coverage.flex);
  line("rw", coverage.rw);
}

void write_assignment_csv(const ShardingPlan& plan, const RowDistribution& dist,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("assignment: cannot write '" + path.string() + "'");
  }
  out << "table_id,row_id,tier\n";
  for (size_t i = 0; i < dist.rows().size(); ++i) {
    const Tier tier = i < plan.dp_cut    ? Tier::kDataParallel
                      : i < plan.flex_cut ? Tier::kFlex
                                          : Tier::kRowWise;
    out << dist.rows()[i].table_id << ',' << dist.rows()[i].row_id << ','
        << tier_name(tier) << '\n';
  }
}

void write_sim_csv(const SimReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("sim report: cannot write '" + path.string() + "'");
  }
  out << "iteration,metric,value\n";
  for (uint32_t i = 0; i < report.iterations.size(); ++i) {
    const json m = to_json(report.iterations[i]);
    for (const auto& [key, value] : m.items()) {
      out << i << ',' << key << ',' << format_double(value.get<double>())
          << '\n';
    }
  }
}

json sim_report_json(const SimReport& baseline, const SimReport& plan,
                     const SimComparison& comparison) {
  json doc;
  doc["seed"] = plan.seed;
  doc["hash_seed"] = plan.hash_seed;
  doc["num_iterations"] = plan.num_iterations;
  doc["baseline_mean"] = to_json(baseline.mean);
  doc["plan_mean"] = to_json(plan.mean);
  doc["comparison"] = to_json(comparison);
  return doc;
}

}  // namespace tiershard
