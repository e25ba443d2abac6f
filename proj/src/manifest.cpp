// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#include "tiershard/manifest.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

#include "tiershard/error.hpp"
#include "tiershard/hashing.hpp"

namespace tiershard {

namespace {

using nlohmann::json;

void parse_cost_model(const json& doc, CostModelConfig& cfg) {
  auto get = [&](const char* key, auto& field) {
    if (doc.contains(key)) {
      field = doc.at(key).get<std::remove_reference_t<decltype(field)>>();
    }
  };
  get("local_batch", cfg.local_batch);
  get("embedding_dim", cfg.embedding_dim);
  get("scalar_bytes", cfg.scalar_bytes);
  get("dp_replication_multiplier", cfg.dp_replication_multiplier);
  get("dynamic_pass_count", cfg.dynamic_pass_count);
  get("static_pass_count", cfg.static_pass_count);
  get("include_id_bytes", cfg.include_id_bytes);
  get("bytes_per_id", cfg.bytes_per_id);
  get("count_dynamic_memory", cfg.count_dynamic_memory);
  cfg.validate();
}

TableSpec parse_table(const json& doc) {
  TableSpec spec;
  if (!doc.contains("table_id") || !doc.contains("rows")) {
    throw ConfigError("manifest: each table needs table_id and rows");
  }
  spec.table_id = doc.at("table_id").get<uint32_t>();
  spec.rows = doc.at("rows").get<uint64_t>();
  if (spec.rows == 0) {
    throw ConfigError("manifest: table " + std::to_string(spec.table_id) +
                      " has zero rows");
  }
  const bool has_histogram = doc.contains("histogram");
  const bool has_zipf = doc.contains("zipf");
  if (has_histogram == has_zipf) {
    throw ConfigError("manifest: table " + std::to_string(spec.table_id) +
                      " needs exactly one of histogram/zipf");
  }
  if (has_histogram) {
    spec.histogram = doc.at("histogram").get<std::string>();
    if (!doc.contains("num_samples")) {
      throw ConfigError("manifest: histogram table " +
                        std::to_string(spec.table_id) + " needs num_samples");
    }
    spec.num_samples = doc.at("num_samples").get<uint64_t>();
  } else {
    const json& z = doc.at("zipf");
    TableSpec::Zipf zipf;
    zipf.exponent = z.at("exponent").get<double>();
    zipf.target_length = z.at("target_length").get<double>();
    spec.zipf = zipf;
  }
  return spec;
}

}  // namespace

Manifest::Manifest() : hash_seed(kDefaultPlacementSeed) {}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("manifest: cannot open '" + path.string() + "'");
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("manifest: invalid JSON: ") + e.what());
  }

  Manifest m;
  m.base_dir = path.has_parent_path() ? path.parent_path()
                                      : std::filesystem::path(".");
  if (!doc.contains("topology")) {
    throw ConfigError("manifest: missing 'topology' path");
  }
  m.topology_path = doc.at("topology").get<std::string>();
  if (doc.contains("cost_model")) {
    parse_cost_model(doc.at("cost_model"), m.cost_model);
  }
  if (doc.contains("tables")) {
    for (const json& t : doc.at("tables")) {
      m.tables.push_back(parse_table(t));
    }
  }
  std::set<uint32_t> ids;
  for (const TableSpec& t : m.tables) {
    if (!ids.insert(t.table_id).second) {
      throw ConfigError("manifest: duplicate table_id " +
                        std::to_string(t.table_id));
    }
  }
  if (doc.contains("plan")) m.plan_goal = doc.at("plan").get<std::string>();
  if (doc.contains("budget_allow_flex")) {
    m.budget_allow_flex = doc.at("budget_allow_flex").get<bool>();
  }
  if (doc.contains("seed")) m.seed = doc.at("seed").get<uint64_t>();
  if (doc.contains("hash_seed")) {
    m.hash_seed = doc.at("hash_seed").get<uint64_t>();
  }
  if (doc.contains("sim_iterations")) {
    m.sim_iterations = doc.at("sim_iterations").get<uint32_t>();
  }
  if (doc.contains("output_dir")) {
    m.output_dir = doc.at("output_dir").get<std::string>();
  }
  return m;
}

Topology manifest_topology(const Manifest& manifest) {
  std::filesystem::path p = manifest.topology_path;
  if (p.is_relative()) p = manifest.base_dir / p;
  return load_topology(p);
}

uint64_t table_synth_seed(const Manifest& manifest, uint32_t table_id) {
  return mix64(manifest.seed ^ mix64(uint64_t{table_id} + 0x7461626c65ull));
}

RowDistribution build_table(const Manifest& manifest, const TableSpec& spec) {
  if (spec.zipf) {
    return synthesize_zipf(spec.rows, spec.zipf->exponent,
                           spec.zipf->target_length,
                           table_synth_seed(manifest, spec.table_id),
                           spec.table_id);
  }
  std::filesystem::path p = *spec.histogram;
  if (p.is_relative()) p = manifest.base_dir / p;
  return load_histogram(p, spec.table_id, spec.rows, *spec.num_samples);
}

RowDistribution build_merged_distribution(const Manifest& manifest) {
  if (manifest.tables.empty()) {
    throw ConfigError("empty manifest: no tables declared");
  }
  std::vector<RowDistribution> parts;
  parts.reserve(manifest.tables.size());
  for (const TableSpec& spec : manifest.tables) {
    parts.push_back(build_table(manifest, spec));
  }
  return merge(parts);
}

}  // namespace tiershard
