// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#include "tiershard/topology.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "tiershard/error.hpp"

namespace tiershard {

namespace {

double require_positive_number(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) {
    throw ConfigError(std::string("topology: missing field '") + key + "'");
  }
  const auto& v = doc.at(key);
  if (!v.is_number()) {
    throw ConfigError(std::string("topology: field '") + key +
                      "' must be a number");
  }
  const double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw ConfigError(std::string("topology: field '") + key +
                      "' must be strictly positive");
  }
  return x;
}

uint32_t require_positive_int(const nlohmann::json& doc, const char* key) {
  const double x = require_positive_number(doc, key);
  const auto i = static_cast<uint32_t>(x);
  if (static_cast<double>(i) != x) {
    throw ConfigError(std::string("topology: field '") + key +
                      "' must be a positive integer");
  }
  return i;
}

}  // namespace

void Topology::validate() const {
  if (num_nodes < 1 || gpus_per_node < 1) {
    throw ConfigError("topology: num_nodes and gpus_per_node must be >= 1");
  }
  if (!(a2a_global > 0.0) || !(a2a_intra > 0.0) || !(ar_global > 0.0) ||
      !(ar_cross > 0.0)) {
    throw ConfigError("topology: all bandwidths must be strictly positive");
  }
  if (a2a_intra < a2a_global) {
    throw ConfigError(
        "degenerate topology: a2a_intra < a2a_global (the intra-node tier "
        "must be at least as fast as the global tier)");
  }
}

Topology load_topology(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("topology: invalid JSON: ") + e.what());
  }
  Topology topo;
  topo.num_nodes = require_positive_int(doc, "num_nodes");
  topo.gpus_per_node = require_positive_int(doc, "gpus_per_node");
  topo.a2a_global = require_positive_number(doc, "a2a_global_gibs") * kGiB;
  topo.a2a_intra = require_positive_number(doc, "a2a_intra_gibs") * kGiB;
  topo.ar_global = require_positive_number(doc, "ar_global_gibs") * kGiB;
  topo.ar_cross = require_positive_number(doc, "ar_cross_gibs") * kGiB;
  topo.validate();
  return topo;
}

Topology load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("topology: cannot open '" + path.string() + "'");
  }
  return load_topology(in);
}

void save_topology(const Topology& topo, std::ostream& out) {
  nlohmann::json doc;
  doc["num_nodes"] = topo.num_nodes;
  doc["gpus_per_node"] = topo.gpus_per_node;
  doc["a2a_global_gibs"] = topo.a2a_global / kGiB;
  doc["a2a_intra_gibs"] = topo.a2a_intra / kGiB;
  doc["ar_global_gibs"] = topo.ar_global / kGiB;
  doc["ar_cross_gibs"] = topo.ar_cross / kGiB;
  out << doc.dump(2) << '\n';
}

void save_topology(const Topology& topo, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("topology: cannot write '" + path.string() + "'");
  }
  save_topology(topo, out);
}

}  // namespace tiershard
