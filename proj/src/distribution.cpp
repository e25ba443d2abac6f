// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#include "tiershard/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_set>

#include "tiershard/error.hpp"
#include "tiershard/numeric.hpp"
#include "tiershard/rng.hpp"

namespace tiershard {

namespace {

bool canonical_less(const RowRecord& a, const RowRecord& b) {
  if (a.probability != b.probability) return a.probability > b.probability;
  if (a.table_id != b.table_id) return a.table_id < b.table_id;
  return a.row_id < b.row_id;
}

}  // namespace

RowDistribution::RowDistribution(std::vector<RowRecord> rows,
                                 std::map<uint32_t, uint64_t> table_sizes,
                                 uint64_t num_samples)
    : rows_(std::move(rows)),
      table_sizes_(std::move(table_sizes)),
      num_samples_(num_samples) {
  for (const RowRecord& r : rows_) {
    if (r.probability < 0.0 || !std::isfinite(r.probability)) {
      throw ValidationError("distribution: probabilities must be finite and >= 0");
    }
    auto it = table_sizes_.find(r.table_id);
    if (it == table_sizes_.end()) {
      throw ValidationError("distribution: row references unknown table " +
                            std::to_string(r.table_id));
    }
    if (r.row_id >= it->second) {
      throw ValidationError("distribution: row_id " + std::to_string(r.row_id) +
                            " out of range for table " +
                            std::to_string(r.table_id));
    }
  }
  std::sort(rows_.begin(), rows_.end(), canonical_less);
  for (size_t i = 1; i < rows_.size(); ++i) {
    if (rows_[i - 1].table_id == rows_[i].table_id &&
        rows_[i - 1].row_id == rows_[i].row_id) {
      throw ValidationError("distribution: duplicate row " +
                            std::to_string(rows_[i].row_id) + " in table " +
                            std::to_string(rows_[i].table_id));
    }
  }
  // Materialized row count per table must fit the declared capacity.
  std::map<uint32_t, uint64_t> present;
  for (const RowRecord& r : rows_) ++present[r.table_id];
  for (const auto& [table, count] : present) {
    if (count > table_sizes_.at(table)) {
      throw ValidationError("distribution: table " + std::to_string(table) +
                            " has more rows than its declared size");
    }
  }
  total_length_ = expected_length(0, rows_.size());
}

uint64_t RowDistribution::capacity() const {
  uint64_t total = 0;
  for (const auto& [table, size] : table_sizes_) total += size;
  return total;
}

double RowDistribution::expected_length(size_t begin, size_t end) const {
  if (begin > end || end > rows_.size()) {
    throw ValidationError("distribution: expected_length range out of bounds");
  }
  CompensatedSum sum;
  for (size_t i = begin; i < end; ++i) sum.add(rows_[i].probability);
  return sum.value();
}

bool RowDistribution::is_sorted() const {
  for (size_t i = 1; i < rows_.size(); ++i) {
    if (canonical_less(rows_[i], rows_[i - 1])) return false;
  }
  return true;
}

RowDistribution load_histogram(std::istream& in, uint32_t table_id,
                               uint64_t table_size, uint64_t num_samples) {
  if (num_samples == 0) {
    throw ConfigError("histogram: num_samples must be >= 1");
  }
  std::string line;
  if (!std::getline(in, line) || line != "row_id,count") {
    throw ConfigError("histogram: expected header 'row_id,count'");
  }
  std::vector<RowRecord> rows;
  const double inv_samples = 1.0 / static_cast<double>(num_samples);
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("histogram: malformed line " + std::to_string(line_no));
    }
    unsigned long long row_id = 0;
    double count = 0.0;
    if (!parse_u64(std::string_view(line).substr(0, comma), row_id) ||
        !parse_double(std::string_view(line).substr(comma + 1), count)) {
      throw ConfigError("histogram: malformed line " + std::to_string(line_no));
    }
    if (count < 0.0 || !std::isfinite(count)) {
      throw ConfigError("histogram: negative count on line " +
                        std::to_string(line_no));
    }
    if (row_id >= table_size) {
      throw ConfigError("histogram: row_id " + std::to_string(row_id) +
                        " >= table size " + std::to_string(table_size));
    }
    if (count == 0.0) continue;
    rows.push_back(RowRecord{table_id, row_id, count * inv_samples});
  }
  return RowDistribution(std::move(rows), {{table_id, table_size}},
                         num_samples);
}

RowDistribution load_histogram(const std::filesystem::path& path,
                               uint32_t table_id, uint64_t table_size,
                               uint64_t num_samples) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("histogram: cannot open '" + path.string() + "'");
  }
  return load_histogram(in, table_id, table_size, num_samples);
}

void write_histogram(const RowDistribution& dist, std::ostream& out) {
  if (dist.table_sizes().size() != 1) {
    throw ValidationError("histogram: only single-table distributions can be written");
  }
  const double samples = static_cast<double>(dist.num_samples());
  out << "row_id,count\n";
  for (const RowRecord& r : dist.rows()) {
    out << r.row_id << ',' << format_double(r.probability * samples) << '\n';
  }
}

void write_histogram(const RowDistribution& dist,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("histogram: cannot write '" + path.string() + "'");
  }
  write_histogram(dist, out);
}

RowDistribution synthesize_zipf(uint64_t table_size, double exponent,
                                double target_length, uint64_t seed,
                                uint32_t table_id) {
  if (table_size == 0) {
    throw ConfigError("zipf: table_size must be >= 1");
  }
  if (!(exponent >= 0.0) || !std::isfinite(exponent)) {
    throw ConfigError("zipf: exponent must be finite and >= 0");
  }
  if (!(target_length > 0.0) || !std::isfinite(target_length)) {
    throw ConfigError("zipf: target_length must be positive");
  }

  std::vector<double> weights(table_size);
  CompensatedSum total;
  for (uint64_t k = 0; k < table_size; ++k) {
    weights[k] = std::pow(static_cast<double>(k + 1), -exponent);
    total.add(weights[k]);
  }
  const double scale = target_length / total.value();

  // Random permutation of row ids; rank order (and thus the probabilities)
  // stays fixed for any seed.
  std::vector<uint64_t> perm(table_size);
  std::iota(perm.begin(), perm.end(), uint64_t{0});
  SplitMix64 rng(seed);
  for (uint64_t i = table_size - 1; i > 0; --i) {
    const uint64_t j = rng.next_below(i + 1);
    std::swap(perm[i], perm[j]);
  }

  std::vector<RowRecord> rows(table_size);
  for (uint64_t k = 0; k < table_size; ++k) {
    rows[k] = RowRecord{table_id, perm[k], weights[k] * scale};
  }
  return RowDistribution(std::move(rows), {{table_id, table_size}},
                         kSynthNumSamples);
}

RowDistribution merge(std::span<const RowDistribution> parts) {
  std::vector<RowRecord> rows;
  std::map<uint32_t, uint64_t> sizes;
  uint64_t num_samples = 0;
  for (const RowDistribution& part : parts) {
    for (const auto& [table, size] : part.table_sizes()) {
      if (!sizes.emplace(table, size).second) {
        throw ValidationError("merge: table_id collision on table " +
                              std::to_string(table));
      }
    }
    rows.insert(rows.end(), part.rows().begin(), part.rows().end());
    num_samples = std::max(num_samples, part.num_samples());
  }
  return RowDistribution(std::move(rows), std::move(sizes), num_samples);
}

}  // namespace tiershard
