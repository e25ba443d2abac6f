// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

namespace tiershard {

/// One embedding row and its expected number of occurrences per data sample.
/// Probabilities above 1 are legal: a row may occur several times within one
/// sequence, and expected occurrence counts are what drive bytes moved.
struct RowRecord {
  uint32_t table_id = 0;
  uint64_t row_id = 0;
  double probability = 0.0;
};

/// Per-row value-frequency distribution for one or more merged tables.
///
/// Rows are kept in canonical order: probability descending, ties broken by
/// (table_id, row_id) ascending. The canonical order makes every downstream
/// plan byte-reproducible across runs and platforms. Zero-probability rows
/// are not materialized; they are accounted for only through table_sizes.
/// Immutable after construction.
class RowDistribution {
 public:
  RowDistribution() = default;

  /// Validates, sorts into canonical order, and caches the total expected
  /// length. Throws ValidationError on negative/non-finite probabilities,
  /// unknown table ids, row_id >= table size, or duplicate (table, row).
  RowDistribution(std::vector<RowRecord> rows,
                  std::map<uint32_t, uint64_t> table_sizes,
                  uint64_t num_samples);

  const std::vector<RowRecord>& rows() const { return rows_; }
  const std::map<uint32_t, uint64_t>& table_sizes() const {
    return table_sizes_;
  }
  uint64_t num_samples() const { return num_samples_; }

  /// Total row capacity across tables, including zero-probability rows.
  uint64_t capacity() const;

  /// Expected sequence length L: compensated sum of all row probabilities.
  double expected_length() const { return total_length_; }

  /// Expected length over rows [begin, end) of the canonical order.
  double expected_length(size_t begin, size_t end) const;

  bool is_sorted() const;

 private:
  std::vector<RowRecord> rows_;
  std::map<uint32_t, uint64_t> table_sizes_;
  uint64_t num_samples_ = 0;
  double total_length_ = 0.0;
};

/// Reads a histogram file: header "row_id,count", one record per line.
/// Counts may be fractional (synthesized histograms are). probability =
/// count / num_samples; zero-count rows are dropped from the materialized
/// rows but still count toward the table size.
RowDistribution load_histogram(const std::filesystem::path& path,
                               uint32_t table_id, uint64_t table_size,
                               uint64_t num_samples);
RowDistribution load_histogram(std::istream& in, uint32_t table_id,
                               uint64_t table_size, uint64_t num_samples);

/// Writes a single-table distribution in the histogram format. Counts are
/// probability * num_samples, printed in shortest round-trip form.
void write_histogram(const RowDistribution& dist,
                     const std::filesystem::path& path);
void write_histogram(const RowDistribution& dist, std::ostream& out);

/// num_samples attached to synthesized histograms. A power of two makes
/// count = probability * num_samples an exact double scale, so written files
/// reload to bit-identical probabilities.
inline constexpr uint64_t kSynthNumSamples = uint64_t{1} << 20;

/// Zipf-shaped distribution: rank-k row weight k^-exponent, scaled so the
/// probabilities sum to target_length. The seed only permutes row_id
/// assignment (so placement hashing is exercised); probabilities themselves
/// are deterministic.
RowDistribution synthesize_zipf(uint64_t table_size, double exponent,
                                double target_length, uint64_t seed,
                                uint32_t table_id = 0);

/// Merges distributions over pairwise-distinct tables into one canonical
/// distribution. Expected lengths add; num_samples becomes the max of the
/// inputs (provenance only).
RowDistribution merge(std::span<const RowDistribution> parts);

}  // namespace tiershard
