// Copyright 2026 The tiershard Authors
// SPDX-License-Identifier: Apache-2.0

#include "tiershard/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "tiershard/error.hpp"

namespace tiershard {

const char* tier_name(Tier t) {
  switch (t) {
    case Tier::kDataParallel:
      return "dp";
    case Tier::kFlex:
      return "flex";
    case Tier::kRowWise:
      return "rw";
  }
  return "?";
}

Workload::Workload(std::shared_ptr<const RowDistribution> dist,
                   uint32_t local_batch, uint32_t num_gpus, uint64_t seed,
                   uint32_t num_iterations)
    : dist_(std::move(dist)),
      local_batch_(local_batch),
      num_gpus_(num_gpus),
      seed_(seed),
      num_iterations_(num_iterations) {
  if (!dist_ || dist_->rows().empty()) {
    throw ValidationError("workload: distribution has no materialized rows");
  }
  expected_length_ = dist_->expected_length();
  if (!(expected_length_ > 0.0)) {
    throw ValidationError("workload: total expected length must be positive");
  }
  if (local_batch_ < 1 || num_gpus_ < 1 || num_iterations_ < 1) {
    throw ValidationError("workload: batch, GPU and iteration counts must be >= 1");
  }
  std::vector<double> weights(dist_->rows().size());
  for (size_t i = 0; i < weights.size(); ++i) {
    weights[i] = dist_->rows()[i].probability;
  }
  alias_ = AliasTable(weights);
}

void Workload::materialize_iteration(uint32_t iteration,
                                     IterationBatch& out) const {
  SplitMix64 rng(derive_seed(seed_, iteration));
  const uint64_t samples = uint64_t{local_batch_} * num_gpus_;
  out.local_batch = local_batch_;
  out.num_gpus = num_gpus_;
  out.rows.clear();
  out.sample_offsets.clear();
  out.sample_offsets.reserve(samples + 1);
  out.sample_offsets.push_back(0);
  for (uint64_t s = 0; s < samples; ++s) {
    const uint32_t count = poisson(rng, expected_length_);
    for (uint32_t i = 0; i < count; ++i) {
      out.rows.push_back(alias_.sample(rng));
    }
    out.sample_offsets.push_back(out.rows.size());
  }
}

Workload sample_workload(std::shared_ptr<const RowDistribution> dist,
                         const CostModelConfig& cfg, const Topology& topo,
                         uint64_t seed, uint32_t num_iterations) {
  cfg.validate();
  topo.validate();
  return Workload(std::move(dist), cfg.local_batch, topo.total_gpus(), seed,
                  num_iterations);
}

std::vector<RowPlacement> assign_rows(const ShardingPlan& plan,
                                      const RowDistribution& dist,
                                      const Topology& topo,
                                      uint64_t hash_seed) {
  if (plan.total_rows != dist.rows().size() || plan.dp_cut > plan.flex_cut ||
      plan.flex_cut > plan.total_rows) {
    throw ValidationError("assign_rows: plan does not cover the distribution");
  }
  const uint32_t u = topo.total_gpus();
  const uint32_t w = topo.gpus_per_node;
  std::vector<RowPlacement> placements(dist.rows().size());
  for (size_t i = 0; i < dist.rows().size(); ++i) {
    const RowRecord& r = dist.rows()[i];
    const uint64_t h = row_key_hash(r.table_id, r.row_id, hash_seed);
    RowPlacement& pl = placements[i];
    if (i < plan.dp_cut) {
      pl.tier = Tier::kDataParallel;
    } else if (i < plan.flex_cut) {
      pl.tier = Tier::kFlex;
      pl.flex_slot = static_cast<uint32_t>(h % w);
    } else {
      pl.tier = Tier::kRowWise;
      pl.owner_gpu = static_cast<uint32_t>(h % u);
    }
  }
  return placements;
}

namespace {

struct GpuCounters {
  std::vector<uint64_t> send_global;
  std::vector<uint64_t> recv_global;
  std::vector<uint64_t> send_intra;
  std::vector<uint64_t> recv_intra;
  std::vector<uint64_t> dp_local;
  std::vector<uint64_t> served;

  explicit GpuCounters(uint32_t u)
      : send_global(u, 0),
        recv_global(u, 0),
        send_intra(u, 0),
        recv_intra(u, 0),
        dp_local(u, 0),
        served(u, 0) {}

  void reset() {
    auto zero = [](std::vector<uint64_t>& v) { std::fill(v.begin(), v.end(), 0); };
    zero(send_global);
    zero(recv_global);
    zero(send_intra);
    zero(recv_intra);
    zero(dp_local);
    zero(served);
  }
};

struct MinMaxMean {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

MinMaxMean min_max_mean(const std::vector<uint64_t>& v) {
  MinMaxMean m;
  m.min = static_cast<double>(*std::min_element(v.begin(), v.end()));
  m.max = static_cast<double>(*std::max_element(v.begin(), v.end()));
  uint64_t total = 0;
  for (uint64_t x : v) total += x;
  m.mean = static_cast<double>(total) / static_cast<double>(v.size());
  return m;
}

/// Per-thread scratch: counters plus an iteration-stamped (gpu, row) matrix
/// for distinct served-row counting (stamps are unique per iteration, so the
/// matrix never needs clearing).
struct WorkerScratch {
  GpuCounters counters;
  IterationBatch batch;
  std::vector<uint32_t> stamps;          // u * n entries
  std::vector<uint64_t> distinct;        // per GPU

  WorkerScratch(uint32_t u, size_t n)
      : counters(u), stamps(size_t{u} * n, 0), distinct(u, 0) {}
};

}  // namespace

SimReport simulate(const ShardingPlan& plan, const Workload& workload,
                   const CostModelConfig& cfg, const Topology& topo,
                   uint64_t hash_seed, unsigned threads) {
  cfg.validate();
  topo.validate();
  const RowDistribution& dist = workload.distribution();
  if (plan.total_rows != dist.rows().size()) {
    throw ValidationError(
        "simulate: workload rows are absent from the plan (row count mismatch)");
  }
  if (workload.local_batch() != cfg.local_batch ||
      workload.num_gpus() != topo.total_gpus()) {
    throw ValidationError("simulate: workload was sampled for a different shape");
  }

  const std::vector<RowPlacement> placements =
      assign_rows(plan, dist, topo, hash_seed);
  const uint32_t u = topo.total_gpus();
  const uint32_t w = topo.gpus_per_node;
  const size_t n = placements.size();
  const double row_bytes =
      static_cast<double>(cfg.embedding_dim) * cfg.scalar_bytes;
  const double dyn_passes = cfg.dynamic_pass_count;
  const double stat_passes = cfg.static_pass_count;
  const double id_bytes = cfg.include_id_bytes ? cfg.bytes_per_id : 0.0;

  // Static collective payloads are plan properties, constant per iteration.
  const double ar_global_bytes = static_cast<double>(plan.dp_cut) * row_bytes;
  std::vector<uint64_t> slot_rows(w, 0);
  for (size_t i = plan.dp_cut; i < plan.flex_cut; ++i) {
    ++slot_rows[placements[i].flex_slot];
  }
  uint64_t max_slot_rows = 0;
  uint64_t total_flex_rows = 0;
  for (uint64_t c : slot_rows) {
    max_slot_rows = std::max(max_slot_rows, c);
    total_flex_rows += c;
  }
  const double ar_cross_max = static_cast<double>(max_slot_rows) * row_bytes;
  const double ar_cross_mean =
      static_cast<double>(total_flex_rows) / w * row_bytes;

  const uint32_t iterations = workload.num_iterations();
  std::vector<IterationMetrics> results(iterations);

  auto run_iteration = [&](uint32_t iter, WorkerScratch& scratch) {
    workload.materialize_iteration(iter, scratch.batch);
    scratch.counters.reset();
    std::fill(scratch.distinct.begin(), scratch.distinct.end(), uint64_t{0});
    GpuCounters& c = scratch.counters;
    const uint32_t stamp = iter + 1;
    const uint64_t samples_per_gpu = workload.local_batch();

    for (uint32_t g = 0; g < u; ++g) {
      const uint64_t begin =
          scratch.batch.sample_offsets[uint64_t{g} * samples_per_gpu];
      const uint64_t end =
          scratch.batch.sample_offsets[uint64_t{g + 1} * samples_per_gpu];
      const uint32_t node_base = (g / w) * w;
      for (uint64_t idx = begin; idx < end; ++idx) {
        const uint32_t row = scratch.batch.rows[idx];
        const RowPlacement& pl = placements[row];
        uint32_t server;
        switch (pl.tier) {
          case Tier::kRowWise:
            server = pl.owner_gpu;
            ++c.send_global[server];
            ++c.recv_global[g];
            break;
          case Tier::kFlex:
            server = node_base + pl.flex_slot;
            ++c.send_intra[server];
            ++c.recv_intra[g];
            break;
          case Tier::kDataParallel:
          default:
            server = g;
            ++c.dp_local[g];
            break;
        }
        ++c.served[server];
        uint32_t& cell = scratch.stamps[size_t{server} * n + row];
        if (cell != stamp) {
          cell = stamp;
          ++scratch.distinct[server];
        }
      }
    }

    // Every sent byte is received exactly once.
    uint64_t sg = 0, rg = 0, si = 0, ri = 0;
    for (uint32_t g = 0; g < u; ++g) {
      sg += c.send_global[g];
      rg += c.recv_global[g];
      si += c.send_intra[g];
      ri += c.recv_intra[g];
    }
    if (sg != rg || si != ri) {
      throw Error("simulate: byte conservation violated");
    }

    IterationMetrics m;
    uint64_t send_g_max = 0, recv_g_max = 0, send_i_max = 0, recv_i_max = 0;
    uint64_t peak_units = 0;
    for (uint32_t g = 0; g < u; ++g) {
      send_g_max = std::max(send_g_max, c.send_global[g]);
      recv_g_max = std::max(recv_g_max, c.recv_global[g]);
      send_i_max = std::max(send_i_max, c.send_intra[g]);
      recv_i_max = std::max(recv_i_max, c.recv_intra[g]);
      const uint64_t dynamic_units = c.send_global[g] + c.recv_global[g] +
                                     c.send_intra[g] + c.recv_intra[g] +
                                     c.dp_local[g];
      peak_units = std::max(peak_units, dynamic_units);
    }
    m.global_a2a_send_max = static_cast<double>(send_g_max) * row_bytes;
    m.global_a2a_recv_max = static_cast<double>(recv_g_max) * row_bytes;
    m.global_a2a_total = static_cast<double>(sg) * row_bytes;
    m.global_a2a_bytes_mean = m.global_a2a_total / u;
    m.intra_a2a_send_max = static_cast<double>(send_i_max) * row_bytes;
    m.intra_a2a_recv_max = static_cast<double>(recv_i_max) * row_bytes;
    m.intra_a2a_total = static_cast<double>(si) * row_bytes;
    m.intra_a2a_bytes_mean = m.intra_a2a_total / u;
    m.ar_global_bytes = ar_global_bytes;
    m.ar_cross_bytes_max = ar_cross_max;
    m.ar_cross_bytes_mean = ar_cross_mean;

    const double global_payload_max =
        static_cast<double>(std::max(send_g_max, recv_g_max)) * row_bytes;
    const double intra_payload_max =
        static_cast<double>(std::max(send_i_max, recv_i_max)) * row_bytes;
    m.global_a2a_seconds = dyn_passes * global_payload_max / topo.a2a_global;
    m.intra_a2a_seconds = dyn_passes * intra_payload_max / topo.a2a_intra;
    if (id_bytes > 0.0) {
      // One ID per occurrence, distributed once before the forward lookup.
      m.global_a2a_seconds +=
          static_cast<double>(std::max(send_g_max, recv_g_max)) * id_bytes /
          topo.a2a_global;
      m.intra_a2a_seconds +=
          static_cast<double>(std::max(send_i_max, recv_i_max)) * id_bytes /
          topo.a2a_intra;
    }
    m.ar_global_seconds = stat_passes * ar_global_bytes / topo.ar_global;
    m.ar_cross_seconds = stat_passes * ar_cross_max / topo.ar_cross;
    m.total_seconds = m.global_a2a_seconds + m.intra_a2a_seconds +
                      m.ar_global_seconds + m.ar_cross_seconds;
    m.total_seconds_critical = m.global_a2a_seconds + m.ar_global_seconds;

    m.peak_dynamic_memory_bytes = static_cast<double>(peak_units) * row_bytes;

    const double d = cfg.embedding_dim;
    const MinMaxMean served = min_max_mean(c.served);
    m.rows_accessed_scalars_min = served.min * d;
    m.rows_accessed_scalars_max = served.max * d;
    m.rows_accessed_scalars_mean = served.mean * d;
    m.load_imbalance = served.mean > 0.0 ? served.max / served.mean : 1.0;

    const MinMaxMean distinct = min_max_mean(scratch.distinct);
    m.distinct_rows_min = distinct.min;
    m.distinct_rows_max = distinct.max;
    m.distinct_rows_mean = distinct.mean;
    m.distinct_row_imbalance =
        distinct.mean > 0.0 ? distinct.max / distinct.mean : 1.0;

    results[iter] = m;
  };

  const unsigned worker_count =
      std::max(1u, std::min(threads, iterations));
  if (worker_count == 1) {
    WorkerScratch scratch(u, n);
    for (uint32_t t = 0; t < iterations; ++t) run_iteration(t, scratch);
  } else {
    std::atomic<uint32_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    std::vector<std::exception_ptr> errors(worker_count);
    for (unsigned wi = 0; wi < worker_count; ++wi) {
      workers.emplace_back([&, wi] {
        try {
          WorkerScratch scratch(u, n);
          for (;;) {
            const uint32_t t = next.fetch_add(1);
            if (t >= iterations) break;
            run_iteration(t, scratch);
          }
        } catch (...) {
          errors[wi] = std::current_exception();
        }
      });
    }
    for (auto& th : workers) th.join();
    for (auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  SimReport report;
  report.seed = workload.seed();
  report.hash_seed = hash_seed;
  report.num_iterations = iterations;
  report.iterations = std::move(results);

  // Field-by-field arithmetic mean, accumulated in iteration order so the
  // result does not depend on the thread count.
  IterationMetrics& mean = report.mean;
  const double inv = 1.0 / iterations;
  for (const IterationMetrics& m : report.iterations) {
    mean.global_a2a_send_max += m.global_a2a_send_max * inv;
    mean.global_a2a_recv_max += m.global_a2a_recv_max * inv;
    mean.global_a2a_bytes_mean += m.global_a2a_bytes_mean * inv;
    mean.global_a2a_total += m.global_a2a_total * inv;
    mean.intra_a2a_send_max += m.intra_a2a_send_max * inv;
    mean.intra_a2a_recv_max += m.intra_a2a_recv_max * inv;
    mean.intra_a2a_bytes_mean += m.intra_a2a_bytes_mean * inv;
    mean.intra_a2a_total += m.intra_a2a_total * inv;
    mean.ar_global_bytes += m.ar_global_bytes * inv;
    mean.ar_cross_bytes_max += m.ar_cross_bytes_max * inv;
    mean.ar_cross_bytes_mean += m.ar_cross_bytes_mean * inv;
    mean.global_a2a_seconds += m.global_a2a_seconds * inv;
    mean.intra_a2a_seconds += m.intra_a2a_seconds * inv;
    mean.ar_global_seconds += m.ar_global_seconds * inv;
    mean.ar_cross_seconds += m.ar_cross_seconds * inv;
    mean.total_seconds += m.total_seconds * inv;
    mean.total_seconds_critical += m.total_seconds_critical * inv;
    mean.peak_dynamic_memory_bytes += m.peak_dynamic_memory_bytes * inv;
    mean.rows_accessed_scalars_min += m.rows_accessed_scalars_min * inv;
    mean.rows_accessed_scalars_max += m.rows_accessed_scalars_max * inv;
    mean.rows_accessed_scalars_mean += m.rows_accessed_scalars_mean * inv;
    mean.load_imbalance += m.load_imbalance * inv;
    mean.distinct_rows_min += m.distinct_rows_min * inv;
    mean.distinct_rows_max += m.distinct_rows_max * inv;
    mean.distinct_rows_mean += m.distinct_rows_mean * inv;
    mean.distinct_row_imbalance += m.distinct_row_imbalance * inv;
  }
  return report;
}

SimComparison compare_to_baseline(const SimReport& baseline,
                                  const SimReport& plan) {
  if (baseline.num_iterations != plan.num_iterations ||
      baseline.seed != plan.seed) {
    throw ValidationError(
        "compare_to_baseline: reports come from different workloads");
  }
  SimComparison cmp;
  cmp.baseline_global_a2a_bytes = baseline.mean.global_a2a_total;
  cmp.plan_global_a2a_bytes = plan.mean.global_a2a_total;
  cmp.global_a2a_reduction =
      cmp.baseline_global_a2a_bytes > 0.0
          ? 1.0 - cmp.plan_global_a2a_bytes / cmp.baseline_global_a2a_bytes
          : 0.0;
  cmp.baseline_total_seconds = baseline.mean.total_seconds;
  cmp.plan_total_seconds = plan.mean.total_seconds;
  cmp.plan_total_seconds_critical = plan.mean.total_seconds_critical;
  cmp.latency_improvement = cmp.plan_total_seconds > 0.0
                                ? cmp.baseline_total_seconds / cmp.plan_total_seconds
                                : 1.0;
  cmp.latency_improvement_critical =
      cmp.plan_total_seconds_critical > 0.0
          ? cmp.baseline_total_seconds / cmp.plan_total_seconds_critical
          : 1.0;
  cmp.baseline_peak_dynamic_memory_bytes =
      baseline.mean.peak_dynamic_memory_bytes;
  cmp.plan_peak_dynamic_memory_bytes = plan.mean.peak_dynamic_memory_bytes;
  return cmp;
}

namespace {

MetricDiscrepancy make_discrepancy(std::string name, double predicted,
                                   double simulated, double tolerance) {
  MetricDiscrepancy d;
  d.metric = std::move(name);
  d.predicted = predicted;
  d.simulated = simulated;
  if (predicted == 0.0 && simulated == 0.0) {
    d.relative_error = 0.0;
  } else if (predicted == 0.0) {
    d.relative_error = std::numeric_limits<double>::infinity();
  } else {
    d.relative_error = (simulated - predicted) / predicted;
  }
  d.flagged = std::abs(d.relative_error) > tolerance;
  return d;
}

}  // namespace

std::vector<MetricDiscrepancy> compare(const CostReport& predicted,
                                       const SimReport& simulated,
                                       double tolerance) {
  const IterationMetrics& m = simulated.mean;
  std::vector<MetricDiscrepancy> out;
  out.push_back(make_discrepancy("global_a2a_bytes_per_gpu",
                                 predicted.global_a2a_bytes,
                                 m.global_a2a_bytes_mean, tolerance));
  out.push_back(make_discrepancy("intra_a2a_bytes_per_gpu",
                                 predicted.intra_a2a_bytes,
                                 m.intra_a2a_bytes_mean, tolerance));
  out.push_back(make_discrepancy("ar_global_bytes_per_gpu",
                                 predicted.ar_global_bytes, m.ar_global_bytes,
                                 tolerance));
  out.push_back(make_discrepancy("ar_cross_bytes_per_gpu",
                                 predicted.ar_cross_bytes,
                                 m.ar_cross_bytes_mean, tolerance));
  out.push_back(make_discrepancy("global_a2a_seconds",
                                 predicted.global_a2a_seconds,
                                 m.global_a2a_seconds, tolerance));
  out.push_back(make_discrepancy("intra_a2a_seconds",
                                 predicted.intra_a2a_seconds,
                                 m.intra_a2a_seconds, tolerance));
  out.push_back(make_discrepancy("ar_global_seconds",
                                 predicted.ar_global_seconds,
                                 m.ar_global_seconds, tolerance));
  out.push_back(make_discrepancy("ar_cross_seconds",
                                 predicted.ar_cross_seconds,
                                 m.ar_cross_seconds, tolerance));
  out.push_back(make_discrepancy("peak_dynamic_memory_bytes",
                                 predicted.peak_dynamic_memory_bytes,
                                 m.peak_dynamic_memory_bytes, tolerance));
  out.push_back(make_discrepancy("rows_accessed_scalars",
                                 predicted.rows_accessed_scalars,
                                 m.rows_accessed_scalars_mean, tolerance));
  return out;
}

}  // namespace tiershard
