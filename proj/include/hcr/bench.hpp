// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hcr/datagen.hpp"
#include "hcr/learner.hpp"

#include "json.hpp"

namespace hcr {

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Metrics of one (seed or series) run of one method on its test set.
struct RunMetrics {
  double mse = 0.0;
  double inside_ratio = 0.0;        // within the region's feasibility tol
  double inside_ratio_exact = 0.0;  // zero-tolerance membership
  double avg_time_s = 0.0;
  double max_time_s = 0.0;
};

struct MethodReport {
  std::string name;
  bool timing_na = false;  // raw-head variants have no post-processing step
  Stat mse;
  Stat inside_ratio;
  Stat inside_ratio_exact;
  Stat avg_time_s;
  Stat max_time_s;
  std::vector<RunMetrics> runs;
};

struct BenchmarkReport {
  std::string task;
  int n_runs = 0;
  /// Mean candidate-set size of the restricted frontier search over the
  /// hyperspherical variant's test predictions.
  double restricted_set_mean = 0.0;
  std::vector<std::string> warnings;
  nlohmann::ordered_json config;
  std::vector<MethodReport> methods;
};

/// Trains and evaluates all four variants per seed on the hypersphere task
/// and aggregates mean/stddev across seeds. Runs fan out over worker threads
/// (capped by the HCR_THREADS environment variable); each run is
/// single-threaded and deterministic given its seed.
BenchmarkReport run_synthetic_bench(const SyntheticSpec& spec,
                                    const std::vector<std::uint64_t>& seeds,
                                    const TrainConfig& cfg);

/// Same per series: builds the box-plus-max-step polytope from the training
/// windows, trains all variants, and reports relative MSE (MSE divided by
/// the variance of the test targets). Series whose region is degenerate are
/// skipped with a warning.
BenchmarkReport run_timeseries_bench(const std::vector<WindowedSeries>& series,
                                     const TrainConfig& cfg);

struct RoundtripReport {
  int n_points = 0;
  double max_error = 0.0;      // after a full there-and-back conversion
  int infeasible_count = 0;    // reconstructed points outside the region
};

/// Samples (direction, radius) pairs uniformly, reconstructs the Euclidean
/// point, converts it back and forth, and reports the worst deviation. Every
/// hundredth sample uses radius zero.
RoundtripReport run_roundtrip_check(const std::string& region_path,
                                    int n_points, std::uint64_t seed);

nlohmann::ordered_json report_to_json(const BenchmarkReport& report);
std::string report_to_csv(const BenchmarkReport& report);
void print_report(const BenchmarkReport& report, std::ostream& out);

/// Worker cap for fanning runs out: min(n_runs, hardware, HCR_THREADS).
int worker_count(int n_runs);

}  // namespace hcr
