// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hcr/constraint.hpp"
#include "hcr/types.hpp"

namespace hcr {

/// Supervised rows: inputs are N x k, targets N x n. `feasible` marks rows
/// whose target satisfies the region the dataset was generated against.
struct Dataset {
  MatrixXd inputs;
  MatrixXd targets;
  std::vector<std::uint8_t> feasible;

  Index size() const { return inputs.rows(); }
};

/// Recipe for the hypersphere regression task: targets y = R * W x are
/// sampled inside the cube around a ball of radius R and then projected
/// strictly inside it. Training inputs are drawn from a narrower range than
/// test inputs so that test-time predictions extrapolate.
struct SyntheticSpec {
  Index k = 128;
  Index n = 768;
  double radius = 10.0;
  Index n_train = 500;
  Index n_test = 1000;
  std::uint64_t seed = 0;
  std::pair<double, double> train_range{-0.8, 0.8};
  std::pair<double, double> test_range{-1.0, 1.0};
  std::pair<double, double> weight_range{-10.0, 10.0};
};

struct SyntheticData {
  Dataset train;
  Dataset test;
  FeasibleRegion<double> region;
};

SyntheticData gen_synthetic(const SyntheticSpec& spec);

/// One series, already windowed into (input window, output window) pairs with
/// k = n, and split 20% train / 80% test in time order.
struct WindowedSeries {
  Dataset train;
  Dataset test;
};

/// Random-walk series with bounded increments plus a mild seasonal term,
/// windowed as above. Deterministic per seed.
std::vector<WindowedSeries> gen_synthetic_timeseries(int n_series, Index n,
                                                     std::uint64_t seed);

/// Windows a raw series (e.g. loaded from CSV) the same way.
WindowedSeries windows_from_series(const std::vector<double>& values, Index n);

/// Box bounds per position (from the train-target min/max) plus the maximum
/// observed step between consecutive positions, as halfspaces: m = 4n - 2.
/// The origin is the per-position train mean, nudged inward when it is not
/// strictly interior. Throws DegenerateRegion when a position has no spread.
FeasibleRegion<double> build_timeseries_region(const Dataset& train_windows);

/// One value per row, or a named column when `column` is nonempty (first row
/// is then a header). Non-numeric cells raise ParseError with the 1-based
/// line number; an empty file is an error unless `allow_empty`.
std::vector<double> load_csv_series(const std::string& path,
                                    const std::string& column = "",
                                    bool allow_empty = false);

/// Dataset cache, little-endian binary:
///   magic "HCRD", u32 version = 1, u64 rows, u64 input cols, u64 target
///   cols, rows*k input doubles (row-major), rows*n target doubles
///   (row-major), rows feasibility bytes.
void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace hcr
