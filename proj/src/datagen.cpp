// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#include "hcr/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "hcr/projection.hpp"

namespace hcr {

namespace {

MatrixXd uniform_matrix(std::mt19937_64& rng, Index rows, Index cols,
                        double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = dist(rng);
  }
  return m;
}

void annotate_feasibility(Dataset& data, const FeasibleRegion<double>& region) {
  data.feasible.assign(static_cast<std::size_t>(data.size()), 0);
  for (Index r = 0; r < data.size(); ++r) {
    data.feasible[static_cast<std::size_t>(r)] =
        region.is_feasible(data.targets.row(r).transpose()) ? 1 : 0;
  }
}

double parse_cell(const std::string& cell, std::size_t line_number) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' ||
                         end[-1] == '\r')) {
    --end;
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw ParseError("non-numeric cell '" + cell + "' at line " +
                         std::to_string(line_number),
                     line_number);
  }
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

SyntheticData gen_synthetic(const SyntheticSpec& spec) {
  if (spec.k <= 0 || spec.n <= 0 || spec.radius <= 0 || spec.n_train <= 0 ||
      spec.n_test <= 0) {
    throw std::invalid_argument("gen_synthetic: spec fields must be positive");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> weight(spec.weight_range.first,
                                                spec.weight_range.second);

  // Weight rows are rescaled to sum to one; rows whose raw sum is numerically
  // zero would blow up under the division and are redrawn.
  MatrixXd w(spec.n, spec.k);
  for (Index r = 0; r < spec.n; ++r) {
    double sum = 0.0;
    do {
      for (Index c = 0; c < spec.k; ++c) {
        w(r, c) = weight(rng);
      }
      sum = w.row(r).sum();
    } while (std::abs(sum) < 1e-9);
    w.row(r) /= sum;
  }

  MatrixXd x_train = uniform_matrix(rng, spec.n_train, spec.k,
                                    spec.train_range.first,
                                    spec.train_range.second);
  MatrixXd x_test = uniform_matrix(rng, spec.n_test, spec.k,
                                   spec.test_range.first,
                                   spec.test_range.second);

  const VectorXd center = VectorXd::Zero(spec.n);
  const double margin = FeasibleRegion<double>::default_strict_margin();
  auto make_targets = [&](const MatrixXd& x) {
    MatrixXd y = spec.radius * (x * w.transpose());
    for (Index r = 0; r < y.rows(); ++r) {
      const VectorXd projected = project_ball<double>(
          y.row(r).transpose(), center, spec.radius, margin);
      y.row(r) = projected.transpose();
    }
    return y;
  };

  std::vector<ConstraintFunction<double>> constraints;
  constraints.push_back(ConstraintFunction<double>::ball(center, spec.radius));
  FeasibleRegion<double> region(std::move(constraints), center);

  MatrixXd y_train = make_targets(x_train);
  MatrixXd y_test = make_targets(x_test);
  SyntheticData out{Dataset{std::move(x_train), std::move(y_train), {}},
                    Dataset{std::move(x_test), std::move(y_test), {}},
                    std::move(region)};
  annotate_feasibility(out.train, out.region);
  annotate_feasibility(out.test, out.region);
  return out;
}

WindowedSeries windows_from_series(const std::vector<double>& values,
                                   Index n) {
  if (n < 2) {
    throw std::invalid_argument("windows_from_series: n must be >= 2");
  }
  const Index length = static_cast<Index>(values.size());
  const Index n_windows = length - 2 * n + 1;
  if (n_windows < 2) {
    throw std::invalid_argument(
        "windows_from_series: series too short for two windows");
  }
  MatrixXd inputs(n_windows, n);
  MatrixXd targets(n_windows, n);
  for (Index t = 0; t < n_windows; ++t) {
    for (Index j = 0; j < n; ++j) {
      inputs(t, j) = values[static_cast<std::size_t>(t + j)];
      targets(t, j) = values[static_cast<std::size_t>(t + n + j)];
    }
  }
  const Index n_train = std::max<Index>(1, n_windows / 5);  // 20% train
  WindowedSeries out;
  out.train.inputs = inputs.topRows(n_train);
  out.train.targets = targets.topRows(n_train);
  out.test.inputs = inputs.bottomRows(n_windows - n_train);
  out.test.targets = targets.bottomRows(n_windows - n_train);
  return out;
}

std::vector<WindowedSeries> gen_synthetic_timeseries(int n_series, Index n,
                                                     std::uint64_t seed) {
  if (n_series <= 0) {
    throw std::invalid_argument("gen_synthetic_timeseries: n_series > 0");
  }
  if (n < 2) {
    throw std::invalid_argument("gen_synthetic_timeseries: n must be >= 2");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> level(-5.0, 5.0);
  std::uniform_real_distribution<double> increment(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 24.0);

  const Index length = 10 * n;
  constexpr double kSeasonalAmplitude = 2.0;
  constexpr double kSeasonalPeriod = 24.0;

  std::vector<WindowedSeries> out;
  out.reserve(static_cast<std::size_t>(n_series));
  for (int s = 0; s < n_series; ++s) {
    std::vector<double> values(static_cast<std::size_t>(length));
    double walk = level(rng);
    const double offset = phase(rng);
    for (Index t = 0; t < length; ++t) {
      values[static_cast<std::size_t>(t)] =
          walk + kSeasonalAmplitude *
                     std::sin(2.0 * std::numbers::pi * (t + offset) /
                              kSeasonalPeriod);
      walk += increment(rng);
    }
    out.push_back(windows_from_series(values, n));
  }
  return out;
}

FeasibleRegion<double> build_timeseries_region(const Dataset& train_windows) {
  const MatrixXd& targets = train_windows.targets;
  const Index n = targets.cols();
  if (n < 2) {
    throw std::invalid_argument("build_timeseries_region: n must be >= 2");
  }
  if (targets.rows() < 1) {
    throw std::invalid_argument("build_timeseries_region: no training rows");
  }

  const VectorXd upper = targets.colwise().maxCoeff().transpose();
  const VectorXd lower = targets.colwise().minCoeff().transpose();
  for (Index i = 0; i < n; ++i) {
    if (!(upper[i] > lower[i])) {
      throw DegenerateRegion("position " + std::to_string(i) +
                             " has no spread: bounds collapse");
    }
  }
  double max_step = 0.0;
  for (Index r = 0; r < targets.rows(); ++r) {
    for (Index i = 0; i + 1 < n; ++i) {
      max_step = std::max(max_step,
                          std::abs(targets(r, i) - targets(r, i + 1)));
    }
  }
  if (!(max_step > 0.0)) {
    throw DegenerateRegion("consecutive steps have no spread");
  }

  std::vector<ConstraintFunction<double>> constraints;
  constraints.reserve(static_cast<std::size_t>(4 * n - 2));
  for (Index i = 0; i < n; ++i) {
    VectorXd up = VectorXd::Zero(n);
    up[i] = 1.0;
    constraints.push_back(
        ConstraintFunction<double>::halfspace(up, upper[i]));
    constraints.push_back(
        ConstraintFunction<double>::halfspace(-up, -lower[i]));
  }
  for (Index i = 0; i + 1 < n; ++i) {
    VectorXd step = VectorXd::Zero(n);
    step[i] = 1.0;
    step[i + 1] = -1.0;
    constraints.push_back(ConstraintFunction<double>::halfspace(step,
                                                                max_step));
    constraints.push_back(ConstraintFunction<double>::halfspace(-step,
                                                                max_step));
  }

  VectorXd origin = targets.colwise().mean().transpose();
  bool interior = true;
  for (const auto& c : constraints) {
    if (!(c.evaluate(origin) < 0.0)) {
      interior = false;
      break;
    }
  }
  if (!interior) {
    // Project the mean onto a uniformly shrunken copy of the polytope; its
    // feasible set sits strictly inside the real one.
    const double scale = std::max({1.0, max_step, (upper - lower).maxCoeff()});
    const double inset = 1e-6 * scale;
    std::vector<ConstraintFunction<double>> shrunk;
    shrunk.reserve(constraints.size());
    for (const auto& c : constraints) {
      const auto& h = c.as_halfspace();
      shrunk.push_back(ConstraintFunction<double>::halfspace(
          h.normal, h.offset - inset * h.normal.norm()));
    }
    try {
      origin = project_polytope<double>(origin, shrunk);
    } catch (const NotConverged&) {
      throw DegenerateRegion(
          "no strictly interior origin: the shrunken polytope projection did "
          "not converge");
    }
  }
  try {
    return FeasibleRegion<double>(std::move(constraints), std::move(origin));
  } catch (const InvalidRegion& e) {
    throw DegenerateRegion(std::string("region has no usable interior: ") +
                           e.what());
  }
}

std::vector<double> load_csv_series(const std::string& path,
                                    const std::string& column,
                                    bool allow_empty) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open series file: " + path);

  std::vector<double> values;
  std::string line;
  std::size_t line_number = 0;
  Index column_index = -1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (!column.empty() && column_index < 0) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == column) {
          column_index = static_cast<Index>(i);
          break;
        }
      }
      if (column_index < 0) {
        throw ParseError("column '" + column + "' not found in header",
                         line_number);
      }
      continue;  // header row consumed
    }
    if (column.empty()) {
      if (cells.size() != 1) {
        throw ParseError("expected a single value at line " +
                             std::to_string(line_number),
                         line_number);
      }
      values.push_back(parse_cell(cells[0], line_number));
    } else {
      if (static_cast<std::size_t>(column_index) >= cells.size()) {
        throw ParseError("row at line " + std::to_string(line_number) +
                             " is missing column '" + column + "'",
                         line_number);
      }
      values.push_back(
          parse_cell(cells[static_cast<std::size_t>(column_index)],
                     line_number));
    }
  }
  if (values.empty() && !allow_empty) {
    throw ParseError("series file has no data rows: " + path);
  }
  return values;
}

namespace {

constexpr char kDatasetMagic[4] = {'H', 'C', 'R', 'D'};
constexpr std::uint32_t kDatasetVersion = 1;

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in, const std::string& what) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ParseError("dataset cache truncated reading " + what);
  return value;
}

}  // namespace

void save_dataset(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset cache: " + path);
  out.write(kDatasetMagic, sizeof(kDatasetMagic));
  write_raw(out, kDatasetVersion);
  write_raw(out, static_cast<std::uint64_t>(data.inputs.rows()));
  write_raw(out, static_cast<std::uint64_t>(data.inputs.cols()));
  write_raw(out, static_cast<std::uint64_t>(data.targets.cols()));
  for (Index r = 0; r < data.inputs.rows(); ++r) {
    for (Index c = 0; c < data.inputs.cols(); ++c) {
      write_raw(out, data.inputs(r, c));
    }
  }
  for (Index r = 0; r < data.targets.rows(); ++r) {
    for (Index c = 0; c < data.targets.cols(); ++c) {
      write_raw(out, data.targets(r, c));
    }
  }
  for (Index r = 0; r < data.inputs.rows(); ++r) {
    const std::uint8_t flag =
        r < static_cast<Index>(data.feasible.size())
            ? data.feasible[static_cast<std::size_t>(r)]
            : std::uint8_t{0};
    write_raw(out, flag);
  }
  if (!out) throw IoError("failed writing dataset cache: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset cache: " + path);
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kDatasetMagic, sizeof(magic)) != 0) {
    throw ParseError("dataset cache has a bad magic header");
  }
  const auto version = read_raw<std::uint32_t>(in, "version");
  if (version != kDatasetVersion) {
    throw ParseError("dataset cache version " + std::to_string(version) +
                     " is not supported");
  }
  const auto rows = read_raw<std::uint64_t>(in, "row count");
  const auto k = read_raw<std::uint64_t>(in, "input width");
  const auto n = read_raw<std::uint64_t>(in, "target width");
  Dataset data;
  data.inputs.resize(static_cast<Index>(rows), static_cast<Index>(k));
  data.targets.resize(static_cast<Index>(rows), static_cast<Index>(n));
  for (Index r = 0; r < data.inputs.rows(); ++r) {
    for (Index c = 0; c < data.inputs.cols(); ++c) {
      data.inputs(r, c) = read_raw<double>(in, "inputs");
    }
  }
  for (Index r = 0; r < data.targets.rows(); ++r) {
    for (Index c = 0; c < data.targets.cols(); ++c) {
      data.targets(r, c) = read_raw<double>(in, "targets");
    }
  }
  data.feasible.resize(static_cast<std::size_t>(rows));
  for (auto& flag : data.feasible) {
    flag = read_raw<std::uint8_t>(in, "feasibility flags");
  }
  return data;
}

}  // namespace hcr
