// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#include "hcr/datagen.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

using hcr::Dataset;
using hcr::Index;
using hcr::SyntheticSpec;
using hcr::VectorXd;

namespace {

std::filesystem::path write_temp(const char* name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << text;
  return path;
}

SyntheticSpec small_spec() {
  SyntheticSpec spec;
  spec.k = 16;
  spec.n = 8;
  spec.radius = 10.0;
  spec.n_train = 60;
  spec.n_test = 80;
  spec.seed = 3;
  return spec;
}

}  // namespace

TEST_CASE("synthetic generation produces the requested shapes") {
  SyntheticSpec spec;  // full-scale defaults
  const auto data = hcr::gen_synthetic(spec);
  CHECK(data.train.inputs.rows() == 500);
  CHECK(data.train.inputs.cols() == 128);
  CHECK(data.train.targets.rows() == 500);
  CHECK(data.train.targets.cols() == 768);
  CHECK(data.test.inputs.rows() == 1000);
  CHECK(data.test.inputs.cols() == 128);
  CHECK(data.test.targets.rows() == 1000);
  CHECK(data.test.targets.cols() == 768);
  CHECK(data.region.constraint_count() == 1);
}

TEST_CASE("every generated target is feasible") {
  const auto data = hcr::gen_synthetic(small_spec());
  for (Index r = 0; r < data.train.size(); ++r) {
    CHECK(data.region.is_feasible(data.train.targets.row(r).transpose()));
    CHECK(data.train.feasible[static_cast<std::size_t>(r)] == 1);
  }
  for (Index r = 0; r < data.test.size(); ++r) {
    CHECK(data.region.is_feasible(data.test.targets.row(r).transpose()));
  }
}

TEST_CASE("targets are strictly inside the ball") {
  const auto data = hcr::gen_synthetic(small_spec());
  for (Index r = 0; r < data.test.size(); ++r) {
    CHECK(data.test.targets.row(r).norm() < data.region.constraint(0)
                                                .as_ball()
                                                .radius);
  }
}

TEST_CASE("training inputs span a narrower range than test inputs") {
  const auto data = hcr::gen_synthetic(small_spec());
  CHECK(data.train.inputs.cwiseAbs().maxCoeff() <= 0.8);
  CHECK(data.test.inputs.cwiseAbs().maxCoeff() <= 1.0);
  CHECK(data.test.inputs.cwiseAbs().maxCoeff() > 0.8);
}

TEST_CASE("generation is deterministic per seed") {
  const auto a = hcr::gen_synthetic(small_spec());
  const auto b = hcr::gen_synthetic(small_spec());
  CHECK(a.train.inputs == b.train.inputs);
  CHECK(a.train.targets == b.train.targets);
  CHECK(a.test.targets == b.test.targets);
}

TEST_CASE("a 48-step window yields 190 constraints") {
  const auto series = hcr::gen_synthetic_timeseries(1, 48, 42);
  REQUIRE(series.size() == 1);
  CHECK(series[0].train.inputs.cols() == 48);
  CHECK(series[0].train.targets.cols() == 48);
  const auto region = hcr::build_timeseries_region(series[0].train);
  CHECK(region.constraint_count() == 190);
  CHECK(region.constraint_count() == 4 * 48 - 2);
}

TEST_CASE("training windows are feasible in their own region") {
  const auto series = hcr::gen_synthetic_timeseries(2, 24, 7);
  for (const auto& s : series) {
    const auto region = hcr::build_timeseries_region(s.train);
    for (Index r = 0; r < s.train.size(); ++r) {
      CHECK(region.is_feasible(s.train.targets.row(r).transpose()));
    }
    CHECK(region.is_feasible(region.origin()));
  }
}

TEST_CASE("a constant series has a degenerate region") {
  Dataset train;
  train.inputs = hcr::MatrixXd::Zero(4, 6);
  train.targets = hcr::MatrixXd::Constant(4, 6, 3.25);
  CHECK_THROWS_AS(hcr::build_timeseries_region(train),
                  hcr::DegenerateRegion);
}

TEST_CASE("random-walk increments bound the largest step") {
  const auto series = hcr::gen_synthetic_timeseries(3, 48, 11);
  for (const auto& s : series) {
    double max_step = 0.0;
    for (Index r = 0; r < s.train.size(); ++r) {
      for (Index i = 0; i + 1 < s.train.targets.cols(); ++i) {
        max_step = std::max(max_step,
                            std::abs(s.train.targets(r, i) -
                                     s.train.targets(r, i + 1)));
      }
    }
    CHECK(max_step <= 2.0);
  }
}

TEST_CASE("timeseries generation is deterministic per seed") {
  const auto a = hcr::gen_synthetic_timeseries(2, 16, 5);
  const auto b = hcr::gen_synthetic_timeseries(2, 16, 5);
  CHECK(a[0].train.targets == b[0].train.targets);
  CHECK(a[1].test.targets == b[1].test.targets);
}

TEST_CASE("windowing splits twenty percent for training") {
  std::vector<double> values(100);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<double>(i);
  }
  const auto windows = hcr::windows_from_series(values, 10);
  // 100 - 20 + 1 = 81 windows, 16 of them train.
  CHECK(windows.train.size() == 16);
  CHECK(windows.test.size() == 65);
  CHECK(windows.train.inputs(0, 0) == 0.0);
  CHECK(windows.train.targets(0, 0) == 10.0);
}

TEST_CASE("csv series load") {
  const auto path = write_temp("hcr_series_ok.csv", "1.0\n2.0\n");
  CHECK(hcr::load_csv_series(path.string()) ==
        std::vector<double>{1.0, 2.0});
  std::filesystem::remove(path);
}

TEST_CASE("csv parse errors carry the line number") {
  const auto path = write_temp("hcr_series_bad.csv", "1.0\n2.0\nabc\n");
  try {
    hcr::load_csv_series(path.string());
    FAIL("expected ParseError");
  } catch (const hcr::ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::filesystem::remove(path);
}

TEST_CASE("empty csv files error unless allowed") {
  const auto path = write_temp("hcr_series_empty.csv", "");
  CHECK_THROWS_AS(hcr::load_csv_series(path.string()), hcr::ParseError);
  CHECK(hcr::load_csv_series(path.string(), "", true).empty());
  std::filesystem::remove(path);
}

TEST_CASE("csv named-column mode") {
  const auto path = write_temp("hcr_series_col.csv",
                               "id,value\n1,10.5\n2,11.5\n");
  CHECK(hcr::load_csv_series(path.string(), "value") ==
        std::vector<double>{10.5, 11.5});
  CHECK_THROWS_AS(hcr::load_csv_series(path.string(), "missing"),
                  hcr::ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("missing csv files raise IoError") {
  CHECK_THROWS_AS(hcr::load_csv_series("/nonexistent/file.csv"),
                  hcr::IoError);
}

TEST_CASE("dataset cache round trips bit-exactly") {
  const auto data = hcr::gen_synthetic(small_spec());
  const auto path =
      std::filesystem::temp_directory_path() / "hcr_dataset_cache.bin";
  hcr::save_dataset(data.train, path.string());
  const Dataset loaded = hcr::load_dataset(path.string());
  std::filesystem::remove(path);
  CHECK(loaded.inputs == data.train.inputs);
  CHECK(loaded.targets == data.train.targets);
  CHECK(loaded.feasible == data.train.feasible);
}
