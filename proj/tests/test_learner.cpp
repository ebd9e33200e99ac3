// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#include "hcr/learner.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "doctest.h"
#include "hcr/projection.hpp"

using hcr::AccelConfig;
using hcr::ConstraintFunction;
using hcr::Dataset;
using hcr::FeasibleRegion;
using hcr::Index;
using hcr::MatrixXd;
using hcr::TrainConfig;
using hcr::Variant;
using hcr::VectorXd;

namespace {

FeasibleRegion<double> ball_region(Index dim, double radius) {
  std::vector<ConstraintFunction<double>> cs;
  cs.push_back(ConstraintFunction<double>::ball(VectorXd::Zero(dim), radius));
  return FeasibleRegion<double>(std::move(cs), VectorXd::Zero(dim));
}

Dataset linear_dataset(Index n_samples, Index k, Index n, double scale,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  MatrixXd w(n, k);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < k; ++c) w(r, c) = 0.5 * unit(rng);
  }
  Dataset data;
  data.inputs.resize(n_samples, k);
  for (Index r = 0; r < n_samples; ++r) {
    for (Index c = 0; c < k; ++c) data.inputs(r, c) = unit(rng);
  }
  data.targets = scale * (data.inputs * w.transpose());
  return data;
}

bool same_parameters(const hcr::ModelParameters& a,
                     const hcr::ModelParameters& b) {
  return a.w1 == b.w1 && a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2;
}

double train_mse(const hcr::ModelParameters& params,
                 const FeasibleRegion<double>& region,
                 const AccelConfig<double>& accel, const Dataset& data) {
  double sq = 0.0;
  for (Index r = 0; r < data.size(); ++r) {
    const auto pred =
        hcr::predict(params, region, accel, data.inputs.row(r).transpose());
    sq += (pred.y - data.targets.row(r).transpose()).squaredNorm();
  }
  return sq / static_cast<double>(data.size() * data.targets.cols());
}

}  // namespace

TEST_CASE("the hyperspherical variant memorizes a single sample") {
  const auto region = ball_region(2, 10.0);
  const auto accel = AccelConfig<double>::for_region(region);
  Dataset data;
  data.inputs.resize(1, 2);
  data.inputs << 0.3, -0.2;
  data.targets.resize(1, 2);
  data.targets << 5.0, 0.0;

  TrainConfig cfg;
  cfg.epochs = 2000;
  cfg.batch_size = 1;
  cfg.learning_rate = 0.01;
  cfg.hidden = 16;
  cfg.seed = 1;
  const auto params = hcr::train(Variant::kHcr, data, region, cfg, accel);
  const auto pred =
      hcr::predict(params, region, accel, data.inputs.row(0).transpose());
  CHECK((pred.y - data.targets.row(0).transpose()).norm() <= 1e-2);
  CHECK(pred.postprocess_seconds.has_value());
}

TEST_CASE("zero multipliers and zero step reproduce the simple trajectory") {
  const auto region = ball_region(3, 10.0);
  const auto accel = AccelConfig<double>::for_region(region);
  Dataset data = linear_dataset(40, 5, 3, 3.0, 17);

  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.batch_size = 8;
  cfg.seed = 7;

  hcr::LagrangianConfig duals;
  duals.step = 0.0;
  const auto simple = hcr::train(Variant::kSimple, data, region, cfg, accel);
  const auto penalized =
      hcr::train(Variant::kLagrangian, data, region, cfg, accel, &duals);
  CHECK(same_parameters(simple, penalized));
}

TEST_CASE("dual ascent grows multipliers and changes the trajectory") {
  const auto region = ball_region(3, 0.5);  // tight: violations guaranteed
  const auto accel = AccelConfig<double>::for_region(region);
  Dataset data = linear_dataset(40, 5, 3, 3.0, 18);

  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.batch_size = 8;
  cfg.seed = 7;

  hcr::LagrangianConfig duals;
  duals.step = 0.5;
  const auto simple = hcr::train(Variant::kSimple, data, region, cfg, accel);
  const auto penalized =
      hcr::train(Variant::kLagrangian, data, region, cfg, accel, &duals);
  CHECK_FALSE(same_parameters(simple, penalized));
}

TEST_CASE("a linear model class drives the training loss to zero") {
  const auto region = ball_region(3, 1e6);
  const auto accel = AccelConfig<double>::for_region(region);
  const Dataset data = linear_dataset(64, 4, 3, 1.0, 23);

  TrainConfig cfg;
  cfg.epochs = 3000;
  cfg.batch_size = 64;
  cfg.learning_rate = 0.01;
  cfg.hidden = 16;
  cfg.activation = hcr::Activation::kIdentity;
  cfg.seed = 2;
  const auto params = hcr::train(Variant::kSimple, data, region, cfg, accel);
  CHECK(train_mse(params, region, accel, data) <= 1e-4);
}

TEST_CASE("infeasible targets are rejected for the hyperspherical variant") {
  const auto region = ball_region(2, 1.0);
  const auto accel = AccelConfig<double>::for_region(region);
  Dataset data;
  data.inputs = MatrixXd::Zero(1, 2);
  data.targets.resize(1, 2);
  data.targets << 5.0, 0.0;  // outside the unit ball
  TrainConfig cfg;
  cfg.epochs = 1;
  CHECK_THROWS_AS(hcr::train(Variant::kHcr, data, region, cfg, accel),
                  hcr::InfeasibleTargets);
}

TEST_CASE("diverging losses are reported") {
  const auto region = ball_region(2, 1e6);
  const auto accel = AccelConfig<double>::for_region(region);
  Dataset data;
  data.inputs = MatrixXd::Random(4, 3);
  data.targets = MatrixXd::Constant(4, 2, 1e160);  // finite, but squares to inf
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.standardize_targets = false;
  CHECK_THROWS_AS(hcr::train(Variant::kSimple, data, region, cfg, accel),
                  hcr::NonFiniteLoss);
}

TEST_CASE("hyperspherical predictions are feasible for arbitrary weights") {
  const auto region = ball_region(4, 10.0);
  const auto accel = AccelConfig<double>::for_region(region);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss(0.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    hcr::ModelParameters params;
    params.variant = Variant::kHcr;
    params.w1 = MatrixXd::NullaryExpr(8, 5, [&]() { return gauss(rng); });
    params.b1 = VectorXd::NullaryExpr(8, [&]() { return gauss(rng); });
    params.wd = MatrixXd::NullaryExpr(4, 8, [&]() { return gauss(rng); });
    params.bd = VectorXd::NullaryExpr(4, [&]() { return gauss(rng); });
    params.wr = Eigen::RowVectorXd::NullaryExpr(8, [&]() {
      return gauss(rng);
    });
    params.br = gauss(rng);

    VectorXd x = VectorXd::NullaryExpr(5, [&]() { return gauss(rng); });
    const auto pred = hcr::predict(params, region, accel, x);
    CHECK(region.is_feasible(pred.y));
    CHECK(pred.y.norm() < 10.0);  // sigmoid keeps r < 1: strictly inside
  }
}

TEST_CASE("projected predictions are feasible") {
  const auto region = ball_region(3, 1.0);
  const auto accel = AccelConfig<double>::for_region(region);
  Dataset data = linear_dataset(30, 4, 3, 5.0, 37);
  for (Index r = 0; r < data.size(); ++r) {
    data.targets.row(r) =
        hcr::project(region, data.targets.row(r).transpose()).transpose();
  }
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.seed = 4;
  const auto params =
      hcr::train(Variant::kProjection, data, region, cfg, accel);
  std::mt19937_64 rng(38);
  std::normal_distribution<double> gauss(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd x = VectorXd::NullaryExpr(4, [&]() { return gauss(rng); });
    const auto pred = hcr::predict(params, region, accel, x);
    CHECK(region.is_feasible(pred.y));
    CHECK(pred.postprocess_seconds.has_value());
  }
}

TEST_CASE("training is deterministic given the seed") {
  const auto region = ball_region(3, 10.0);
  const auto accel = AccelConfig<double>::for_region(region);
  const Dataset data = linear_dataset(32, 4, 3, 2.0, 41);
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 9;
  const auto a = hcr::train(Variant::kSimple, data, region, cfg, accel);
  const auto b = hcr::train(Variant::kSimple, data, region, cfg, accel);
  CHECK(same_parameters(a, b));

  const auto ha = hcr::train(Variant::kHcr, data, region, cfg, accel);
  const auto hb = hcr::train(Variant::kHcr, data, region, cfg, accel);
  CHECK(ha.w1 == hb.w1);
  CHECK(ha.wd == hb.wd);
  CHECK(ha.wr == hb.wr);
  CHECK(ha.br == hb.br);
}

TEST_CASE("simple predictions carry no post-processing time") {
  const auto region = ball_region(3, 10.0);
  const auto accel = AccelConfig<double>::for_region(region);
  const Dataset data = linear_dataset(16, 4, 3, 2.0, 43);
  TrainConfig cfg;
  cfg.epochs = 5;
  const auto params = hcr::train(Variant::kSimple, data, region, cfg, accel);
  const auto pred =
      hcr::predict(params, region, accel, data.inputs.row(0).transpose());
  CHECK_FALSE(pred.postprocess_seconds.has_value());
}

TEST_CASE("predict rejects inputs of the wrong width") {
  const auto region = ball_region(3, 10.0);
  const auto accel = AccelConfig<double>::for_region(region);
  const Dataset data = linear_dataset(16, 4, 3, 2.0, 47);
  TrainConfig cfg;
  cfg.epochs = 2;
  const auto params = hcr::train(Variant::kSimple, data, region, cfg, accel);
  CHECK_THROWS_AS(hcr::predict(params, region, accel, VectorXd::Zero(7)),
                  hcr::DimensionMismatch);
}

TEST_CASE("model checkpoints round trip") {
  const auto region = ball_region(3, 10.0);
  const auto accel = AccelConfig<double>::for_region(region);
  const Dataset data = linear_dataset(16, 4, 3, 2.0, 53);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.standardize_inputs = true;

  for (const Variant variant : {Variant::kSimple, Variant::kHcr}) {
    const auto params = hcr::train(variant, data, region, cfg, accel);
    const auto path = std::filesystem::temp_directory_path() /
                      "hcr_model_roundtrip.json";
    hcr::save_model(params, path.string());
    const auto loaded = hcr::load_model(path.string());
    std::filesystem::remove(path);

    CHECK(loaded.variant == params.variant);
    CHECK(loaded.w1 == params.w1);
    CHECK(loaded.b1 == params.b1);
    if (variant == Variant::kHcr) {
      CHECK(loaded.wd == params.wd);
      CHECK(loaded.wr == params.wr);
      CHECK(loaded.br == params.br);
    } else {
      CHECK(loaded.w2 == params.w2);
      CHECK(loaded.b2 == params.b2);
    }
    CHECK(loaded.input_std.active());
    CHECK(loaded.input_std.mean == params.input_std.mean);

    // Identical predictions after reload.
    const VectorXd x = data.inputs.row(1).transpose();
    CHECK(hcr::predict(loaded, region, accel, x).y ==
          hcr::predict(params, region, accel, x).y);
  }
}

TEST_CASE("corrupt model files are rejected") {
  const auto path =
      std::filesystem::temp_directory_path() / "hcr_model_bad.json";
  {
    std::ofstream out(path);
    out << "{\"format\": \"something-else\"}";
  }
  CHECK_THROWS_AS(hcr::load_model(path.string()), hcr::ParseError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(hcr::load_model("/nonexistent/model.json"), hcr::IoError);
}
