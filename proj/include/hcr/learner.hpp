// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hcr/constraint.hpp"
#include "hcr/datagen.hpp"
#include "hcr/hyperspherical.hpp"
#include "hcr/types.hpp"

namespace hcr {

/// The four model flavors: an unconstrained network, the same network with a
/// multiplier penalty, the same network projected at inference time, and the
/// network that predicts in hyperspherical coordinates.
enum class Variant { kSimple, kLagrangian, kProjection, kHcr };

const char* variant_name(Variant v);
std::optional<Variant> variant_from_name(const std::string& name);

enum class Activation { kTanh, kIdentity };

struct TrainConfig {
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  bool standardize_targets = true;  // ignored by the hyperspherical variant
  bool standardize_inputs = false;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  Index hidden = 128;
  Activation activation = Activation::kTanh;
};

/// Dual-ascent state for the penalty variant. Multipliers start at zero when
/// the vector is left empty and move by `step * mean violation` every
/// `update_period` epochs, clamped at zero.
struct LagrangianConfig {
  VectorXd multipliers;
  double step = 0.01;
  int update_period = 1;
};

/// Per-dimension affine normalization fitted on training data.
struct Standardizer {
  VectorXd mean;
  VectorXd scale;

  bool active() const { return mean.size() > 0; }
  VectorXd apply(const VectorXd& v) const {
    return active() ? ((v - mean).array() / scale.array()).matrix() : v;
  }
  VectorXd invert(const VectorXd& v) const {
    return active() ? (mean.array() + scale.array() * v.array()).matrix() : v;
  }
};

/// Dense encoder (input -> hidden) plus either one regression head
/// (hidden -> output) or the direction/radius head pair.
struct ModelParameters {
  Variant variant = Variant::kSimple;
  Activation activation = Activation::kTanh;

  MatrixXd w1;  // hidden x input
  VectorXd b1;

  MatrixXd w2;  // output x hidden, single-head variants
  VectorXd b2;

  MatrixXd wd;  // output x hidden, direction head
  VectorXd bd;
  Eigen::RowVectorXd wr;  // 1 x hidden, radius head
  double br = 0.0;

  Standardizer input_std;
  Standardizer target_std;

  Index input_dim() const { return w1.cols(); }
  Index hidden_dim() const { return w1.rows(); }
  Index output_dim() const {
    return variant == Variant::kHcr ? wd.rows() : w2.rows();
  }
};

/// Trains one variant on the dataset. Deterministic given the seed. The
/// hyperspherical variant requires every target row to be feasible and
/// learns the converted (direction, radius) targets under a joint MSE; the
/// penalty variant needs `lagrangian` state; simple and projection train
/// identically and differ only at inference.
ModelParameters train(Variant variant, const Dataset& data,
                      const FeasibleRegion<double>& region,
                      const TrainConfig& cfg,
                      const AccelConfig<double>& accel,
                      const LagrangianConfig* lagrangian = nullptr);

struct Prediction {
  VectorXd y;
  /// Wall-clock seconds spent in the post-processing step (projection or the
  /// hyperspherical-to-Euclidean conversion); empty for the variants that
  /// emit the raw head.
  std::optional<double> postprocess_seconds;
};

Prediction predict(const ModelParameters& params,
                   const FeasibleRegion<double>& region,
                   const AccelConfig<double>& accel, const VectorXd& x);

/// Checkpoints are JSON with a format tag ("hcr-model/1"), the variant,
/// activation, a shape header and the weight arrays; see README.
void save_model(const ModelParameters& params, const std::string& path);
ModelParameters load_model(const std::string& path);

}  // namespace hcr
