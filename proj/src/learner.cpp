// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#include "hcr/learner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "hcr/projection.hpp"
#include "json.hpp"

namespace hcr {

namespace {

using Clock = std::chrono::steady_clock;

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

/// First-moment/second-moment pair for one parameter tensor.
template <typename Tensor>
struct AdamState {
  Tensor m, v;

  explicit AdamState(const Tensor& like)
      : m(Tensor::Zero(like.rows(), like.cols())),
        v(Tensor::Zero(like.rows(), like.cols())) {}

  void step(Tensor& param, const Tensor& grad, const TrainConfig& cfg,
            double bias1, double bias2) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    param.array() -= cfg.learning_rate * (m.array() / bias1) /
                     ((v.array() / bias2).sqrt() + cfg.adam_epsilon);
  }
};

struct ScalarAdam {
  double m = 0.0, v = 0.0;

  void step(double& param, double grad, const TrainConfig& cfg, double bias1,
            double bias2) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad * grad;
    param -= cfg.learning_rate * (m / bias1) /
             (std::sqrt(v / bias2) + cfg.adam_epsilon);
  }
};

MatrixXd glorot(std::mt19937_64& rng, Index rows, Index cols) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  MatrixXd w(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) w(r, c) = dist(rng);
  }
  return w;
}

Standardizer fit_standardizer(const MatrixXd& data) {
  Standardizer s;
  s.mean = data.colwise().mean().transpose();
  const VectorXd var = (data.rowwise() - s.mean.transpose())
                           .array()
                           .square()
                           .colwise()
                           .mean()
                           .transpose();
  s.scale = var.array().sqrt().max(1e-12);
  return s;
}

MatrixXd apply_standardizer_rows(const Standardizer& s, const MatrixXd& data) {
  if (!s.active()) return data;
  MatrixXd out = data;
  out.rowwise() -= s.mean.transpose();
  out.array().rowwise() /= s.scale.transpose().array();
  return out;
}

MatrixXd activate(const MatrixXd& z, Activation a) {
  if (a == Activation::kTanh) return z.array().tanh().matrix();
  return z;
}

MatrixXd activate_backward(const MatrixXd& da, const MatrixXd& a,
                           Activation act) {
  if (act == Activation::kTanh) {
    return (da.array() * (1.0 - a.array().square())).matrix();
  }
  return da;
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kSimple: return "simple";
    case Variant::kLagrangian: return "lagrangian";
    case Variant::kProjection: return "projection";
    case Variant::kHcr: return "hcr";
  }
  return "unknown";
}

std::optional<Variant> variant_from_name(const std::string& name) {
  if (name == "simple") return Variant::kSimple;
  if (name == "lagrangian") return Variant::kLagrangian;
  if (name == "projection") return Variant::kProjection;
  if (name == "hcr") return Variant::kHcr;
  return std::nullopt;
}

ModelParameters train(Variant variant, const Dataset& data,
                      const FeasibleRegion<double>& region,
                      const TrainConfig& cfg, const AccelConfig<double>& accel,
                      const LagrangianConfig* lagrangian) {
  if (cfg.epochs <= 0 || cfg.batch_size <= 0 || cfg.learning_rate <= 0 ||
      cfg.hidden <= 0) {
    throw std::invalid_argument(
        "train: epochs, batch size, learning rate and hidden width must be "
        "positive");
  }
  const Index n_samples = data.size();
  if (n_samples == 0) throw std::invalid_argument("train: empty dataset");
  if (data.targets.rows() != n_samples) {
    throw DimensionMismatch("train: inputs and targets disagree on rows");
  }
  if (data.targets.cols() != region.dimension()) {
    throw DimensionMismatch("train: target dimension " +
                            std::to_string(data.targets.cols()) +
                            " does not match region dimension " +
                            std::to_string(region.dimension()));
  }
  const Index k = data.inputs.cols();
  const Index n = data.targets.cols();
  const Index h = cfg.hidden;
  const bool is_hcr = variant == Variant::kHcr;
  const bool penalized = variant == Variant::kLagrangian;

  ModelParameters params;
  params.variant = variant;
  params.activation = cfg.activation;
  if (cfg.standardize_inputs) params.input_std = fit_standardizer(data.inputs);
  if (cfg.standardize_targets && !is_hcr) {
    params.target_std = fit_standardizer(data.targets);
  }

  const MatrixXd inputs = apply_standardizer_rows(params.input_std,
                                                  data.inputs);

  // Single-head targets, standardized when configured.
  MatrixXd targets;
  // Direction/radius targets for the hyperspherical variant.
  MatrixXd direction_targets;
  VectorXd radius_targets;
  if (is_hcr) {
    direction_targets.resize(n_samples, n);
    radius_targets.resize(n_samples);
    for (Index r = 0; r < n_samples; ++r) {
      const VectorXd y = data.targets.row(r).transpose();
      if (!region.is_feasible(y)) {
        throw InfeasibleTargets("train: target row " + std::to_string(r) +
                                " is infeasible; project the data first");
      }
      const auto coord = to_hyperspherical(region, y, accel);
      direction_targets.row(r) = coord.direction.transpose();
      radius_targets[r] = coord.radius;
    }
  } else {
    targets = apply_standardizer_rows(params.target_std, data.targets);
  }

  std::mt19937_64 rng(cfg.seed);
  params.w1 = glorot(rng, h, k);
  params.b1 = VectorXd::Zero(h);
  AdamState<MatrixXd> adam_w1(params.w1);
  AdamState<VectorXd> adam_b1(params.b1);

  AdamState<MatrixXd> adam_w2(MatrixXd::Zero(is_hcr ? 0 : n, h));
  AdamState<VectorXd> adam_b2(VectorXd::Zero(is_hcr ? 0 : n));
  AdamState<MatrixXd> adam_wd(MatrixXd::Zero(is_hcr ? n : 0, h));
  AdamState<VectorXd> adam_bd(VectorXd::Zero(is_hcr ? n : 0));
  AdamState<Eigen::RowVectorXd> adam_wr(
      Eigen::RowVectorXd::Zero(is_hcr ? h : 0));
  ScalarAdam adam_br;

  if (is_hcr) {
    params.wd = glorot(rng, n, h);
    params.bd = VectorXd::Zero(n);
    params.wr = glorot(rng, 1, h);
    params.br = 0.0;
  } else {
    params.w2 = glorot(rng, n, h);
    params.b2 = VectorXd::Zero(n);
  }

  LagrangianConfig duals;
  if (penalized) {
    if (lagrangian) duals = *lagrangian;
    if (duals.multipliers.size() == 0) {
      duals.multipliers = VectorXd::Zero(region.constraint_count());
    }
    if (duals.multipliers.size() != region.constraint_count()) {
      throw DimensionMismatch(
          "train: multiplier count does not match the constraint count");
    }
    if ((duals.multipliers.array() < 0.0).any()) {
      throw std::invalid_argument("train: multipliers must be nonnegative");
    }
    if (duals.update_period <= 0) {
      throw std::invalid_argument("train: update period must be positive");
    }
  }

  std::vector<Index> perm(static_cast<std::size_t>(n_samples));
  std::iota(perm.begin(), perm.end(), Index(0));

  const double beta1 = cfg.beta1, beta2 = cfg.beta2;
  double beta1_t = 1.0, beta2_t = 1.0;
  VectorXd violation_sum;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), rng);
    if (penalized) violation_sum = VectorXd::Zero(region.constraint_count());

    for (Index start = 0; start < n_samples; start += cfg.batch_size) {
      const Index batch =
          std::min<Index>(cfg.batch_size, n_samples - start);
      MatrixXd xb(k, batch);
      for (Index i = 0; i < batch; ++i) {
        xb.col(i) = inputs.row(perm[static_cast<std::size_t>(start + i)])
                        .transpose();
      }

      MatrixXd z1 = (params.w1 * xb).colwise() + params.b1;
      MatrixXd a1 = activate(z1, cfg.activation);

      double loss = 0.0;
      MatrixXd da1;

      if (!is_hcr) {
        MatrixXd pred = (params.w2 * a1).colwise() + params.b2;
        MatrixXd tb(n, batch);
        for (Index i = 0; i < batch; ++i) {
          tb.col(i) = targets.row(perm[static_cast<std::size_t>(start + i)])
                          .transpose();
        }
        MatrixXd err = pred - tb;
        const double denom = static_cast<double>(n * batch);
        loss = err.squaredNorm() / denom;
        MatrixXd dpred = (2.0 / denom) * err;

        if (penalized) {
          for (Index i = 0; i < batch; ++i) {
            const VectorXd y = params.target_std.invert(pred.col(i));
            VectorXd grad_y = VectorXd::Zero(n);
            bool any = false;
            for (Index c = 0; c < region.constraint_count(); ++c) {
              const double violation = region.evaluate(c, y);
              if (violation > 0.0) {
                violation_sum[c] += violation;
                const double multiplier = duals.multipliers[c];
                if (multiplier > 0.0) {
                  loss += multiplier * violation /
                          static_cast<double>(batch);
                  grad_y += multiplier * detail::constraint_subgradient(
                                             region.constraint(c), y);
                  any = true;
                }
              }
            }
            if (any) {
              if (params.target_std.active()) {
                grad_y.array() *= params.target_std.scale.array();
              }
              dpred.col(i) += grad_y / static_cast<double>(batch);
            }
          }
        }

        if (!std::isfinite(loss)) {
          throw NonFiniteLoss("train: loss diverged at epoch " +
                              std::to_string(epoch));
        }

        MatrixXd dw2 = dpred * a1.transpose();
        VectorXd db2 = dpred.rowwise().sum();
        da1 = params.w2.transpose() * dpred;

        beta1_t *= beta1;
        beta2_t *= beta2;
        const double bias1 = 1.0 - beta1_t, bias2 = 1.0 - beta2_t;
        adam_w2.step(params.w2, dw2, cfg, bias1, bias2);
        adam_b2.step(params.b2, db2, cfg, bias1, bias2);

        MatrixXd dz1 = activate_backward(da1, a1, cfg.activation);
        MatrixXd dw1 = dz1 * xb.transpose();
        VectorXd db1 = dz1.rowwise().sum();
        adam_w1.step(params.w1, dw1, cfg, bias1, bias2);
        adam_b1.step(params.b1, db1, cfg, bias1, bias2);
      } else {
        MatrixXd u = (params.wd * a1).colwise() + params.bd;
        Eigen::RowVectorXd v = params.wr * a1;
        v.array() += params.br;

        MatrixXd dir_pred(n, batch);
        VectorXd norms(batch);
        for (Index i = 0; i < batch; ++i) {
          norms[i] = std::max(u.col(i).norm(), kDirectionEps);
          dir_pred.col(i) = u.col(i) / norms[i];
        }
        Eigen::RowVectorXd radius_pred(batch);
        for (Index i = 0; i < batch; ++i) radius_pred[i] = sigmoid(v[i]);

        MatrixXd dir_tb(n, batch);
        Eigen::RowVectorXd radius_tb(batch);
        for (Index i = 0; i < batch; ++i) {
          const Index row = perm[static_cast<std::size_t>(start + i)];
          dir_tb.col(i) = direction_targets.row(row).transpose();
          radius_tb[i] = radius_targets[row];
        }

        MatrixXd dir_err = dir_pred - dir_tb;
        Eigen::RowVectorXd radius_err = radius_pred - radius_tb;
        const double denom = static_cast<double>((n + 1) * batch);
        loss = (dir_err.squaredNorm() + radius_err.squaredNorm()) / denom;
        if (!std::isfinite(loss)) {
          throw NonFiniteLoss("train: loss diverged at epoch " +
                              std::to_string(epoch));
        }

        MatrixXd ddir = (2.0 / denom) * dir_err;
        // Through the normalization: (I - d d^T) / ||u||.
        MatrixXd du(n, batch);
        for (Index i = 0; i < batch; ++i) {
          du.col(i) = (ddir.col(i) -
                       dir_pred.col(i) * dir_pred.col(i).dot(ddir.col(i))) /
                      norms[i];
        }
        Eigen::RowVectorXd dradius = (2.0 / denom) * radius_err;
        Eigen::RowVectorXd dv =
            dradius.array() * radius_pred.array() *
            (1.0 - radius_pred.array());

        MatrixXd dwd = du * a1.transpose();
        VectorXd dbd = du.rowwise().sum();
        Eigen::RowVectorXd dwr = dv * a1.transpose();
        const double dbr = dv.sum();
        da1 = params.wd.transpose() * du + params.wr.transpose() * dv;

        beta1_t *= beta1;
        beta2_t *= beta2;
        const double bias1 = 1.0 - beta1_t, bias2 = 1.0 - beta2_t;
        adam_wd.step(params.wd, dwd, cfg, bias1, bias2);
        adam_bd.step(params.bd, dbd, cfg, bias1, bias2);
        adam_wr.step(params.wr, dwr, cfg, bias1, bias2);
        adam_br.step(params.br, dbr, cfg, bias1, bias2);

        MatrixXd dz1 = activate_backward(da1, a1, cfg.activation);
        MatrixXd dw1 = dz1 * xb.transpose();
        VectorXd db1 = dz1.rowwise().sum();
        adam_w1.step(params.w1, dw1, cfg, bias1, bias2);
        adam_b1.step(params.b1, db1, cfg, bias1, bias2);
      }
    }

    if (penalized && (epoch + 1) % duals.update_period == 0) {
      duals.multipliers =
          (duals.multipliers +
           duals.step * violation_sum / static_cast<double>(n_samples))
              .cwiseMax(0.0);
    }
  }
  return params;
}

Prediction predict(const ModelParameters& params,
                   const FeasibleRegion<double>& region,
                   const AccelConfig<double>& accel, const VectorXd& x) {
  if (x.size() != params.input_dim()) {
    throw DimensionMismatch("predict: input has dimension " +
                            std::to_string(x.size()) + ", model expects " +
                            std::to_string(params.input_dim()));
  }
  const VectorXd xs = params.input_std.apply(x);
  VectorXd z1 = params.w1 * xs + params.b1;
  if (params.activation == Activation::kTanh) {
    z1 = z1.array().tanh();
  }
  const VectorXd& a1 = z1;

  if (params.variant == Variant::kHcr) {
    HypersphericalCoord<double> coord{
        normalize_direction(params.wd * a1 + params.bd),
        sigmoid(params.wr.dot(a1) + params.br)};
    const auto t0 = Clock::now();
    VectorXd y = from_hyperspherical(region, coord, accel);
    const auto t1 = Clock::now();
    return {std::move(y), std::chrono::duration<double>(t1 - t0).count()};
  }

  VectorXd raw = params.target_std.invert(params.w2 * a1 + params.b2);
  if (params.variant == Variant::kProjection) {
    const auto t0 = Clock::now();
    VectorXd y = project(region, raw);
    const auto t1 = Clock::now();
    return {std::move(y), std::chrono::duration<double>(t1 - t0).count()};
  }
  return {std::move(raw), std::nullopt};
}

namespace {

using nlohmann::ordered_json;

ordered_json matrix_to_json(const MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_json(const ordered_json& j, Index rows, Index cols,
                          const std::string& field) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) {
    throw ParseError("model file: '" + field + "' has the wrong row count");
  }
  MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ParseError("model file: '" + field + "' has the wrong column "
                       "count");
    }
    for (Index c = 0; c < cols; ++c) {
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

ordered_json vector_to_json(const VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

VectorXd vector_from_json(const ordered_json& j, Index size,
                          const std::string& field) {
  if (!j.is_array() || static_cast<Index>(j.size()) != size) {
    throw ParseError("model file: '" + field + "' has the wrong length");
  }
  VectorXd v(size);
  for (Index i = 0; i < size; ++i) {
    v[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

ordered_json standardizer_to_json(const Standardizer& s) {
  if (!s.active()) return nullptr;
  ordered_json j;
  j["mean"] = vector_to_json(s.mean);
  j["scale"] = vector_to_json(s.scale);
  return j;
}

Standardizer standardizer_from_json(const ordered_json& j, Index size,
                                    const std::string& field) {
  Standardizer s;
  if (j.is_null()) return s;
  s.mean = vector_from_json(j.at("mean"), size, field + ".mean");
  s.scale = vector_from_json(j.at("scale"), size, field + ".scale");
  return s;
}

}  // namespace

void save_model(const ModelParameters& params, const std::string& path) {
  ordered_json j;
  j["format"] = "hcr-model/1";
  j["variant"] = variant_name(params.variant);
  j["activation"] =
      params.activation == Activation::kTanh ? "tanh" : "identity";
  j["dims"] = {{"input", params.input_dim()},
               {"hidden", params.hidden_dim()},
               {"output", params.output_dim()}};
  j["w1"] = matrix_to_json(params.w1);
  j["b1"] = vector_to_json(params.b1);
  if (params.variant == Variant::kHcr) {
    j["wd"] = matrix_to_json(params.wd);
    j["bd"] = vector_to_json(params.bd);
    j["wr"] = vector_to_json(params.wr.transpose());
    j["br"] = params.br;
  } else {
    j["w2"] = matrix_to_json(params.w2);
    j["b2"] = vector_to_json(params.b2);
  }
  j["input_standardizer"] = standardizer_to_json(params.input_std);
  j["target_standardizer"] = standardizer_to_json(params.target_std);

  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing model file: " + path);
}

ModelParameters load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
  if (!j.contains("format") || j["format"] != "hcr-model/1") {
    throw ParseError("model file: unsupported format tag");
  }
  ModelParameters params;
  const auto variant = variant_from_name(j.at("variant").get<std::string>());
  if (!variant) throw ParseError("model file: unknown variant");
  params.variant = *variant;
  const std::string act = j.at("activation").get<std::string>();
  if (act == "tanh") {
    params.activation = Activation::kTanh;
  } else if (act == "identity") {
    params.activation = Activation::kIdentity;
  } else {
    throw ParseError("model file: unknown activation '" + act + "'");
  }
  const Index k = j.at("dims").at("input").get<Index>();
  const Index h = j.at("dims").at("hidden").get<Index>();
  const Index n = j.at("dims").at("output").get<Index>();
  params.w1 = matrix_from_json(j.at("w1"), h, k, "w1");
  params.b1 = vector_from_json(j.at("b1"), h, "b1");
  if (params.variant == Variant::kHcr) {
    params.wd = matrix_from_json(j.at("wd"), n, h, "wd");
    params.bd = vector_from_json(j.at("bd"), n, "bd");
    params.wr = vector_from_json(j.at("wr"), h, "wr").transpose();
    params.br = j.at("br").get<double>();
  } else {
    params.w2 = matrix_from_json(j.at("w2"), n, h, "w2");
    params.b2 = vector_from_json(j.at("b2"), n, "b2");
  }
  params.input_std =
      standardizer_from_json(j.value("input_standardizer", ordered_json()),
                             k, "input_standardizer");
  params.target_std =
      standardizer_from_json(j.value("target_standardizer", ordered_json()),
                             n, "target_standardizer");
  return params;
}

}  // namespace hcr
