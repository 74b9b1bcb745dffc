// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

// Minibatch Adam training of the backbone on
//   loss = mean BCE(batch) + lambda * violation(batch)
// where the violation is estimated on each minibatch with the similarity
// weighted estimators. A batch whose violation is undefined adds no penalty.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "simfair/data.hpp"
#include "simfair/fairness.hpp"
#include "simfair/metrics.hpp"
#include "simfair/model.hpp"
#include "simfair/similarity.hpp"

namespace simfair {

// ---------------------------------------------------------------------------
// Optimizer pieces

/// Global L2 norm over all tensors.
template <typename Scalar>
Scalar global_norm(const LayerTensors<Scalar>& grads) {
  Scalar sq = 0;
  for (const auto& g : grads) sq += g.weight.squaredNorm() + g.bias.squaredNorm();
  return std::sqrt(sq);
}

/// Rescales grads in place so their global norm is at most max_norm.
/// Returns the norm before clipping.
template <typename Scalar>
Scalar clip_grad_norm(LayerTensors<Scalar>& grads, Scalar max_norm) {
  if (!(max_norm > Scalar(0))) throw ConfigError("max_norm must be positive");
  const Scalar norm = global_norm(grads);
  if (norm > max_norm) {
    const Scalar scale = max_norm / norm;
    for (auto& g : grads) {
      g.weight *= scale;
      g.bias *= scale;
    }
  }
  return norm;
}

template <typename Scalar>
struct AdamState {
  static constexpr Scalar beta1 = Scalar(0.9);
  static constexpr Scalar beta2 = Scalar(0.999);
  static constexpr Scalar eps = Scalar(1e-8);

  LayerTensors<Scalar> first_moment;
  LayerTensors<Scalar> second_moment;
  long long step = 0;

  AdamState() = default;
  explicit AdamState(const LayerTensors<Scalar>& params)
      : first_moment(zeros_like(params)), second_moment(zeros_like(params)) {}

  friend bool operator==(const AdamState& a, const AdamState& b) {
    if (a.step != b.step || a.first_moment.size() != b.first_moment.size()) return false;
    for (std::size_t i = 0; i < a.first_moment.size(); ++i) {
      if (a.first_moment[i].weight != b.first_moment[i].weight ||
          a.first_moment[i].bias != b.first_moment[i].bias ||
          a.second_moment[i].weight != b.second_moment[i].weight ||
          a.second_moment[i].bias != b.second_moment[i].bias) {
        return false;
      }
    }
    return true;
  }
};

namespace detail {

template <typename P, typename G, typename M>
void adam_update(P& param, const G& grad, M& m, M& v, double lr, double bc1, double bc2,
                 double beta1, double beta2, double eps) {
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseAbs2();
  param.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
}

}  // namespace detail

/// One bias-corrected Adam update of every tensor.
template <typename Scalar>
void adam_step(AdamState<Scalar>& state, LayerTensors<Scalar>& params,
               const LayerTensors<Scalar>& grads, Scalar lr) {
  if (params.size() != grads.size()) throw DimensionError("adam_step: tensor count mismatch");
  if (state.first_moment.empty() && !params.empty()) state = AdamState<Scalar>(params);
  if (state.first_moment.size() != params.size()) {
    throw DimensionError("adam_step: optimizer state does not match parameters");
  }
  ++state.step;
  const auto t = static_cast<Scalar>(state.step);
  const Scalar bc1 = Scalar(1) - std::pow(AdamState<Scalar>::beta1, t);
  const Scalar bc2 = Scalar(1) - std::pow(AdamState<Scalar>::beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    const auto& g = grads[i];
    if (p.weight.rows() != g.weight.rows() || p.weight.cols() != g.weight.cols() ||
        p.bias.size() != g.bias.size()) {
      throw DimensionError("adam_step: tensor shape mismatch");
    }
    detail::adam_update(p.weight, g.weight, state.first_moment[i].weight,
                        state.second_moment[i].weight, lr, bc1, bc2,
                        AdamState<Scalar>::beta1, AdamState<Scalar>::beta2,
                        AdamState<Scalar>::eps);
    detail::adam_update(p.bias, g.bias, state.first_moment[i].bias, state.second_moment[i].bias,
                        lr, bc1, bc2, AdamState<Scalar>::beta1, AdamState<Scalar>::beta2,
                        AdamState<Scalar>::eps);
  }
}

// ---------------------------------------------------------------------------
// Combined objective

struct Penalty {
  SimilaritySpec spec;
  LabelVector y_adv;
  double lambda = 10.0;
  ViolationForm form = ViolationForm::Auto;
};

struct ObjectiveValue {
  double loss = 0.0;       // bce + lambda * violation (0 when undefined)
  double bce = 0.0;
  std::optional<double> violation;
};

/// Combined minibatch loss and its parameter gradients.
struct ObjectiveWithGradient {
  ObjectiveValue value;
  LayerTensors<double> grads;
};

ObjectiveValue objective(const Backbone<double>& b, const Matrix<double>& x,
                         const GroupVector& a, const LabelMatrix& y, int num_groups,
                         const std::optional<Penalty>& penalty);

ObjectiveWithGradient objective_with_gradient(const Backbone<double>& b, const Matrix<double>& x,
                                              const GroupVector& a, const LabelMatrix& y,
                                              int num_groups,
                                              const std::optional<Penalty>& penalty);

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  double lambda = 10.0;
  std::optional<SimilaritySpec> spec;  // nullopt: no fairness penalty
  LabelVector y_adv;
  ViolationForm form = ViolationForm::Auto;
  int epochs = 20;
  Index batch_size = 128;
  double learning_rate = 1e-3;
  double max_grad_norm = 5.0;
  std::vector<Index> hidden{64};
  std::uint64_t seed = 1;

  void validate(Index num_targets) const;
  std::optional<Penalty> penalty() const;
};

struct EvalReport {
  F1Report f1;
  ViolationReport<double> dp;
  std::optional<ViolationReport<double>> eop;
  std::vector<ViolationReport<double>> simfair;  // one per requested gamma
};

struct TrainReport {
  std::vector<double> epoch_loss;      // mean combined minibatch loss per epoch
  std::vector<double> epoch_bce;
  Index steps = 0;
  Index skipped_penalty_batches = 0;   // undefined violation, penalty dropped
  std::optional<EvalReport> test;
  TrainConfig config;
};

struct TrainResult {
  Backbone<double> model;
  TrainReport report;
};

/// Runs config.epochs passes over `train_set` in shuffled minibatches.
TrainResult train(const Dataset& train_set, const TrainConfig& config);

/// F1 on thresholded predictions plus DP, EOp and SimFair(gamma) violations
/// on predicted probabilities.
EvalReport evaluate(const Backbone<double>& b, const Dataset& test, const LabelVector& y_adv,
                    const std::vector<double>& gammas,
                    ViolationForm form = ViolationForm::Auto);

EvalReport evaluate_probs(const Matrix<double>& probs, const Dataset& test,
                          const LabelVector& y_adv, const std::vector<double>& gammas,
                          ViolationForm form = ViolationForm::Auto);

}  // namespace simfair
