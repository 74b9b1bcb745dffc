// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

#include "simfair/train.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace simfair {

namespace {

struct Evaluated {
  ObjectiveValue value;
  Matrix<double> grad_probs;
};

Evaluated evaluate_objective(const Matrix<double>& probs, const GroupVector& a,
                             const LabelMatrix& y, int num_groups,
                             const std::optional<Penalty>& penalty, bool want_gradient) {
  Evaluated e;
  e.value.bce = batch_bce_loss(probs, y);
  e.value.loss = e.value.bce;
  if (want_gradient) e.grad_probs = batch_bce_gradient(probs, y);
  if (!penalty) return e;

  const Vector<double> w = weights_for<double>(penalty->spec, y, penalty->y_adv);
  const auto report = violation_from_weights(probs, a, w, num_groups, penalty->form);
  if (!report.defined()) return e;  // penalty skipped for this batch
  e.value.violation = *report.violation;
  e.value.loss += penalty->lambda * *report.violation;
  if (want_gradient) {
    e.grad_probs += penalty->lambda * violation_gradient_from_weights(probs, a, w, report);
  }
  return e;
}

}  // namespace

ObjectiveValue objective(const Backbone<double>& b, const Matrix<double>& x,
                         const GroupVector& a, const LabelMatrix& y, int num_groups,
                         const std::optional<Penalty>& penalty) {
  const Matrix<double> probs = forward(b, x);
  return evaluate_objective(probs, a, y, num_groups, penalty, false).value;
}

ObjectiveWithGradient objective_with_gradient(const Backbone<double>& b, const Matrix<double>& x,
                                              const GroupVector& a, const LabelMatrix& y,
                                              int num_groups,
                                              const std::optional<Penalty>& penalty) {
  const auto trace = forward_trace(b, x);
  auto e = evaluate_objective(trace.back(), a, y, num_groups, penalty, true);
  return {e.value, backward(b, trace, e.grad_probs)};
}

void TrainConfig::validate(Index num_targets) const {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size <= 0) throw ConfigError("batch size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(max_grad_norm > 0.0)) throw ConfigError("max gradient norm must be positive");
  for (Index h : hidden) {
    if (h <= 0) throw ConfigError("hidden layer widths must be positive");
  }
  if (spec) {
    if (spec->kind == SimilarityKind::JaccardExp && !(spec->gamma >= 0.0)) {
      throw ConfigError("gamma must be >= 0");
    }
    if (y_adv.size() != num_targets) {
      throw ConfigError("advantaged label has " + std::to_string(y_adv.size()) +
                        " targets, dataset has " + std::to_string(num_targets));
    }
  }
}

std::optional<Penalty> TrainConfig::penalty() const {
  if (!spec || lambda == 0.0) return std::nullopt;
  return Penalty{*spec, y_adv, lambda, form};
}

TrainResult train(const Dataset& train_set, const TrainConfig& config) {
  train_set.validate();
  config.validate(train_set.num_targets());
  if (train_set.size() == 0) throw ConfigError("empty training split");

  std::vector<Index> dims{train_set.num_features()};
  dims.insert(dims.end(), config.hidden.begin(), config.hidden.end());
  dims.push_back(train_set.num_targets());

  TrainResult result{init_backbone<double>(dims, config.seed), {}};
  result.report.config = config;
  Backbone<double>& model = result.model;
  AdamState<double> adam(model.layers());
  const auto penalty = config.penalty();

  std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                    static_cast<std::uint32_t>(config.seed >> 32), 0x5EEDu};
  std::mt19937_64 rng(seq);
  std::vector<Index> order(static_cast<std::size_t>(train_set.size()));
  std::iota(order.begin(), order.end(), Index{0});

  const auto batch = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    double bce_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::vector<Index> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                    order.begin() + static_cast<std::ptrdiff_t>(
                                                        std::min(start + batch, order.size())));
      const Matrix<double> x = train_set.X(rows, Eigen::all);
      const GroupVector a = train_set.a(rows);
      const LabelMatrix y = train_set.Y(rows, Eigen::all);

      auto step = objective_with_gradient(model, x, a, y, train_set.num_groups, penalty);
      if (penalty && !step.value.violation) ++result.report.skipped_penalty_batches;
      clip_grad_norm(step.grads, config.max_grad_norm);
      adam_step(adam, model.layers(), step.grads, config.learning_rate);

      loss_sum += step.value.loss;
      bce_sum += step.value.bce;
      ++batches;
      ++result.report.steps;
    }
    result.report.epoch_loss.push_back(loss_sum / static_cast<double>(batches));
    result.report.epoch_bce.push_back(bce_sum / static_cast<double>(batches));
  }
  return result;
}

EvalReport evaluate_probs(const Matrix<double>& probs, const Dataset& test,
                          const LabelVector& y_adv, const std::vector<double>& gammas,
                          ViolationForm form) {
  if (test.size() == 0) throw ConfigError("empty test split");
  EvalReport r;
  r.f1 = f1_report(test.Y, threshold(probs));
  r.dp = dp_violation(probs, test.a, test.num_groups, form);
  if (y_adv.size() > 0) {
    r.eop = eop_violation(probs, test.a, test.Y, y_adv, test.num_groups, form);
    for (double g : gammas) {
      r.simfair.push_back(simfair_violation(probs, test.a, test.Y, y_adv,
                                            SimilaritySpec::jaccard_exp(g), test.num_groups,
                                            form));
    }
  }
  return r;
}

EvalReport evaluate(const Backbone<double>& b, const Dataset& test, const LabelVector& y_adv,
                    const std::vector<double>& gammas, ViolationForm form) {
  return evaluate_probs(forward(b, test.X), test, y_adv, gammas, form);
}

}  // namespace simfair
