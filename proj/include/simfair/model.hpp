// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

// Multi-label classifier h = f o g. The backbone g is a feedforward net with
// tanh hidden layers and a sigmoid output producing one probability per
// target; f thresholds each probability at 0.5.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "simfair/types.hpp"

namespace simfair {

template <typename Scalar>
struct Layer {
  Matrix<Scalar> weight;  // fan_in x fan_out
  RowVector<Scalar> bias;  // fan_out
};

// Same shape as a backbone's layers; used for gradients and optimizer moments.
template <typename Scalar>
using LayerTensors = std::vector<Layer<Scalar>>;

template <typename Scalar = double>
class Backbone {
 public:
  Backbone() = default;

  /// Zero-initialized network with the given (input, hidden..., output) widths.
  explicit Backbone(std::vector<Index> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) {
      throw ConfigError("backbone needs at least input and output dimensions");
    }
    for (Index d : dims_) {
      if (d <= 0) throw ConfigError("backbone layer widths must be positive");
    }
    for (std::size_t i = 0; i + 1 < dims_.size(); ++i) {
      layers_.push_back({Matrix<Scalar>::Zero(dims_[i], dims_[i + 1]),
                         RowVector<Scalar>::Zero(dims_[i + 1])});
    }
  }

  const std::vector<Index>& dims() const { return dims_; }
  Index input_dim() const { return dims_.front(); }
  Index output_dim() const { return dims_.back(); }

  LayerTensors<Scalar>& layers() { return layers_; }
  const LayerTensors<Scalar>& layers() const { return layers_; }

  Index parameter_count() const {
    Index n = 0;
    for (std::size_t i = 0; i + 1 < dims_.size(); ++i) n += (dims_[i] + 1) * dims_[i + 1];
    return n;
  }

  friend bool operator==(const Backbone& a, const Backbone& b) {
    if (a.dims_ != b.dims_) return false;
    for (std::size_t i = 0; i < a.layers_.size(); ++i) {
      if (a.layers_[i].weight != b.layers_[i].weight) return false;
      if (a.layers_[i].bias != b.layers_[i].bias) return false;
    }
    return true;
  }

 private:
  std::vector<Index> dims_;
  LayerTensors<Scalar> layers_;
};

template <typename Scalar>
LayerTensors<Scalar> zeros_like(const LayerTensors<Scalar>& layers) {
  LayerTensors<Scalar> out;
  out.reserve(layers.size());
  for (const auto& l : layers) {
    out.push_back({Matrix<Scalar>::Zero(l.weight.rows(), l.weight.cols()),
                   RowVector<Scalar>::Zero(l.bias.size())});
  }
  return out;
}

/// Weights ~ Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
/// Deterministic for a fixed seed (mt19937_64 stream).
template <typename Scalar = double>
Backbone<Scalar> init_backbone(const std::vector<Index>& dims, std::uint64_t seed) {
  Backbone<Scalar> b(dims);
  std::mt19937_64 rng(seed);
  for (auto& layer : b.layers()) {
    const Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(layer.weight.rows()));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Index r = 0; r < layer.weight.rows(); ++r) {
      for (Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = bound * static_cast<Scalar>(dist(rng));
      }
    }
  }
  return b;
}

/// Logistic function kept strictly inside (0, 1).
template <typename Scalar>
Scalar sigmoid(Scalar z) {
  Scalar s;
  if (z >= Scalar(0)) {
    s = Scalar(1) / (Scalar(1) + std::exp(-z));
  } else {
    const Scalar e = std::exp(z);
    s = e / (Scalar(1) + e);
  }
  constexpr Scalar lo = std::numeric_limits<Scalar>::min();
  const Scalar hi = Scalar(1) - std::numeric_limits<Scalar>::epsilon() / Scalar(2);
  return std::clamp(s, lo, hi);
}

/// Activations of every layer for a batch; element 0 is the input and the
/// last element holds the output probabilities.
template <typename Scalar, typename Derived>
std::vector<Matrix<Scalar>> forward_trace(const Backbone<Scalar>& b,
                                          const Eigen::MatrixBase<Derived>& x) {
  if (x.cols() != b.input_dim()) {
    throw DimensionError("forward: expected " + std::to_string(b.input_dim()) +
                         " features, got " + std::to_string(x.cols()));
  }
  std::vector<Matrix<Scalar>> acts;
  acts.reserve(b.layers().size() + 1);
  acts.emplace_back(x.template cast<Scalar>());
  const auto n_layers = b.layers().size();
  for (std::size_t i = 0; i < n_layers; ++i) {
    const auto& layer = b.layers()[i];
    Matrix<Scalar> z = acts.back() * layer.weight;
    z.rowwise() += layer.bias;
    if (i + 1 < n_layers) {
      acts.emplace_back(z.array().tanh().matrix());
    } else {
      acts.emplace_back(z.unaryExpr([](Scalar v) { return sigmoid(v); }));
    }
  }
  return acts;
}

/// Batch of predicted probabilities, one row per sample.
template <typename Scalar, typename Derived>
Matrix<Scalar> forward(const Backbone<Scalar>& b, const Eigen::MatrixBase<Derived>& x) {
  return std::move(forward_trace(b, x).back());
}

/// Elementwise 1(p >= 0.5).
template <typename Derived>
LabelMatrix threshold(const Eigen::MatrixBase<Derived>& probs) {
  using Scalar = typename Derived::Scalar;
  return (probs.array() >= Scalar(0.5)).template cast<std::uint8_t>();
}

template <typename Scalar>
constexpr Scalar kProbClamp = Scalar(1e-7);

/// Binary cross-entropy summed over targets for one sample, with
/// probabilities clamped to [1e-7, 1 - 1e-7].
template <typename Derived>
typename Derived::Scalar bce_loss(const Eigen::MatrixBase<Derived>& p, const LabelVector& y) {
  using Scalar = typename Derived::Scalar;
  require_same_length(p.size(), y.size(), "bce_loss");
  Scalar loss = 0;
  for (Index l = 0; l < p.size(); ++l) {
    const Scalar q = std::clamp(p(l), kProbClamp<Scalar>, Scalar(1) - kProbClamp<Scalar>);
    loss -= y[l] != 0 ? std::log(q) : std::log(Scalar(1) - q);
  }
  return loss;
}

/// Mean over the batch of the per-sample summed BCE.
template <typename Derived>
typename Derived::Scalar batch_bce_loss(const Eigen::MatrixBase<Derived>& probs,
                                        const LabelMatrix& labels) {
  using Scalar = typename Derived::Scalar;
  require_same_length(probs.rows(), labels.rows(), "batch_bce_loss");
  if (probs.rows() == 0) return Scalar(0);
  Scalar total = 0;
  for (Index i = 0; i < probs.rows(); ++i) {
    total += bce_loss(probs.row(i), LabelVector(labels.row(i).transpose()));
  }
  return total / static_cast<Scalar>(probs.rows());
}

/// d(batch_bce_loss)/d(probs). Zero where the clamp is active.
template <typename Derived>
Matrix<typename Derived::Scalar> batch_bce_gradient(const Eigen::MatrixBase<Derived>& probs,
                                                    const LabelMatrix& labels) {
  using Scalar = typename Derived::Scalar;
  require_same_length(probs.rows(), labels.rows(), "batch_bce_gradient");
  require_same_length(probs.cols(), labels.cols(), "batch_bce_gradient");
  Matrix<Scalar> g = Matrix<Scalar>::Zero(probs.rows(), probs.cols());
  if (probs.rows() == 0) return g;
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(probs.rows());
  const Scalar lo = kProbClamp<Scalar>;
  const Scalar hi = Scalar(1) - kProbClamp<Scalar>;
  for (Index i = 0; i < probs.rows(); ++i) {
    for (Index l = 0; l < probs.cols(); ++l) {
      const Scalar q = probs(i, l);
      if (q < lo || q > hi) continue;
      g(i, l) = (labels(i, l) != 0 ? -Scalar(1) / q : Scalar(1) / (Scalar(1) - q)) * inv_n;
    }
  }
  return g;
}

/// Parameter gradients of a scalar loss given dLoss/dprobs for each sample
/// of the batch, using the activations from forward_trace.
template <typename Scalar, typename Derived>
LayerTensors<Scalar> backward(const Backbone<Scalar>& b,
                              const std::vector<Matrix<Scalar>>& trace,
                              const Eigen::MatrixBase<Derived>& grad_probs) {
  const auto n_layers = b.layers().size();
  if (trace.size() != n_layers + 1) throw DimensionError("backward: activation trace size");
  const Matrix<Scalar>& out = trace.back();
  if (grad_probs.rows() != out.rows() || grad_probs.cols() != out.cols()) {
    throw DimensionError("backward: upstream gradient shape mismatch");
  }
  LayerTensors<Scalar> grads = zeros_like(b.layers());
  // Through the sigmoid: dp/dz = p (1 - p).
  Matrix<Scalar> delta =
      (grad_probs.array() * out.array() * (Scalar(1) - out.array())).matrix();
  for (std::size_t i = n_layers; i-- > 0;) {
    const Matrix<Scalar>& input = trace[i];
    grads[i].weight.noalias() = input.transpose() * delta;
    grads[i].bias = delta.colwise().sum();
    if (i > 0) {
      Matrix<Scalar> upstream = delta * b.layers()[i].weight.transpose();
      // Through tanh: 1 - a^2.
      delta = (upstream.array() * (Scalar(1) - input.array().square())).matrix();
    }
  }
  return grads;
}

template <typename Scalar, typename XDerived, typename GDerived>
LayerTensors<Scalar> backward(const Backbone<Scalar>& b, const Eigen::MatrixBase<XDerived>& x,
                              const Eigen::MatrixBase<GDerived>& grad_probs) {
  return backward(b, forward_trace(b, x), grad_probs);
}

// Plain-text model record: "simfair-model <version>", a "dims" line, then one
// block per layer with the weight matrix row-major and the bias vector.
inline constexpr int kModelFormatVersion = 1;

void save_model(std::ostream& os, const Backbone<double>& b);
Backbone<double> load_model(std::istream& is);
void save_model(const std::string& path, const Backbone<double>& b);
Backbone<double> load_model(const std::string& path);

}  // namespace simfair
