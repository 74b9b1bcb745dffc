// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

// Multi-label F1 scores. A 0/0 ratio (no positives, none predicted) counts
// as a perfect 1.

#pragma once

#include "simfair/types.hpp"

namespace simfair {

struct F1Report {
  double micro = 0.0;
  double macro = 0.0;
  double example = 0.0;
};

namespace detail {

inline void check_shapes(const LabelMatrix& truth, const LabelMatrix& pred) {
  if (truth.rows() != pred.rows() || truth.cols() != pred.cols()) {
    throw DimensionError("label matrix shape mismatch");
  }
}

template <typename Scalar>
Scalar f1_ratio(Index tp, Index total) {
  if (total == 0) return Scalar(1);
  return Scalar(2) * static_cast<Scalar>(tp) / static_cast<Scalar>(total);
}

}  // namespace detail

template <typename Scalar = double>
Scalar micro_f1(const LabelMatrix& truth, const LabelMatrix& pred) {
  detail::check_shapes(truth, pred);
  const auto t = truth.cast<Index>();
  const auto p = pred.cast<Index>();
  return detail::f1_ratio<Scalar>(t.cwiseProduct(p).sum(), t.sum() + p.sum());
}

template <typename Scalar = double>
Scalar macro_f1(const LabelMatrix& truth, const LabelMatrix& pred) {
  detail::check_shapes(truth, pred);
  const Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> t = truth.cast<Index>();
  const Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> p = pred.cast<Index>();
  const auto tp = t.cwiseProduct(p).colwise().sum();
  const auto total = (t + p).colwise().sum();
  Scalar acc = 0;
  for (Index l = 0; l < t.cols(); ++l) acc += detail::f1_ratio<Scalar>(tp(l), total(l));
  return t.cols() == 0 ? Scalar(1) : acc / static_cast<Scalar>(t.cols());
}

template <typename Scalar = double>
Scalar example_f1(const LabelMatrix& truth, const LabelMatrix& pred) {
  detail::check_shapes(truth, pred);
  const Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> t = truth.cast<Index>();
  const Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> p = pred.cast<Index>();
  const auto tp = t.cwiseProduct(p).rowwise().sum();
  const auto total = (t + p).rowwise().sum();
  Scalar acc = 0;
  for (Index i = 0; i < t.rows(); ++i) acc += detail::f1_ratio<Scalar>(tp(i), total(i));
  return t.rows() == 0 ? Scalar(1) : acc / static_cast<Scalar>(t.rows());
}

inline F1Report f1_report(const LabelMatrix& truth, const LabelMatrix& pred) {
  return {micro_f1(truth, pred), macro_f1(truth, pred), example_f1(truth, pred)};
}

}  // namespace simfair
