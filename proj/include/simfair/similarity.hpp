// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

// Label-space similarity functions s(y, y') in [0, 1].
//
// Constant similarity turns the weighted estimators into demographic-parity
// estimators, Indicator similarity into equalized-opportunity estimators, and
// the Jaccard-exponential kernel exp(gamma * (Jac - 1)) interpolates between
// the two as gamma moves from 0 to infinity.

#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "simfair/types.hpp"

namespace simfair {

enum class SimilarityKind { Constant, Indicator, JaccardExp };

struct SimilaritySpec {
  SimilarityKind kind = SimilarityKind::Constant;
  double gamma = 0.0;

  static SimilaritySpec constant() { return {SimilarityKind::Constant, 0.0}; }
  static SimilaritySpec indicator() { return {SimilarityKind::Indicator, 0.0}; }
  static SimilaritySpec jaccard_exp(double gamma) {
    if (!(gamma >= 0.0)) throw ConfigError("similarity gamma must be >= 0");
    return {SimilarityKind::JaccardExp, gamma};
  }

  friend bool operator==(const SimilaritySpec&, const SimilaritySpec&) = default;
};

inline std::string to_string(const SimilaritySpec& spec) {
  switch (spec.kind) {
    case SimilarityKind::Constant:
      return "constant";
    case SimilarityKind::Indicator:
      return "indicator";
    case SimilarityKind::JaccardExp:
      break;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "jaccard_exp(%.17g)", spec.gamma);
  return buf;
}

/// |cate(y) ∩ cate(y2)| / |cate(y) ∪ cate(y2)| over the indices of 1-bits.
/// Two all-zero vectors are identical and score 1; one all-zero vector
/// against a nonempty one scores 0.
template <typename Scalar = double>
Scalar jaccard(const LabelVector& y, const LabelVector& y2) {
  require_same_length(y.size(), y2.size(), "jaccard");
  Index inter = 0;
  Index uni = 0;
  for (Index l = 0; l < y.size(); ++l) {
    const bool a = y[l] != 0;
    const bool b = y2[l] != 0;
    inter += (a && b) ? 1 : 0;
    uni += (a || b) ? 1 : 0;
  }
  if (uni == 0) return Scalar(1);
  return static_cast<Scalar>(inter) / static_cast<Scalar>(uni);
}

template <typename Scalar = double>
Scalar sim(const SimilaritySpec& spec, const LabelVector& y, const LabelVector& y2) {
  require_same_length(y.size(), y2.size(), "sim");
  switch (spec.kind) {
    case SimilarityKind::Constant:
      return Scalar(1);
    case SimilarityKind::Indicator:
      return y == y2 ? Scalar(1) : Scalar(0);
    case SimilarityKind::JaccardExp:
      break;
  }
  // Underflow to 0 for huge gamma is allowed; estimators treat a zero weight
  // mass as undefined.
  return std::exp(static_cast<Scalar>(spec.gamma) * (jaccard<Scalar>(y, y2) - Scalar(1)));
}

/// Per-sample weights s(labels.row(i), y_adv).
template <typename Scalar = double>
Vector<Scalar> weights_for(const SimilaritySpec& spec, const LabelMatrix& labels,
                           const LabelVector& y_adv) {
  require_same_length(labels.cols(), y_adv.size(), "weights_for");
  Vector<Scalar> w(labels.rows());
  for (Index i = 0; i < labels.rows(); ++i) {
    w[i] = sim<Scalar>(spec, LabelVector(labels.row(i).transpose()), y_adv);
  }
  return w;
}

}  // namespace simfair
