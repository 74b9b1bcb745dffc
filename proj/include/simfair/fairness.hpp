// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

// Finite-sample estimators of (similarity-weighted) group-conditional mean
// predictions and the resulting fairness violations.
//
// For weights w_i = s(y_i, y_adv):
//   overall mean  m   = sum_i w_i p_i / sum_i w_i
//   group mean    m_k = sum_{i: a_i = k} w_i p_i / sum_{i: a_i = k} w_i
// and the violation is either
//   pairwise (K = 2):     || m_1 - m_2 ||
//   sum over groups:      sum_k || m - m_k ||
// Any zero denominator leaves the violation undefined.

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "simfair/similarity.hpp"
#include "simfair/types.hpp"

namespace simfair {

enum class Notion { DP, EOp, SimFair };

enum class ViolationForm {
  Auto,           // Pairwise when K == 2, SumOverGroups otherwise
  Pairwise,       // || m_1 - m_2 ||, K == 2 only
  SumOverGroups,  // sum_k || m - m_k ||
};

inline const char* to_string(Notion n) {
  switch (n) {
    case Notion::DP:
      return "dp";
    case Notion::EOp:
      return "eop";
    case Notion::SimFair:
      return "simfair";
  }
  return "?";
}

inline const char* to_string(ViolationForm f) {
  switch (f) {
    case ViolationForm::Auto:
      return "auto";
    case ViolationForm::Pairwise:
      return "pairwise";
    case ViolationForm::SumOverGroups:
      return "sum";
  }
  return "?";
}

template <typename Scalar>
struct ViolationReport {
  Notion notion = Notion::SimFair;
  SimilaritySpec spec;
  std::optional<LabelVector> y_adv;
  ViolationForm form = ViolationForm::Pairwise;
  // Index k-1 holds the mean for group k; nullopt when its weight mass is 0.
  std::vector<std::optional<RowVector<Scalar>>> group_means;
  std::optional<RowVector<Scalar>> reference_mean;
  std::optional<Scalar> violation;

  bool defined() const { return violation.has_value(); }
};

namespace detail {

inline ViolationForm resolve_form(ViolationForm form, int num_groups) {
  if (num_groups < 2) throw ConfigError("number of sensitive groups K must be >= 2");
  if (form == ViolationForm::Auto) {
    return num_groups == 2 ? ViolationForm::Pairwise : ViolationForm::SumOverGroups;
  }
  if (form == ViolationForm::Pairwise && num_groups != 2) {
    throw ConfigError("pairwise violation form requires K == 2");
  }
  return form;
}

inline void check_groups(const GroupVector& sensitive, int num_groups) {
  for (Index i = 0; i < sensitive.size(); ++i) {
    if (sensitive[i] < 1 || sensitive[i] > num_groups) {
      throw DimensionError("sensitive value " + std::to_string(sensitive[i]) +
                           " outside 1.." + std::to_string(num_groups));
    }
  }
}

template <typename Scalar>
struct GroupSums {
  RowVector<Scalar> overall_num;
  Scalar overall_den = 0;
  std::vector<RowVector<Scalar>> num;
  std::vector<Scalar> den;
};

// Single ascending pass; zero weights are skipped so that 0/1 weights reduce
// to plain filtered sums.
template <typename Scalar, typename Probs, typename Weights>
GroupSums<Scalar> accumulate(const Probs& probs, const GroupVector& sensitive,
                             const Weights& weights, int num_groups) {
  const Index L = probs.cols();
  GroupSums<Scalar> s;
  s.overall_num = RowVector<Scalar>::Zero(L);
  s.num.assign(static_cast<std::size_t>(num_groups), RowVector<Scalar>::Zero(L));
  s.den.assign(static_cast<std::size_t>(num_groups), Scalar(0));
  for (Index i = 0; i < probs.rows(); ++i) {
    const Scalar w = weights(i);
    if (w == Scalar(0)) continue;
    const auto k = static_cast<std::size_t>(sensitive[i] - 1);
    s.overall_num += w * probs.row(i);
    s.overall_den += w;
    s.num[k] += w * probs.row(i);
    s.den[k] += w;
  }
  return s;
}

template <typename Scalar>
ViolationReport<Scalar> finish(const GroupSums<Scalar>& s, ViolationForm form) {
  ViolationReport<Scalar> r;
  r.form = form;
  if (s.overall_den > Scalar(0)) r.reference_mean = s.overall_num / s.overall_den;
  for (std::size_t k = 0; k < s.num.size(); ++k) {
    if (s.den[k] > Scalar(0)) {
      r.group_means.emplace_back(s.num[k] / s.den[k]);
    } else {
      r.group_means.emplace_back(std::nullopt);
    }
  }
  if (form == ViolationForm::Pairwise) {
    if (r.group_means[0] && r.group_means[1]) {
      r.violation = (*r.group_means[0] - *r.group_means[1]).norm();
    }
    return r;
  }
  if (!r.reference_mean) return r;
  Scalar total = 0;
  for (const auto& m : r.group_means) {
    if (!m) return r;
    total += (*r.reference_mean - *m).norm();
  }
  r.violation = total;
  return r;
}

template <typename Probs>
void validate(const Probs& probs, const GroupVector& sensitive, int num_groups) {
  if (num_groups < 2) throw ConfigError("number of sensitive groups K must be >= 2");
  require_same_length(probs.rows(), sensitive.size(), "sensitive attributes");
  check_groups(sensitive, num_groups);
}

}  // namespace detail

/// sum_i w_i p_i / sum_i w_i, or nullopt when the weights sum to zero.
template <typename Derived, typename WDerived>
std::optional<RowVector<typename Derived::Scalar>> weighted_overall_mean(
    const Eigen::MatrixBase<Derived>& probs, const Eigen::MatrixBase<WDerived>& weights) {
  using Scalar = typename Derived::Scalar;
  require_same_length(probs.rows(), weights.size(), "weighted_overall_mean");
  RowVector<Scalar> num = RowVector<Scalar>::Zero(probs.cols());
  Scalar den = 0;
  for (Index i = 0; i < probs.rows(); ++i) {
    if (weights[i] < Scalar(0)) throw std::invalid_argument("negative sample weight");
    if (weights[i] == Scalar(0)) continue;
    num += weights[i] * probs.row(i);
    den += weights[i];
  }
  if (!(den > Scalar(0))) return std::nullopt;
  return RowVector<Scalar>(num / den);
}

/// Weighted mean restricted to samples with sensitive value k (1-based).
template <typename Derived, typename WDerived>
std::optional<RowVector<typename Derived::Scalar>> weighted_group_mean(
    const Eigen::MatrixBase<Derived>& probs, const GroupVector& sensitive, int k,
    const Eigen::MatrixBase<WDerived>& weights) {
  using Scalar = typename Derived::Scalar;
  require_same_length(probs.rows(), sensitive.size(), "weighted_group_mean");
  require_same_length(probs.rows(), weights.size(), "weighted_group_mean");
  if (k < 1) throw std::invalid_argument("group index must be >= 1");
  Vector<Scalar> masked = weights;
  for (Index i = 0; i < masked.size(); ++i) {
    if (sensitive[i] != k) masked[i] = Scalar(0);
  }
  return weighted_overall_mean(probs, masked);
}

/// Violation for arbitrary per-sample weights. The caller fills in notion,
/// spec and y_adv.
template <typename Derived, typename WDerived>
ViolationReport<typename Derived::Scalar> violation_from_weights(
    const Eigen::MatrixBase<Derived>& probs, const GroupVector& sensitive,
    const Eigen::MatrixBase<WDerived>& weights, int num_groups,
    ViolationForm form = ViolationForm::Auto) {
  using Scalar = typename Derived::Scalar;
  detail::validate(probs, sensitive, num_groups);
  require_same_length(probs.rows(), weights.size(), "weights");
  form = detail::resolve_form(form, num_groups);
  return detail::finish(detail::accumulate<Scalar>(probs, sensitive, weights, num_groups),
                        form);
}

template <typename Derived>
ViolationReport<typename Derived::Scalar> simfair_violation(
    const Eigen::MatrixBase<Derived>& probs, const GroupVector& sensitive,
    const LabelMatrix& labels, const LabelVector& y_adv, const SimilaritySpec& spec,
    int num_groups, ViolationForm form = ViolationForm::Auto) {
  using Scalar = typename Derived::Scalar;
  require_same_length(probs.rows(), labels.rows(), "labels");
  require_same_length(probs.cols(), labels.cols(), "label width");
  const Vector<Scalar> w = weights_for<Scalar>(spec, labels, y_adv);
  auto r = violation_from_weights(probs, sensitive, w, num_groups, form);
  r.notion = Notion::SimFair;
  r.spec = spec;
  r.y_adv = y_adv;
  return r;
}

/// Demographic parity through the hard-conditioned estimators
/// E[p | a=k] ~ sum_{a_i=k} p_i / #{a_i=k}, independent of the weight path.
template <typename Derived>
ViolationReport<typename Derived::Scalar> dp_violation(const Eigen::MatrixBase<Derived>& probs,
                                                       const GroupVector& sensitive,
                                                       int num_groups,
                                                       ViolationForm form = ViolationForm::Auto) {
  using Scalar = typename Derived::Scalar;
  detail::validate(probs, sensitive, num_groups);
  form = detail::resolve_form(form, num_groups);
  detail::GroupSums<Scalar> s;
  const Index L = probs.cols();
  s.overall_num = RowVector<Scalar>::Zero(L);
  s.num.assign(static_cast<std::size_t>(num_groups), RowVector<Scalar>::Zero(L));
  std::vector<Index> count(static_cast<std::size_t>(num_groups), 0);
  for (Index i = 0; i < probs.rows(); ++i) {
    const auto k = static_cast<std::size_t>(sensitive[i] - 1);
    s.overall_num += probs.row(i);
    s.num[k] += probs.row(i);
    ++count[k];
  }
  s.overall_den = static_cast<Scalar>(probs.rows());
  for (Index c : count) s.den.push_back(static_cast<Scalar>(c));
  auto r = detail::finish(s, form);
  r.notion = Notion::DP;
  r.spec = SimilaritySpec::constant();
  return r;
}

/// Equalized opportunity on the advantaged label group y_adv, estimated only
/// from samples whose label equals y_adv.
template <typename Derived>
ViolationReport<typename Derived::Scalar> eop_violation(const Eigen::MatrixBase<Derived>& probs,
                                                        const GroupVector& sensitive,
                                                        const LabelMatrix& labels,
                                                        const LabelVector& y_adv, int num_groups,
                                                        ViolationForm form = ViolationForm::Auto) {
  using Scalar = typename Derived::Scalar;
  detail::validate(probs, sensitive, num_groups);
  require_same_length(probs.rows(), labels.rows(), "labels");
  require_same_length(labels.cols(), y_adv.size(), "y_adv");
  form = detail::resolve_form(form, num_groups);
  detail::GroupSums<Scalar> s;
  const Index L = probs.cols();
  s.overall_num = RowVector<Scalar>::Zero(L);
  s.num.assign(static_cast<std::size_t>(num_groups), RowVector<Scalar>::Zero(L));
  std::vector<Index> count(static_cast<std::size_t>(num_groups), 0);
  Index total = 0;
  for (Index i = 0; i < probs.rows(); ++i) {
    if (labels.row(i) != y_adv.transpose()) continue;
    const auto k = static_cast<std::size_t>(sensitive[i] - 1);
    s.overall_num += probs.row(i);
    s.num[k] += probs.row(i);
    ++count[k];
    ++total;
  }
  s.overall_den = static_cast<Scalar>(total);
  for (Index c : count) s.den.push_back(static_cast<Scalar>(c));
  auto r = detail::finish(s, form);
  r.notion = Notion::EOp;
  r.spec = SimilaritySpec::indicator();
  r.y_adv = y_adv;
  return r;
}

/// d(violation)/d(p_i) for every sample, given a defined report computed
/// from the same probs/weights. Norm terms with a zero difference contribute
/// the zero subgradient.
template <typename Derived, typename WDerived>
Matrix<typename Derived::Scalar> violation_gradient_from_weights(
    const Eigen::MatrixBase<Derived>& probs, const GroupVector& sensitive,
    const Eigen::MatrixBase<WDerived>& weights,
    const ViolationReport<typename Derived::Scalar>& report) {
  using Scalar = typename Derived::Scalar;
  if (!report.defined()) throw std::logic_error("gradient of an undefined violation");
  const Index N = probs.rows();
  const Index L = probs.cols();
  const auto K = report.group_means.size();
  Matrix<Scalar> grad = Matrix<Scalar>::Zero(N, L);

  auto unit = [](const RowVector<Scalar>& d) -> RowVector<Scalar> {
    const Scalar n = d.norm();
    if (n == Scalar(0)) return RowVector<Scalar>::Zero(d.size());
    return d / n;
  };

  std::vector<Scalar> den(K, Scalar(0));
  Scalar overall_den = 0;
  for (Index i = 0; i < N; ++i) {
    den[static_cast<std::size_t>(sensitive[i] - 1)] += weights[i];
    overall_den += weights[i];
  }

  // Coefficient of the group-k mean in the scalar violation, as a direction.
  std::vector<RowVector<Scalar>> group_dir(K, RowVector<Scalar>::Zero(L));
  RowVector<Scalar> overall_dir = RowVector<Scalar>::Zero(L);
  if (report.form == ViolationForm::Pairwise) {
    const RowVector<Scalar> u = unit(*report.group_means[0] - *report.group_means[1]);
    group_dir[0] = u;
    group_dir[1] = -u;
  } else {
    for (std::size_t k = 0; k < K; ++k) {
      const RowVector<Scalar> u = unit(*report.reference_mean - *report.group_means[k]);
      overall_dir += u;
      group_dir[k] = -u;
    }
  }

  for (Index i = 0; i < N; ++i) {
    const Scalar w = weights[i];
    if (w == Scalar(0)) continue;
    const auto k = static_cast<std::size_t>(sensitive[i] - 1);
    grad.row(i) = (w / den[k]) * group_dir[k];
    if (report.form == ViolationForm::SumOverGroups) {
      grad.row(i) += (w / overall_den) * overall_dir;
    }
  }
  return grad;
}

/// Analytic gradient of simfair_violation with respect to every predicted
/// probability. Returns nullopt when the violation is undefined; a zero
/// violation sits on the kink of the norm and is rejected.
template <typename Derived>
std::optional<Matrix<typename Derived::Scalar>> violation_gradient(
    const Eigen::MatrixBase<Derived>& probs, const GroupVector& sensitive,
    const LabelMatrix& labels, const LabelVector& y_adv, const SimilaritySpec& spec,
    int num_groups, ViolationForm form = ViolationForm::Auto) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar> w = weights_for<Scalar>(spec, labels, y_adv);
  const auto report = violation_from_weights(probs, sensitive, w, num_groups, form);
  if (!report.defined()) return std::nullopt;
  if (*report.violation == Scalar(0)) {
    throw std::domain_error("violation gradient requested at zero violation");
  }
  return violation_gradient_from_weights(probs, sensitive, w, report);
}

}  // namespace simfair
