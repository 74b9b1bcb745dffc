// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "simfair/data.hpp"

namespace simfair {

Dataset Dataset::subset(const std::vector<Index>& rows) const {
  Dataset out;
  out.num_groups = num_groups;
  out.feature_names = feature_names;
  out.target_names = target_names;
  out.sensitive_name = sensitive_name;
  const auto n = static_cast<Index>(rows.size());
  out.X.resize(n, X.cols());
  out.a.resize(n);
  out.Y.resize(n, Y.cols());
  for (Index i = 0; i < n; ++i) {
    const Index r = rows[static_cast<std::size_t>(i)];
    out.X.row(i) = X.row(r);
    out.a[i] = a[r];
    out.Y.row(i) = Y.row(r);
  }
  return out;
}

void Dataset::validate() const {
  const Index n = Y.rows();
  if (X.rows() != n || a.size() != n) {
    throw DataError("dataset columns are not aligned: X has " + std::to_string(X.rows()) +
                    " rows, a has " + std::to_string(a.size()) + ", Y has " +
                    std::to_string(n));
  }
  if (num_groups < 2) throw DataError("dataset needs K >= 2 sensitive groups");
  if (!feature_names.empty() && static_cast<Index>(feature_names.size()) != X.cols()) {
    throw DataError("feature name count does not match feature columns");
  }
  if (!target_names.empty() && static_cast<Index>(target_names.size()) != Y.cols()) {
    throw DataError("target name count does not match target columns");
  }
  for (Index i = 0; i < n; ++i) {
    if (a[i] < 1 || a[i] > num_groups) {
      throw DataError("row " + std::to_string(i) + ": sensitive value " + std::to_string(a[i]) +
                      " outside 1.." + std::to_string(num_groups));
    }
  }
  if ((Y.array() > 1).any()) throw DataError("labels must be 0/1");
}

bool operator==(const Dataset& lhs, const Dataset& rhs) {
  auto same_shape = [](const auto& x, const auto& y) {
    return x.rows() == y.rows() && x.cols() == y.cols();
  };
  return lhs.num_groups == rhs.num_groups && lhs.feature_names == rhs.feature_names &&
         lhs.target_names == rhs.target_names && lhs.sensitive_name == rhs.sensitive_name &&
         same_shape(lhs.X, rhs.X) && same_shape(lhs.Y, rhs.Y) && lhs.a.size() == rhs.a.size() &&
         lhs.X == rhs.X && lhs.Y == rhs.Y && lhs.a == rhs.a;
}

Standardizer Standardizer::fit(const Matrix<double>& X) {
  Standardizer s;
  const Index n = X.rows();
  s.mean = RowVector<double>::Zero(X.cols());
  s.scale = RowVector<double>::Ones(X.cols());
  if (n == 0) return s;
  s.mean = X.colwise().mean();
  for (Index c = 0; c < X.cols(); ++c) {
    const double var = (X.col(c).array() - s.mean(c)).square().sum() / static_cast<double>(n);
    const double sd = std::sqrt(var);
    s.scale(c) = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

void Standardizer::apply(Matrix<double>& X) const {
  X.rowwise() -= mean;
  X.array().rowwise() /= scale.array();
}

Split split(const Dataset& d, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie strictly between 0 and 1");
  }
  const Index n = d.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train =
      static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction));
  Split s;
  s.train = d.subset({order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train)});
  s.test = d.subset({order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end()});
  s.standardizer = Standardizer::fit(s.train.X);
  s.standardizer.apply(s.train.X);
  s.standardizer.apply(s.test.X);
  return s;
}

std::vector<LabelGroup> rank_label_groups(const Dataset& d) {
  std::map<std::string, Index> counts;
  for (Index i = 0; i < d.size(); ++i) ++counts[to_bitstring(d.label(i))];
  std::vector<std::pair<std::string, Index>> items(counts.begin(), counts.end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  std::vector<LabelGroup> out;
  out.reserve(items.size());
  for (const auto& [bits, count] : items) out.push_back({from_bitstring(bits), count});
  return out;
}

Subsample subsample_advantaged(const Dataset& d, const LabelVector& y_adv, double keep_fraction,
                               std::uint64_t seed) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw ConfigError("keep fraction must lie in (0, 1]");
  }
  require_same_length(d.num_targets(), y_adv.size(), "subsample_advantaged");
  std::vector<Index> adv;
  for (Index i = 0; i < d.size(); ++i) {
    if (d.Y.row(i) == y_adv.transpose()) adv.push_back(i);
  }
  Subsample out;
  out.advantaged_before = static_cast<Index>(adv.size());
  out.y_adv_present = !adv.empty();
  // Guard the ceiling against representation error, e.g. 0.05 * 1000.
  const double target = keep_fraction * static_cast<double>(adv.size());
  auto keep = static_cast<std::size_t>(std::ceil(target - 1e-9));
  keep = std::min(keep, adv.size());
  out.advantaged_after = static_cast<Index>(keep);

  std::mt19937_64 rng(seed);
  std::shuffle(adv.begin(), adv.end(), rng);
  std::vector<bool> drop(static_cast<std::size_t>(d.size()), false);
  for (std::size_t j = keep; j < adv.size(); ++j) drop[static_cast<std::size_t>(adv[j])] = true;

  std::vector<Index> rows;
  rows.reserve(static_cast<std::size_t>(d.size()));
  for (Index i = 0; i < d.size(); ++i) {
    if (!drop[static_cast<std::size_t>(i)]) rows.push_back(i);
  }
  out.data = d.subset(rows);
  return out;
}

}  // namespace simfair
