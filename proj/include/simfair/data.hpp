// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "simfair/types.hpp"

namespace simfair {

/// Aligned features, sensitive attribute and labels. Rows are samples.
struct Dataset {
  Matrix<double> X;     // N x M
  GroupVector a;        // N, values in 1..num_groups
  LabelMatrix Y;        // N x L
  int num_groups = 2;   // K
  std::vector<std::string> feature_names;
  std::vector<std::string> target_names;
  std::string sensitive_name = "group";

  Index size() const { return Y.rows(); }
  Index num_features() const { return X.cols(); }
  Index num_targets() const { return Y.cols(); }

  LabelVector label(Index i) const { return Y.row(i).transpose(); }

  /// Rows in the given order.
  Dataset subset(const std::vector<Index>& rows) const;

  /// Throws DataError when columns are misaligned or values out of range.
  void validate() const;

  friend bool operator==(const Dataset& lhs, const Dataset& rhs);
};

// ---------------------------------------------------------------------------
// Splitting and standardization

struct Standardizer {
  RowVector<double> mean;
  RowVector<double> scale;  // 1 for constant columns

  static Standardizer fit(const Matrix<double>& X);
  void apply(Matrix<double>& X) const;
};

struct Split {
  Dataset train;
  Dataset test;
  Standardizer standardizer;
};

/// Seeded shuffle, then the first floor(N * train_fraction) rows train.
/// Features of both parts are standardized with training statistics.
Split split(const Dataset& d, double train_fraction, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Label groups

struct LabelGroup {
  LabelVector label;
  Index count = 0;
};

/// Distinct label vectors by descending count, ties by bitstring ascending.
std::vector<LabelGroup> rank_label_groups(const Dataset& d);

struct Subsample {
  Dataset data;
  bool y_adv_present = true;
  Index advantaged_before = 0;
  Index advantaged_after = 0;
};

/// Keeps ceil(keep_fraction * n_adv) uniformly chosen rows with label y_adv
/// and every other row, preserving row order.
Subsample subsample_advantaged(const Dataset& d, const LabelVector& y_adv, double keep_fraction,
                               std::uint64_t seed);

// ---------------------------------------------------------------------------
// CSV + manifest ingestion

struct FeatureRule {
  std::string column;
  bool onehot = false;
};

struct TargetRule {
  enum class Kind { Binary, OneHot, In };
  std::string column;
  Kind kind = Kind::Binary;
  std::vector<std::string> values;  // Kind::In: values mapped to 1
};

struct SensitiveRule {
  struct Range {
    double lo;
    double hi;
    int group;
  };
  std::string column;
  std::vector<std::pair<std::string, int>> values;
  std::vector<Range> ranges;
  std::optional<int> fallback;  // "*" entry

  std::optional<int> map(const std::string& raw) const;
};

struct Manifest {
  std::filesystem::path csv;
  std::vector<FeatureRule> features;
  SensitiveRule sensitive;
  std::vector<TargetRule> targets;
  std::optional<int> num_groups;
  std::vector<std::string> missing_tokens;
};

/// Parses the `key = value` manifest grammar; relative csv paths resolve
/// against base_dir.
Manifest parse_manifest(std::istream& is, const std::filesystem::path& base_dir = {});
Manifest read_manifest(const std::filesystem::path& path);

/// Throws DataError naming the offending column or row.
Dataset load(const Manifest& manifest);

/// Writes the dataset as CSV plus a manifest that loads it back unchanged.
void export_dataset(const Dataset& d, const std::filesystem::path& csv_path,
                    const std::filesystem::path& manifest_path);

// ---------------------------------------------------------------------------
// Synthetic long-tailed benchmark

struct SynthSpec {
  Index n = 20000;
  Index m = 8;                            // features; column 0 is the group proxy
  Index l = 6;                            // targets
  int k = 2;                              // sensitive groups
  std::vector<double> proportions{0.5, 0.5};
  double top_frequency = 0.85;            // marginal frequency of target 1
  double decay = 1.5;                     // target l has frequency top * l^-decay
  double bias = 1.0;                      // beta
  double group_shift = 2.0;               // mean offset of the proxy feature
  double weight_scale = 3.0;              // norm of each target's weight vector
  Index biased_targets = 1;               // leading targets that carry the group effect
  std::uint64_t seed = 1;

  void validate() const;
};

/// Ground-truth generator: P(y_l = 1 | x, a) = sigmoid(w_l.x + b_l + beta c_{l,a}).
struct SyntheticModel {
  Matrix<double> weight;       // L x M, column 0 is zero
  RowVector<double> offset;    // L
  Matrix<double> group_effect; // L x K
  RowVector<double> shift;     // K, mean of feature 0 per group
  double bias = 0.0;

  RowVector<double> probabilities(const Eigen::Ref<const RowVector<double>>& x, int group) const;
  Matrix<double> probabilities(const Dataset& d) const;
};

SyntheticModel make_synthetic_model(const SynthSpec& spec);
Dataset gen_synthetic(const SynthSpec& spec);

/// Reads SynthSpec keys from `key = value` lines; unknown keys are errors
/// unless listed in `passthrough`, which collects them.
SynthSpec parse_synth_spec(std::istream& is,
                           std::vector<std::pair<std::string, std::string>>* passthrough = nullptr);
void write_synth_spec(std::ostream& os, const SynthSpec& spec);

}  // namespace simfair
