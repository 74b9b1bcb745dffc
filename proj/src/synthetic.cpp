// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

// Long-tailed, group-biased multi-label benchmark.
//
//   a   ~ Categorical(proportions)
//   x_0 ~ N(shift_a, 1)            proxy for a, ignored by the true labels
//   x_j ~ N(0, 1), j >= 1
//   y_l ~ Bernoulli(sigmoid(w_l.x + b_l + beta * c_{l,a}))
//
// c_{l,a} = +-level(a) for the first `biased_targets` targets (random sign per
// target) and 0 otherwise, with level(k) spaced evenly over [-1, 1].
//
// b_l targets a marginal frequency top * l^-decay via the probit
// approximation E[sigmoid(z)] ~ sigmoid(mu / sqrt(1 + pi s^2 / 8)).

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>

#include "simfair/data.hpp"
#include "simfair/kv.hpp"
#include "simfair/model.hpp"

namespace simfair {

namespace {

constexpr const char* kSynthFormat = "simfair-synth/v1";

double centered_level(int k, int num_groups) {
  return 2.0 * static_cast<double>(k - 1) / static_cast<double>(num_groups - 1) - 1.0;
}

}  // namespace

void SynthSpec::validate() const {
  if (n <= 0) throw ConfigError("synthetic spec: n must be positive");
  if (m <= 0) throw ConfigError("synthetic spec: m must be positive");
  if (l <= 0) throw ConfigError("synthetic spec: l must be positive");
  if (k < 2) throw ConfigError("synthetic spec: k must be >= 2");
  if (static_cast<int>(proportions.size()) != k) {
    throw ConfigError("synthetic spec: need one proportion per group");
  }
  double total = 0.0;
  for (double p : proportions) {
    if (!(p >= 0.0)) throw ConfigError("synthetic spec: proportions must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("synthetic spec: proportions must sum to 1");
  if (!(top_frequency > 0.0 && top_frequency < 1.0)) {
    throw ConfigError("synthetic spec: top_frequency must lie in (0, 1)");
  }
  if (!(decay > 0.0)) throw ConfigError("synthetic spec: decay must be positive");
  if (!(bias >= 0.0)) throw ConfigError("synthetic spec: bias must be nonnegative");
  if (!(weight_scale >= 0.0)) throw ConfigError("synthetic spec: weight_scale must be >= 0");
  if (biased_targets < 0 || biased_targets > l) {
    throw ConfigError("synthetic spec: biased_targets must lie in 0..l");
  }
}

RowVector<double> SyntheticModel::probabilities(const Eigen::Ref<const RowVector<double>>& x,
                                                int group) const {
  RowVector<double> z = x * weight.transpose() + offset +
                        bias * group_effect.col(group - 1).transpose();
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

Matrix<double> SyntheticModel::probabilities(const Dataset& d) const {
  Matrix<double> p(d.size(), weight.rows());
  for (Index i = 0; i < d.size(); ++i) p.row(i) = probabilities(d.X.row(i), d.a[i]);
  return p;
}

SyntheticModel make_synthetic_model(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SyntheticModel model;
  model.bias = spec.bias;
  model.weight = Matrix<double>::Zero(spec.l, spec.m);
  for (Index l = 0; l < spec.l; ++l) {
    for (Index j = 1; j < spec.m; ++j) model.weight(l, j) = normal(rng);
    const double norm = model.weight.row(l).norm();
    if (norm > 0.0) model.weight.row(l) *= spec.weight_scale / norm;
  }
  model.offset.resize(spec.l);
  for (Index l = 0; l < spec.l; ++l) {
    const double freq =
        spec.top_frequency * std::pow(static_cast<double>(l + 1), -spec.decay);
    const double s2 = model.weight.row(l).squaredNorm();
    model.offset(l) =
        std::log(freq / (1.0 - freq)) * std::sqrt(1.0 + std::numbers::pi * s2 / 8.0);
  }
  model.group_effect.resize(spec.l, spec.k);
  for (Index l = 0; l < spec.l; ++l) {
    double sign = (rng() & 1U) != 0 ? 1.0 : -1.0;
    if (l >= spec.biased_targets) sign = 0.0;
    for (int k = 1; k <= spec.k; ++k) model.group_effect(l, k - 1) = sign * centered_level(k, spec.k);
  }
  model.shift.resize(spec.k);
  for (int k = 1; k <= spec.k; ++k) model.shift(k - 1) = spec.group_shift * centered_level(k, spec.k);
  return model;
}

Dataset gen_synthetic(const SynthSpec& spec) {
  const SyntheticModel model = make_synthetic_model(spec);
  // Separate stream from the model parameters.
  std::mt19937_64 rng(spec.seed ^ 0x9E3779B97F4A7C15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::discrete_distribution<int> groups(spec.proportions.begin(), spec.proportions.end());

  Dataset d;
  d.num_groups = spec.k;
  d.sensitive_name = "group";
  for (Index j = 0; j < spec.m; ++j) d.feature_names.push_back("x" + std::to_string(j + 1));
  for (Index l = 0; l < spec.l; ++l) d.target_names.push_back("y" + std::to_string(l + 1));
  d.X.resize(spec.n, spec.m);
  d.a.resize(spec.n);
  d.Y.resize(spec.n, spec.l);
  for (Index i = 0; i < spec.n; ++i) {
    const int a = groups(rng) + 1;
    d.a[i] = a;
    d.X(i, 0) = model.shift(a - 1) + normal(rng);
    for (Index j = 1; j < spec.m; ++j) d.X(i, j) = normal(rng);
    const RowVector<double> p = model.probabilities(d.X.row(i), a);
    for (Index l = 0; l < spec.l; ++l) d.Y(i, l) = unif(rng) < p(l) ? 1 : 0;
  }
  return d;
}

SynthSpec parse_synth_spec(std::istream& is,
                           std::vector<std::pair<std::string, std::string>>* passthrough) {
  SynthSpec s;
  bool have_props = false;
  for (const auto& kv : parse_kv(is)) {
    const std::string where = "synthetic spec line " + std::to_string(kv.line);
    if (kv.key == "format") {
      if (kv.value != kSynthFormat) throw ConfigError(where + ": unsupported format");
    } else if (kv.key == "n") {
      s.n = parse_int(kv.value, where);
    } else if (kv.key == "m") {
      s.m = parse_int(kv.value, where);
    } else if (kv.key == "l") {
      s.l = parse_int(kv.value, where);
    } else if (kv.key == "k") {
      s.k = static_cast<int>(parse_int(kv.value, where));
    } else if (kv.key == "proportions") {
      s.proportions.clear();
      for (const auto& p : split_on(kv.value, ',')) s.proportions.push_back(parse_double(p, where));
      have_props = true;
    } else if (kv.key == "top_frequency") {
      s.top_frequency = parse_double(kv.value, where);
    } else if (kv.key == "decay") {
      s.decay = parse_double(kv.value, where);
    } else if (kv.key == "bias") {
      s.bias = parse_double(kv.value, where);
    } else if (kv.key == "group_shift") {
      s.group_shift = parse_double(kv.value, where);
    } else if (kv.key == "weight_scale") {
      s.weight_scale = parse_double(kv.value, where);
    } else if (kv.key == "biased_targets") {
      s.biased_targets = parse_int(kv.value, where);
    } else if (kv.key == "seed") {
      s.seed = static_cast<std::uint64_t>(parse_int(kv.value, where));
    } else if (passthrough != nullptr) {
      passthrough->emplace_back(kv.key, kv.value);
    } else {
      throw ConfigError(where + ": unknown key '" + kv.key + "'");
    }
  }
  if (!have_props) s.proportions.assign(static_cast<std::size_t>(s.k), 1.0 / s.k);
  s.validate();
  return s;
}

void write_synth_spec(std::ostream& os, const SynthSpec& s) {
  auto g = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "format = " << kSynthFormat << '\n'
     << "n = " << s.n << '\n'
     << "m = " << s.m << '\n'
     << "l = " << s.l << '\n'
     << "k = " << s.k << '\n'
     << "proportions = ";
  for (std::size_t i = 0; i < s.proportions.size(); ++i) {
    os << (i ? "," : "") << g(s.proportions[i]);
  }
  os << '\n'
     << "top_frequency = " << g(s.top_frequency) << '\n'
     << "decay = " << g(s.decay) << '\n'
     << "bias = " << g(s.bias) << '\n'
     << "group_shift = " << g(s.group_shift) << '\n'
     << "weight_scale = " << g(s.weight_scale) << '\n'
     << "biased_targets = " << s.biased_targets << '\n'
     << "seed = " << s.seed << '\n';
}

}  // namespace simfair
