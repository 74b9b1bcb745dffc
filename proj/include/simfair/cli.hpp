// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

// Experiment command line: estimate, robustness, train, sweep and gen.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "simfair/data.hpp"
#include "simfair/similarity.hpp"

namespace simfair::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kDataError = 3,
  kRuntimeError = 4,
};

/// Fairness regularizer choice. DP and EOp are the Constant and Indicator
/// similarity specs.
struct Regularizer {
  enum class Kind { None, DP, EOp, SimFair };
  Kind kind = Kind::None;
  double gamma = 0.0;  // SimFair only

  std::optional<SimilaritySpec> spec() const;
  std::string name() const;  // "none", "dp", "eop", "simfair:<gamma>"
};

/// Accepts none, dp, eop, simfair and simfair:<gamma>. A bare "simfair"
/// takes its gamma from `gamma`, which is an error for the other kinds.
Regularizer parse_regularizer(const std::string& text, std::optional<double> gamma = {});

/// Advantaged label selector: an explicit bitstring, rank:<k> (1 = most
/// frequent), rank:last, or smallest:<n> (least frequent group with at
/// least n samples).
LabelVector resolve_y_adv(const std::string& selector, const Dataset& reference);

struct RunSpec {
  std::string command;
  std::string manifest;
  std::string synth;
  std::vector<Regularizer> regularizers;
  std::vector<double> lambdas;
  std::vector<double> gammas{0.1, 0.5, 1.0, 5.0, 10.0};
  std::vector<double> keep_fractions{1.0, 0.7, 0.3, 0.1, 0.05};
  std::string y_adv = "rank:1";
  int replications = 1;
  std::uint64_t seed = 1;
  std::optional<int> epochs;
  double train_fraction = 0.7;
  std::string out = "simfair";
  std::string model;  // estimate/robustness: load instead of training
};

/// Parses argv and runs the subcommand. Returns an ExitCode.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace simfair::cli
