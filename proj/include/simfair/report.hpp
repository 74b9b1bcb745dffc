// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

// JSON records for violation, evaluation and training reports.

#pragma once

#include <string>

#include "json.hpp"
#include "simfair/train.hpp"

namespace simfair {

/// Full-precision decimal ("%.17g"); "undefined" for a missing value.
std::string format_number(double v);
std::string format_optional(const std::optional<double>& v);

/// Flat record: notion, gamma, y_adv, form, violation (number or
/// "undefined"), reference_mean and group_means (null entries when undefined).
nlohmann::ordered_json to_json(const ViolationReport<double>& r);
nlohmann::ordered_json to_json(const F1Report& f1);
nlohmann::ordered_json to_json(const EvalReport& e);
nlohmann::ordered_json to_json(const TrainConfig& c);
nlohmann::ordered_json to_json(const TrainReport& r);

}  // namespace simfair
