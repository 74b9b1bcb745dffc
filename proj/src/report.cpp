// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

#include "simfair/report.hpp"

#include <cstdio>

namespace simfair {

using nlohmann::ordered_json;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string("undefined");
}

namespace {

ordered_json row_json(const RowVector<double>& v) {
  ordered_json arr = ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

const char* similarity_name(const SimilaritySpec& s) {
  switch (s.kind) {
    case SimilarityKind::Constant:
      return "constant";
    case SimilarityKind::Indicator:
      return "indicator";
    case SimilarityKind::JaccardExp:
      return "jaccard_exp";
  }
  return "?";
}

}  // namespace

ordered_json to_json(const ViolationReport<double>& r) {
  ordered_json j;
  j["notion"] = to_string(r.notion);
  j["similarity"] = similarity_name(r.spec);
  if (r.spec.kind == SimilarityKind::JaccardExp) {
    j["gamma"] = r.spec.gamma;
  } else {
    j["gamma"] = nullptr;
  }
  j["y_adv"] = r.y_adv ? ordered_json(to_bitstring(*r.y_adv)) : ordered_json(nullptr);
  j["form"] = to_string(r.form);
  j["violation"] = r.violation ? ordered_json(*r.violation) : ordered_json("undefined");
  j["reference_mean"] = r.reference_mean ? row_json(*r.reference_mean) : ordered_json(nullptr);
  ordered_json groups = ordered_json::array();
  for (const auto& m : r.group_means) groups.push_back(m ? row_json(*m) : ordered_json(nullptr));
  j["group_means"] = std::move(groups);
  return j;
}

ordered_json to_json(const F1Report& f1) {
  return {{"micro", f1.micro}, {"macro", f1.macro}, {"example", f1.example}};
}

ordered_json to_json(const EvalReport& e) {
  ordered_json j;
  j["f1"] = to_json(e.f1);
  j["dp"] = to_json(e.dp);
  j["eop"] = e.eop ? to_json(*e.eop) : ordered_json(nullptr);
  ordered_json sf = ordered_json::array();
  for (const auto& r : e.simfair) sf.push_back(to_json(r));
  j["simfair"] = std::move(sf);
  return j;
}

ordered_json to_json(const TrainConfig& c) {
  ordered_json j;
  j["lambda"] = c.lambda;
  if (c.spec) {
    j["similarity"] = similarity_name(*c.spec);
    j["gamma"] = c.spec->kind == SimilarityKind::JaccardExp ? ordered_json(c.spec->gamma)
                                                            : ordered_json(nullptr);
  } else {
    j["similarity"] = nullptr;
    j["gamma"] = nullptr;
  }
  j["y_adv"] = c.y_adv.size() > 0 ? ordered_json(to_bitstring(c.y_adv)) : ordered_json(nullptr);
  j["form"] = to_string(c.form);
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["max_grad_norm"] = c.max_grad_norm;
  j["hidden"] = c.hidden;
  j["seed"] = c.seed;
  return j;
}

ordered_json to_json(const TrainReport& r) {
  ordered_json j;
  j["config"] = to_json(r.config);
  j["seed"] = r.config.seed;
  j["steps"] = r.steps;
  j["skipped_penalty_batches"] = r.skipped_penalty_batches;
  j["epoch_loss"] = r.epoch_loss;
  j["epoch_bce"] = r.epoch_bce;
  j["test"] = r.test ? to_json(*r.test) : ordered_json(nullptr);
  return j;
}

}  // namespace simfair
