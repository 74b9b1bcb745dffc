// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

#include "simfair/cli.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "simfair/kv.hpp"
#include "simfair/report.hpp"
#include "simfair/train.hpp"

namespace simfair::cli {

using nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "simfair/v1";

std::string g_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::optional<SimilaritySpec> Regularizer::spec() const {
  switch (kind) {
    case Kind::None:
      return std::nullopt;
    case Kind::DP:
      return SimilaritySpec::constant();
    case Kind::EOp:
      return SimilaritySpec::indicator();
    case Kind::SimFair:
      return SimilaritySpec::jaccard_exp(gamma);
  }
  return std::nullopt;
}

std::string Regularizer::name() const {
  switch (kind) {
    case Kind::None:
      return "none";
    case Kind::DP:
      return "dp";
    case Kind::EOp:
      return "eop";
    case Kind::SimFair:
      return "simfair:" + g_number(gamma);
  }
  return "?";
}

Regularizer parse_regularizer(const std::string& text, std::optional<double> gamma) {
  const std::string t = trim(text);
  Regularizer r;
  if (t == "none" || t == "dp" || t == "eop") {
    if (gamma) throw ConfigError("--gamma applies only to the simfair regularizer");
    r.kind = t == "none" ? Regularizer::Kind::None
             : t == "dp" ? Regularizer::Kind::DP
                         : Regularizer::Kind::EOp;
    return r;
  }
  r.kind = Regularizer::Kind::SimFair;
  if (t == "simfair") {
    if (!gamma) throw ConfigError("the simfair regularizer needs a gamma (--gamma or simfair:<g>)");
    r.gamma = *gamma;
  } else if (t.rfind("simfair:", 0) == 0) {
    r.gamma = parse_double(t.substr(8), "regularizer gamma");
  } else {
    throw ConfigError("unknown regularizer '" + t + "' (none, dp, eop, simfair[:gamma])");
  }
  if (!(r.gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
  return r;
}

LabelVector resolve_y_adv(const std::string& selector, const Dataset& reference) {
  const auto groups = rank_label_groups(reference);
  if (groups.empty()) throw ConfigError("cannot resolve y_adv on an empty dataset");
  if (selector.rfind("rank:", 0) == 0) {
    const std::string arg = selector.substr(5);
    if (arg == "last") return groups.back().label;
    const long long k = parse_int(arg, "y_adv rank");
    if (k < 1 || static_cast<std::size_t>(k) > groups.size()) {
      throw ConfigError("y_adv rank " + arg + " outside 1.." + std::to_string(groups.size()));
    }
    return groups[static_cast<std::size_t>(k - 1)].label;
  }
  if (selector.rfind("smallest:", 0) == 0) {
    const long long n = parse_int(selector.substr(9), "y_adv minimum count");
    for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
      if (it->count >= n) return it->label;
    }
    throw ConfigError("no label group has at least " + std::to_string(n) + " samples");
  }
  const LabelVector y = from_bitstring(selector);
  if (y.size() != reference.num_targets()) {
    throw ConfigError("y_adv '" + selector + "' has " + std::to_string(y.size()) +
                      " targets, dataset has " + std::to_string(reference.num_targets()));
  }
  return y;
}

namespace {

// ---------------------------------------------------------------------------
// Output helpers

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns)
      : out_(path), path_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path);
    out_ << "# schema=" << kSchema << '\n';
    write(columns);
  }

  void write(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
    ++rows_;
  }

  std::size_t data_rows() const { return rows_ - 1; }
  const std::string& path() const { return path_; }

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t rows_ = 0;
};

void write_json(const std::string& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

std::string num(double v) { return format_number(v); }

std::string num(const std::optional<double>& v) { return format_optional(v); }

// ---------------------------------------------------------------------------
// Dataset and spec plumbing

struct Loaded {
  Split split;
  ordered_json source;
};

Loaded load_data(const RunSpec& rs) {
  Dataset d;
  ordered_json source;
  if (!rs.manifest.empty()) {
    d = load(read_manifest(rs.manifest));
    source = {{"manifest", rs.manifest}};
  } else {
    std::ifstream in(rs.synth);
    if (!in) throw ConfigError("cannot open synthetic spec " + rs.synth);
    std::vector<std::pair<std::string, std::string>> ignored;
    d = gen_synthetic(parse_synth_spec(in, &ignored));
    source = {{"synth", rs.synth}};
  }
  source["rows"] = d.size();
  source["features"] = d.num_features();
  source["targets"] = d.num_targets();
  source["groups"] = d.num_groups;
  return {split(d, rs.train_fraction, rs.seed), std::move(source)};
}

TrainConfig make_config(const RunSpec& rs, const Regularizer& reg, double lambda,
                        const LabelVector& y_adv, std::uint64_t seed) {
  TrainConfig c;
  c.seed = seed;
  c.spec = reg.spec();
  c.lambda = reg.kind == Regularizer::Kind::None ? 0.0 : lambda;
  if (c.spec) c.y_adv = y_adv;
  if (rs.epochs) c.epochs = *rs.epochs;
  return c;
}

TrainResult train_logged(const Dataset& train_set, const TrainConfig& config,
                         const std::string& label, std::ostream& err) {
  auto result = train(train_set, config);
  if (result.report.skipped_penalty_batches > 0) {
    err << "note: " << label << ": " << result.report.skipped_penalty_batches << " of "
        << result.report.steps
        << " batches skipped the penalty (violation undefined on the batch)\n";
  }
  return result;
}

ordered_json meta(const RunSpec& rs, const Loaded& data, const LabelVector& y_adv) {
  ordered_json j;
  j["schema"] = kSchema;
  j["command"] = rs.command;
  j["source"] = data.source;
  j["train_rows"] = data.split.train.size();
  j["test_rows"] = data.split.test.size();
  j["train_fraction"] = rs.train_fraction;
  j["y_adv_selector"] = rs.y_adv;
  j["y_adv"] = to_bitstring(y_adv);
  j["seed"] = rs.seed;
  j["replications"] = rs.replications;
  if (rs.epochs) j["epochs"] = *rs.epochs;
  return j;
}

Backbone<double> model_for(const RunSpec& rs, const Loaded& data, std::uint64_t seed,
                           std::ostream& err) {
  if (!rs.model.empty()) {
    auto b = load_model(rs.model);
    if (b.input_dim() != data.split.train.num_features() ||
        b.output_dim() != data.split.train.num_targets()) {
      throw ConfigError("model " + rs.model + " does not match the dataset dimensions");
    }
    return b;
  }
  return train_logged(data.split.train, make_config(rs, {}, 0.0, {}, seed), "unregularized",
                      err)
      .model;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_estimate(const RunSpec& rs, std::ostream& out, std::ostream& err) {
  const auto data = load_data(rs);
  const LabelVector y_adv = resolve_y_adv(rs.y_adv, data.split.train);
  const Dataset& test = data.split.test;
  const std::string adv = to_bitstring(y_adv);
  CsvWriter csv(rs.out + ".csv",
                {"replication", "seed", "estimator", "gamma", "y_adv", "violation"});
  const int reps = rs.model.empty() ? rs.replications : 1;
  for (int r = 0; r < reps; ++r) {
    const std::uint64_t seed = rs.seed + static_cast<std::uint64_t>(r);
    const auto probs = forward(model_for(rs, data, seed, err), test.X);
    const auto report = evaluate_probs(probs, test, y_adv, rs.gammas);
    const std::string rep = std::to_string(r);
    const std::string sd = std::to_string(seed);
    csv.write({rep, sd, "dp", "", adv, num(report.dp.violation)});
    for (std::size_t g = 0; g < rs.gammas.size(); ++g) {
      csv.write({rep, sd, "simfair", num(rs.gammas[g]), adv, num(report.simfair[g].violation)});
    }
    csv.write({rep, sd, "eop", "", adv, num(report.eop->violation)});
  }
  auto m = meta(rs, data, y_adv);
  m["gammas"] = rs.gammas;
  m["model"] = rs.model.empty() ? ordered_json(nullptr) : ordered_json(rs.model);
  m["rows"] = csv.data_rows();
  write_json(rs.out + ".meta.json", m);
  out << "wrote " << csv.path() << " (" << csv.data_rows() << " rows)\n";
  return kOk;
}

int cmd_robustness(const RunSpec& rs, std::ostream& out, std::ostream& err) {
  const auto data = load_data(rs);
  const LabelVector y_adv = resolve_y_adv(rs.y_adv, data.split.train);
  const std::string adv = to_bitstring(y_adv);
  const auto model = model_for(rs, data, rs.seed, err);
  CsvWriter csv(rs.out + ".csv", {"keep_fraction", "replication", "seed", "advantaged_kept",
                                  "estimator", "gamma", "y_adv", "violation"});
  for (double keep : rs.keep_fractions) {
    for (int r = 0; r < rs.replications; ++r) {
      const std::uint64_t seed = rs.seed + static_cast<std::uint64_t>(r);
      const auto sub = subsample_advantaged(data.split.test, y_adv, keep, seed);
      if (!sub.y_adv_present) err << "warning: y_adv " << adv << " absent from the test split\n";
      const auto report = evaluate(model, sub.data, y_adv, rs.gammas);
      const std::vector<std::string> head{num(keep), std::to_string(r), std::to_string(seed),
                                          std::to_string(sub.advantaged_after)};
      auto row = [&](const std::string& est, const std::string& gamma,
                     const std::optional<double>& v) {
        std::vector<std::string> cells = head;
        cells.insert(cells.end(), {est, gamma, adv, num(v)});
        csv.write(cells);
      };
      row("dp", "", report.dp.violation);
      for (std::size_t g = 0; g < rs.gammas.size(); ++g) {
        row("simfair", num(rs.gammas[g]), report.simfair[g].violation);
      }
      row("eop", "", report.eop->violation);
    }
  }
  auto m = meta(rs, data, y_adv);
  m["gammas"] = rs.gammas;
  m["keep_fractions"] = rs.keep_fractions;
  m["model"] = rs.model.empty() ? ordered_json(nullptr) : ordered_json(rs.model);
  m["rows"] = csv.data_rows();
  write_json(rs.out + ".meta.json", m);
  out << "wrote " << csv.path() << " (" << csv.data_rows() << " rows)\n";
  return kOk;
}

int cmd_train(const RunSpec& rs, std::ostream& out, std::ostream& err) {
  if (rs.regularizers.size() != 1) throw ConfigError("train takes exactly one --reg");
  if (rs.lambdas.size() > 1) throw ConfigError("train takes a single --lambda");
  const auto data = load_data(rs);
  const Regularizer& reg = rs.regularizers.front();
  const LabelVector y_adv = resolve_y_adv(rs.y_adv, data.split.train);
  const double lambda = rs.lambdas.empty() ? TrainConfig{}.lambda : rs.lambdas.front();
  for (int r = 0; r < rs.replications; ++r) {
    const std::uint64_t seed = rs.seed + static_cast<std::uint64_t>(r);
    const std::string prefix =
        rs.replications == 1 ? rs.out : rs.out + ".r" + std::to_string(r);
    auto result = train_logged(data.split.train, make_config(rs, reg, lambda, y_adv, seed),
                               reg.name(), err);
    result.report.test = evaluate(result.model, data.split.test, y_adv, rs.gammas);
    save_model(prefix + ".model", result.model);
    ordered_json report = to_json(result.report);
    report["regularizer"] = reg.name();
    report["data"] = meta(rs, data, y_adv);
    write_json(prefix + ".report.json", report);
    out << "wrote " << prefix << ".model and " << prefix << ".report.json\n";
  }
  return kOk;
}

int cmd_sweep(const RunSpec& rs, std::ostream& out, std::ostream& err) {
  const auto data = load_data(rs);
  const LabelVector y_adv = resolve_y_adv(rs.y_adv, data.split.train);
  const std::string adv = to_bitstring(y_adv);
  const std::vector<double> lambdas =
      rs.lambdas.empty() ? std::vector<double>{1, 10, 100, 1000, 5000} : rs.lambdas;
  CsvWriter csv(rs.out + ".csv",
                {"lambda", "regularizer", "gamma", "y_adv", "replication", "seed", "dp", "eop",
                 "targeted", "micro_f1", "macro_f1", "example_f1"});
  for (double lambda : lambdas) {
    for (const auto& reg : rs.regularizers) {
      for (int r = 0; r < rs.replications; ++r) {
        const std::uint64_t seed = rs.seed + static_cast<std::uint64_t>(r);
        const auto result = train_logged(data.split.train,
                                         make_config(rs, reg, lambda, y_adv, seed), reg.name(),
                                         err);
        const std::vector<double> gammas =
            reg.kind == Regularizer::Kind::SimFair ? std::vector<double>{reg.gamma}
                                                   : std::vector<double>{};
        const auto e = evaluate(result.model, data.split.test, y_adv, gammas);
        std::optional<double> targeted;
        switch (reg.kind) {
          case Regularizer::Kind::None:
          case Regularizer::Kind::DP:
            targeted = e.dp.violation;
            break;
          case Regularizer::Kind::EOp:
            targeted = e.eop->violation;
            break;
          case Regularizer::Kind::SimFair:
            targeted = e.simfair.front().violation;
            break;
        }
        csv.write({num(lambda), reg.name(),
                   reg.kind == Regularizer::Kind::SimFair ? num(reg.gamma) : "", adv,
                   std::to_string(r), std::to_string(seed), num(e.dp.violation),
                   num(e.eop->violation), num(targeted), num(e.f1.micro), num(e.f1.macro),
                   num(e.f1.example)});
      }
    }
  }
  auto m = meta(rs, data, y_adv);
  m["lambdas"] = lambdas;
  ordered_json regs = ordered_json::array();
  for (const auto& reg : rs.regularizers) regs.push_back(reg.name());
  m["regularizers"] = std::move(regs);
  m["rows"] = csv.data_rows();
  write_json(rs.out + ".meta.json", m);
  out << "wrote " << csv.path() << " (" << csv.data_rows() << " rows)\n";
  return kOk;
}

int cmd_gen(const RunSpec& rs, std::ostream& out) {
  if (rs.synth.empty()) throw ConfigError("gen needs --synth");
  std::ifstream in(rs.synth);
  if (!in) throw ConfigError("cannot open synthetic spec " + rs.synth);
  std::vector<std::pair<std::string, std::string>> ignored;
  const Dataset d = gen_synthetic(parse_synth_spec(in, &ignored));
  export_dataset(d, rs.out + ".csv", rs.out + ".manifest");
  out << "wrote " << rs.out << ".csv and " << rs.out << ".manifest (" << d.size() << " rows)\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// Argument handling

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> v;
  for (const auto& item : split_on(text, ',')) v.push_back(parse_double(trim(item), what));
  if (v.empty()) throw ConfigError(what + ": empty list");
  return v;
}

struct RawFlags {
  std::string reg;
  std::optional<double> gamma;
  std::string lambda;
  std::string gammas;
  std::string keep;
  std::string y_adv;
  int seeds = 1;
  long long seed = 1;
  int epochs = 0;
  double train_fraction = 0.7;
  std::string out;
};

// Run keys a synthetic spec file may carry; command-line flags take precedence.
const std::set<std::string> kRunKeys{"reg",  "gamma",  "lambda", "gammas", "keep",
                                     "y_adv", "seeds", "seed",   "epochs", "train_fraction",
                                     "out"};

std::map<std::string, std::string> file_run_keys(const std::string& synth_path) {
  std::map<std::string, std::string> keys;
  if (synth_path.empty()) return keys;
  std::ifstream in(synth_path);
  if (!in) throw ConfigError("cannot open synthetic spec " + synth_path);
  std::vector<std::pair<std::string, std::string>> extra;
  parse_synth_spec(in, &extra);
  for (const auto& [k, v] : extra) {
    if (kRunKeys.count(k) == 0) {
      throw ConfigError(synth_path + ": unknown key '" + k + "'");
    }
    keys[k] = v;
  }
  return keys;
}

RunSpec build_spec(const std::string& command, const CLI::App& sub, RawFlags f,
                   const std::string& manifest, const std::string& synth,
                   const std::string& model) {
  const bool has_manifest = !manifest.empty();
  const bool has_synth = !synth.empty();
  if (command == "gen") {
    if (!has_synth || has_manifest) throw ConfigError("gen takes --synth only");
  } else if (has_manifest == has_synth) {
    throw ConfigError("give exactly one of --manifest or --synth");
  }

  const auto file = file_run_keys(synth);
  auto given = [&](const std::string& flag) {
    const CLI::Option* opt = sub.get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  auto from_file = [&](const std::string& key, const std::string& flag) -> const std::string* {
    if (given(flag)) return nullptr;
    const auto it = file.find(key);
    return it == file.end() ? nullptr : &it->second;
  };
  if (auto v = from_file("reg", "--reg")) f.reg = *v;
  if (auto v = from_file("gamma", "--gamma")) f.gamma = parse_double(*v, "gamma");
  if (auto v = from_file("lambda", "--lambda")) f.lambda = *v;
  if (auto v = from_file("gammas", "--gammas")) f.gammas = *v;
  if (auto v = from_file("keep", "--keep")) f.keep = *v;
  if (auto v = from_file("y_adv", "--y-adv")) f.y_adv = *v;
  if (auto v = from_file("seeds", "--seeds")) f.seeds = static_cast<int>(parse_int(*v, "seeds"));
  if (auto v = from_file("seed", "--seed")) f.seed = parse_int(*v, "seed");
  if (auto v = from_file("epochs", "--epochs")) {
    f.epochs = static_cast<int>(parse_int(*v, "epochs"));
  }
  if (auto v = from_file("train_fraction", "--train-fraction")) {
    f.train_fraction = parse_double(*v, "train_fraction");
  }
  if (auto v = from_file("out", "--out")) f.out = *v;

  RunSpec rs;
  rs.command = command;
  rs.manifest = manifest;
  rs.synth = synth;
  rs.model = model;
  if (f.seeds < 1) throw ConfigError("--seeds must be >= 1");
  if (f.seed < 0) throw ConfigError("--seed must be >= 0");
  rs.replications = f.seeds;
  rs.seed = static_cast<std::uint64_t>(f.seed);
  if (given("--epochs") || file.count("epochs") > 0) {
    if (f.epochs < 0) throw ConfigError("--epochs must be >= 0");
    rs.epochs = f.epochs;
  }
  rs.train_fraction = f.train_fraction;
  if (!f.out.empty()) rs.out = f.out;
  if (!f.y_adv.empty()) rs.y_adv = f.y_adv;
  if (!f.lambda.empty()) rs.lambdas = parse_list(f.lambda, "lambda");
  for (double l : rs.lambdas) {
    if (!(l >= 0.0)) throw ConfigError("lambda must be >= 0");
  }
  if (!f.gammas.empty()) rs.gammas = parse_list(f.gammas, "gammas");
  for (double g : rs.gammas) {
    if (!(g >= 0.0)) throw ConfigError("gamma must be >= 0");
  }
  if (!f.keep.empty()) rs.keep_fractions = parse_list(f.keep, "keep");

  std::string regs = f.reg;
  if (regs.empty()) {
    regs = command == "sweep" ? "dp,eop,simfair:1,simfair:5,simfair:10" : "none";
  }
  for (const auto& item : split_on(regs, ',')) {
    rs.regularizers.push_back(parse_regularizer(item, f.gamma));
  }
  return rs;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Similarity-based fairness estimators and regularized multi-label training"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "simfair 1.0");

  std::string manifest;
  std::string synth;
  std::string model;
  RawFlags flags;

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"estimate", "Report DP, EOp and SimFair violations of an unregularized model"},
      {"robustness", "Re-estimate violations while subsampling the advantaged group"},
      {"train", "Train one model and write the model file and JSON report"},
      {"sweep", "Train over a lambda grid and regularizer list"},
      {"gen", "Write a synthetic dataset as CSV plus manifest"},
  };
  std::vector<CLI::App*> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    apps.push_back(sub);
    const std::string name = s.name;
    sub->add_option("--synth", synth, "Synthetic spec file (may also carry run keys)");
    sub->add_option("--out", flags.out, "Output path prefix");
    if (name == "gen") continue;
    sub->add_option("--manifest", manifest, "Dataset manifest");
    sub->add_option("--y-adv", flags.y_adv,
                    "Advantaged label: bitstring, rank:k, rank:last or smallest:n");
    sub->add_option("--seeds", flags.seeds, "Number of replications");
    sub->add_option("--seed", flags.seed, "Base seed; replication r uses seed + r");
    sub->add_option("--epochs", flags.epochs, "Training epochs");
    sub->add_option("--train-fraction", flags.train_fraction, "Train split fraction");
    if (name == "train" || name == "sweep") {
      sub->add_option("--reg", flags.reg, "none, dp, eop, simfair or simfair:<gamma>");
      sub->add_option("--gamma", flags.gamma, "Gamma for a bare 'simfair' regularizer");
      sub->add_option("--lambda", flags.lambda, "Penalty weight (comma list for sweep)");
    }
    if (name != "sweep") {
      sub->add_option("--gammas", flags.gammas, "Comma list of gammas to report");
    }
    if (name == "estimate" || name == "robustness") {
      sub->add_option("--model", model, "Use a saved model instead of training");
    }
    if (name == "robustness") {
      sub->add_option("--keep", flags.keep, "Comma list of advantaged keep fractions");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    for (CLI::App* sub : apps) {
      if (!sub->parsed()) continue;
      const std::string command = sub->get_name();
      const RunSpec rs = build_spec(command, *sub, flags, manifest, synth, model);
      if (command == "estimate") return cmd_estimate(rs, out, err);
      if (command == "robustness") return cmd_robustness(rs, out, err);
      if (command == "train") return cmd_train(rs, out, err);
      if (command == "sweep") return cmd_sweep(rs, out, err);
      return cmd_gen(rs, out);
    }
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}

}  // namespace simfair::cli
