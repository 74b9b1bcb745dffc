// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

// CSV dialect: UTF-8, comma delimiter, header row, '.' decimal point, no
// quoting. Fields are whitespace-trimmed.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "simfair/data.hpp"
#include "simfair/kv.hpp"

namespace simfair {

namespace {

constexpr const char* kManifestFormat = "simfair-manifest/v1";

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

std::string at_line(const KeyValue& kv) { return "manifest line " + std::to_string(kv.line); }

// "<value...> <group>": the group is the last whitespace-separated token.
std::pair<std::string, int> value_and_group(const KeyValue& kv) {
  const auto pos = kv.value.find_last_of(" \t");
  if (pos == std::string::npos) {
    throw ConfigError(at_line(kv) + ": expected '<value> <group>'");
  }
  return {trim(kv.value.substr(0, pos)),
          static_cast<int>(parse_int(kv.value.substr(pos + 1), at_line(kv)))};
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open CSV file " + path.string());
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw DataError("CSV file " + path.string() + " is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  t.header = split_on(line, ',');
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_on(line, ',');
    if (fields.size() != t.header.size()) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(t.header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  return t;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::optional<int> SensitiveRule::map(const std::string& raw) const {
  for (const auto& [value, group] : values) {
    if (value == raw) return group;
  }
  double x = 0.0;
  if (!ranges.empty() && parse_number(raw, x)) {
    for (const auto& r : ranges) {
      if (x >= r.lo && x <= r.hi) return r.group;
    }
  }
  return fallback;
}

Manifest parse_manifest(std::istream& is, const std::filesystem::path& base_dir) {
  Manifest m;
  bool have_csv = false;
  bool have_sensitive = false;
  for (const auto& kv : parse_kv(is)) {
    if (kv.key == "format") {
      if (kv.value != kManifestFormat) {
        throw ConfigError(at_line(kv) + ": unsupported manifest format '" + kv.value + "'");
      }
    } else if (kv.key == "csv") {
      std::filesystem::path p(kv.value);
      m.csv = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
      have_csv = true;
    } else if (kv.key == "feature") {
      const auto w = words(kv.value);
      if (w.empty() || w.size() > 2 || (w.size() == 2 && w[1] != "onehot" && w[1] != "numeric")) {
        throw ConfigError(at_line(kv) + ": expected 'feature = <column> [numeric|onehot]'");
      }
      m.features.push_back({w[0], w.size() == 2 && w[1] == "onehot"});
    } else if (kv.key == "target") {
      const auto w = words(kv.value);
      if (w.size() < 2) {
        throw ConfigError(at_line(kv) + ": expected 'target = <column> binary|onehot|in v1,v2'");
      }
      TargetRule t;
      t.column = w[0];
      if (w[1] == "binary" && w.size() == 2) {
        t.kind = TargetRule::Kind::Binary;
      } else if (w[1] == "onehot" && w.size() == 2) {
        t.kind = TargetRule::Kind::OneHot;
      } else if (w[1] == "in" && w.size() >= 3) {
        t.kind = TargetRule::Kind::In;
        const auto rest = kv.value.substr(kv.value.find(" in ") + 4);
        t.values = split_on(rest, ',');
      } else {
        throw ConfigError(at_line(kv) + ": unknown target rule '" + kv.value + "'");
      }
      m.targets.push_back(std::move(t));
    } else if (kv.key == "sensitive") {
      if (have_sensitive) throw ConfigError(at_line(kv) + ": duplicate sensitive column");
      m.sensitive.column = kv.value;
      have_sensitive = true;
    } else if (kv.key == "sensitive_value") {
      auto [value, group] = value_and_group(kv);
      if (value == "*") {
        m.sensitive.fallback = group;
      } else {
        m.sensitive.values.emplace_back(value, group);
      }
    } else if (kv.key == "sensitive_range") {
      const auto w = words(kv.value);
      if (w.size() != 3) throw ConfigError(at_line(kv) + ": expected '<lo> <hi> <group>'");
      m.sensitive.ranges.push_back({parse_double(w[0], at_line(kv)),
                                    parse_double(w[1], at_line(kv)),
                                    static_cast<int>(parse_int(w[2], at_line(kv)))});
    } else if (kv.key == "groups") {
      m.num_groups = static_cast<int>(parse_int(kv.value, at_line(kv)));
    } else if (kv.key == "missing") {
      m.missing_tokens.push_back(kv.value);
    } else {
      throw ConfigError(at_line(kv) + ": unknown key '" + kv.key + "'");
    }
  }
  if (!have_csv) throw ConfigError("manifest has no 'csv' entry");
  if (!have_sensitive) throw ConfigError("manifest has no 'sensitive' entry");
  if (m.targets.empty()) throw ConfigError("manifest declares no targets");

  std::set<std::string> seen;
  auto claim = [&](const std::string& col, const char* role) {
    if (!seen.insert(col).second) {
      throw ConfigError("column '" + col + "' used more than once (as " + role + ")");
    }
  };
  claim(m.sensitive.column, "sensitive");
  for (const auto& f : m.features) claim(f.column, "feature");
  for (const auto& t : m.targets) claim(t.column, "target");

  int max_group = 0;
  for (const auto& [v, g] : m.sensitive.values) max_group = std::max(max_group, g);
  for (const auto& r : m.sensitive.ranges) max_group = std::max(max_group, r.group);
  if (m.sensitive.fallback) max_group = std::max(max_group, *m.sensitive.fallback);
  if (max_group == 0) throw ConfigError("manifest maps no sensitive values to groups");
  if (!m.num_groups) m.num_groups = max_group;
  if (*m.num_groups < 2 || max_group > *m.num_groups) {
    throw ConfigError("sensitive groups must lie in 1..K with K >= 2");
  }
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open manifest " + path.string());
  return parse_manifest(is, path.parent_path());
}

Dataset load(const Manifest& manifest) {
  const Table t = read_csv(manifest.csv);
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t c = 0; c < t.header.size(); ++c) col.emplace(t.header[c], c);
  auto find = [&](const std::string& name, const char* role) {
    auto it = col.find(name);
    if (it == col.end()) {
      throw DataError("CSV " + manifest.csv.string() + " has no " + role + " column '" + name +
                      "'");
    }
    return it->second;
  };

  const std::size_t sens_col = find(manifest.sensitive.column, "sensitive");
  std::vector<std::size_t> feat_cols;
  std::vector<std::size_t> targ_cols;
  for (const auto& f : manifest.features) feat_cols.push_back(find(f.column, "feature"));
  for (const auto& r : manifest.targets) targ_cols.push_back(find(r.column, "target"));

  // Rows with a missing token in any used column are dropped.
  std::vector<std::size_t> used{sens_col};
  used.insert(used.end(), feat_cols.begin(), feat_cols.end());
  used.insert(used.end(), targ_cols.begin(), targ_cols.end());
  std::vector<const std::vector<std::string>*> rows;
  for (const auto& row : t.rows) {
    const bool missing = std::any_of(used.begin(), used.end(), [&](std::size_t c) {
      return std::find(manifest.missing_tokens.begin(), manifest.missing_tokens.end(), row[c]) !=
             manifest.missing_tokens.end();
    });
    if (!missing) rows.push_back(&row);
  }
  const auto n = static_cast<Index>(rows.size());

  auto distinct = [&](std::size_t c) {
    std::set<std::string> values;
    for (const auto* row : rows) values.insert((*row)[c]);
    return std::vector<std::string>(values.begin(), values.end());
  };

  Dataset d;
  d.num_groups = *manifest.num_groups;
  d.sensitive_name = manifest.sensitive.column;

  // Features.
  std::vector<std::vector<double>> feat_columns;
  for (std::size_t j = 0; j < manifest.features.size(); ++j) {
    const auto& rule = manifest.features[j];
    const std::size_t c = feat_cols[j];
    if (rule.onehot) {
      for (const auto& v : distinct(c)) {
        d.feature_names.push_back(rule.column + "=" + v);
        std::vector<double> values;
        for (const auto* row : rows) values.push_back((*row)[c] == v ? 1.0 : 0.0);
        feat_columns.push_back(std::move(values));
      }
    } else {
      d.feature_names.push_back(rule.column);
      std::vector<double> values;
      for (Index i = 0; i < n; ++i) {
        double x = 0.0;
        const auto& raw = (*rows[static_cast<std::size_t>(i)])[c];
        if (!parse_number(raw, x)) {
          throw DataError("feature column '" + rule.column + "', data row " +
                          std::to_string(i + 1) + ": not numeric: '" + raw + "'");
        }
        values.push_back(x);
      }
      feat_columns.push_back(std::move(values));
    }
  }
  d.X.resize(n, static_cast<Index>(feat_columns.size()));
  for (std::size_t c = 0; c < feat_columns.size(); ++c) {
    for (Index i = 0; i < n; ++i) {
      d.X(i, static_cast<Index>(c)) = feat_columns[c][static_cast<std::size_t>(i)];
    }
  }

  // Targets.
  std::vector<std::vector<std::uint8_t>> targ_columns;
  for (std::size_t j = 0; j < manifest.targets.size(); ++j) {
    const auto& rule = manifest.targets[j];
    const std::size_t c = targ_cols[j];
    switch (rule.kind) {
      case TargetRule::Kind::Binary: {
        d.target_names.push_back(rule.column);
        std::vector<std::uint8_t> values;
        for (Index i = 0; i < n; ++i) {
          const auto& raw = (*rows[static_cast<std::size_t>(i)])[c];
          double x = -1.0;
          if (!parse_number(raw, x) || (x != 0.0 && x != 1.0)) {
            throw DataError("target column '" + rule.column + "', data row " +
                            std::to_string(i + 1) + ": non-binary value '" + raw + "'");
          }
          values.push_back(x == 1.0 ? 1 : 0);
        }
        targ_columns.push_back(std::move(values));
        break;
      }
      case TargetRule::Kind::OneHot:
        for (const auto& v : distinct(c)) {
          d.target_names.push_back(rule.column + "=" + v);
          std::vector<std::uint8_t> values;
          for (const auto* row : rows) values.push_back((*row)[c] == v ? 1 : 0);
          targ_columns.push_back(std::move(values));
        }
        break;
      case TargetRule::Kind::In: {
        d.target_names.push_back(rule.column);
        std::vector<std::uint8_t> values;
        for (const auto* row : rows) {
          const auto& raw = (*row)[c];
          values.push_back(
              std::find(rule.values.begin(), rule.values.end(), raw) != rule.values.end() ? 1
                                                                                           : 0);
        }
        targ_columns.push_back(std::move(values));
        break;
      }
    }
  }
  d.Y.resize(n, static_cast<Index>(targ_columns.size()));
  for (std::size_t c = 0; c < targ_columns.size(); ++c) {
    for (Index i = 0; i < n; ++i) {
      d.Y(i, static_cast<Index>(c)) = targ_columns[c][static_cast<std::size_t>(i)];
    }
  }

  // Sensitive attribute.
  d.a.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto& raw = (*rows[static_cast<std::size_t>(i)])[sens_col];
    const auto g = manifest.sensitive.map(raw);
    if (!g) {
      throw DataError("sensitive column '" + manifest.sensitive.column + "', data row " +
                      std::to_string(i + 1) + ": unmapped value '" + raw + "'");
    }
    d.a[i] = *g;
  }
  d.validate();
  return d;
}

void export_dataset(const Dataset& d, const std::filesystem::path& csv_path,
                    const std::filesystem::path& manifest_path) {
  d.validate();
  auto check_name = [](const std::string& name) {
    if (name.empty() || name.find_first_of(",#\n\r ") != std::string::npos) {
      throw DataError("column name '" + name + "' cannot be exported");
    }
  };
  std::vector<std::string> features = d.feature_names;
  std::vector<std::string> targets = d.target_names;
  if (features.empty()) {
    for (Index c = 0; c < d.num_features(); ++c) features.push_back("x" + std::to_string(c + 1));
  }
  if (targets.empty()) {
    for (Index c = 0; c < d.num_targets(); ++c) targets.push_back("y" + std::to_string(c + 1));
  }
  for (const auto& f : features) check_name(f);
  for (const auto& t : targets) check_name(t);
  check_name(d.sensitive_name);

  {
    std::ofstream os(csv_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + csv_path.string() + " for writing");
    bool first = true;
    auto sep = [&]() -> std::ostream& {
      if (!first) os << ',';
      first = false;
      return os;
    };
    for (const auto& f : features) sep() << f;
    sep() << d.sensitive_name;
    for (const auto& t : targets) sep() << t;
    os << '\n';
    for (Index i = 0; i < d.size(); ++i) {
      first = true;
      for (Index c = 0; c < d.num_features(); ++c) sep() << fmt(d.X(i, c));
      sep() << d.a[i];
      for (Index c = 0; c < d.num_targets(); ++c) sep() << static_cast<int>(d.Y(i, c));
      os << '\n';
    }
    if (!os) throw std::runtime_error("failed writing " + csv_path.string());
  }

  std::ofstream ms(manifest_path, std::ios::binary);
  if (!ms) throw std::runtime_error("cannot open " + manifest_path.string() + " for writing");
  ms << "format = " << kManifestFormat << '\n';
  const auto rel = std::filesystem::absolute(csv_path).parent_path() ==
                           std::filesystem::absolute(manifest_path).parent_path()
                       ? csv_path.filename()
                       : std::filesystem::absolute(csv_path);
  ms << "csv = " << rel.string() << '\n';
  for (const auto& f : features) ms << "feature = " << f << '\n';
  ms << "sensitive = " << d.sensitive_name << '\n';
  for (int k = 1; k <= d.num_groups; ++k) ms << "sensitive_value = " << k << ' ' << k << '\n';
  ms << "groups = " << d.num_groups << '\n';
  for (const auto& t : targets) ms << "target = " << t << " binary\n";
  if (!ms) throw std::runtime_error("failed writing " + manifest_path.string());
}

}  // namespace simfair
