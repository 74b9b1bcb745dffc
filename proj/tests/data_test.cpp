// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

#include "simfair/data.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "gtest/gtest.h"
#include "simfair/fairness.hpp"
#include "simfair/train.hpp"
#include "test_util.hpp"

namespace simfair {
namespace {

namespace fs = std::filesystem;
using testing::Toy6;

fs::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::temp_directory_path() / "simfair_data_test" /
                       (std::string(info->test_suite_name()) + "." + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Manifest manifest_from(const std::string& text, const fs::path& base = {}) {
  std::istringstream is(text);
  return parse_manifest(is, base);
}

Dataset ramp(Index n) {
  Dataset d;
  d.X.resize(n, 2);
  d.a.resize(n);
  d.Y.resize(n, 2);
  for (Index i = 0; i < n; ++i) {
    d.X(i, 0) = static_cast<double>(i);
    d.X(i, 1) = static_cast<double>(i * i % 7);
    d.a[i] = 1 + static_cast<int>(i % 2);
    d.Y(i, 0) = static_cast<std::uint8_t>(i % 3 == 0);
    d.Y(i, 1) = static_cast<std::uint8_t>(i % 5 == 0);
  }
  return d;
}

// ---------------------------------------------------------------------------
// split

TEST(SplitTest, SizesFollowFloorRule) {
  const auto s = split(ramp(10), 0.7, 1);
  EXPECT_EQ(s.train.size(), 7);
  EXPECT_EQ(s.test.size(), 3);
}

TEST(SplitTest, SameSeedSameSplit) {
  const Dataset d = ramp(57);
  const auto s1 = split(d, 0.7, 42);
  const auto s2 = split(d, 0.7, 42);
  EXPECT_EQ(s1.train, s2.train);
  EXPECT_EQ(s1.test, s2.test);
  const auto s3 = split(d, 0.7, 43);
  EXPECT_FALSE(s1.train == s3.train);
}

TEST(SplitTest, FractionOutOfRange) {
  const Dataset d = ramp(10);
  EXPECT_THROW(split(d, 1.0, 1), ConfigError);
  EXPECT_THROW(split(d, 0.0, 1), ConfigError);
  EXPECT_THROW(split(d, -0.5, 1), ConfigError);
}

TEST(SplitTest, PartitionProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = std::uniform_int_distribution<Index>(2, 80)(rng);
    const double f = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const Dataset d = ramp(n);
    const auto s = split(d, f, rng());
    const auto n_train = static_cast<Index>(std::floor(static_cast<double>(n) * f));
    ASSERT_EQ(s.train.size(), n_train);
    ASSERT_EQ(s.test.size(), n - n_train);
    // Column 0 of the raw data is the row id; undo standardization to recover it.
    std::multiset<long long> ids;
    for (const Dataset* part : {&s.train, &s.test}) {
      for (Index i = 0; i < part->size(); ++i) {
        const double raw = part->X(i, 0) * s.standardizer.scale(0) + s.standardizer.mean(0);
        ids.insert(std::llround(raw));
      }
    }
    std::multiset<long long> expected;
    for (Index i = 0; i < n; ++i) expected.insert(i);
    EXPECT_EQ(ids, expected);
  }
}

TEST(SplitTest, StandardizesWithTrainingStatistics) {
  const auto s = split(ramp(100), 0.7, 9);
  for (Index c = 0; c < s.train.num_features(); ++c) {
    const auto col = s.train.X.col(c);
    EXPECT_NEAR(col.mean(), 0.0, 1e-12);
    EXPECT_NEAR((col.array() - col.mean()).square().mean(), 1.0, 1e-12);
  }
  // Test rows use the same affine map, so their mean is not forced to 0.
  const Dataset d = ramp(100);
  Matrix<double> raw_test(s.test.size(), 2);
  for (Index i = 0; i < s.test.size(); ++i) {
    raw_test.row(i) = s.test.X.row(i).cwiseProduct(s.standardizer.scale) + s.standardizer.mean;
  }
  for (Index i = 0; i < raw_test.rows(); ++i) {
    const auto id = std::llround(raw_test(i, 0));
    EXPECT_NEAR(raw_test(i, 1), d.X(id, 1), 1e-9);
  }
}

TEST(SplitTest, ConstantColumnScaleIsOne) {
  Dataset d = ramp(20);
  d.X.col(1).setConstant(3.0);
  const auto s = split(d, 0.5, 2);
  EXPECT_EQ(s.standardizer.scale(1), 1.0);
  EXPECT_TRUE((s.train.X.col(1).array() == 0.0).all());
}

// ---------------------------------------------------------------------------
// rank_label_groups

TEST(RankLabelGroupsTest, Toy6) {
  const auto groups = rank_label_groups(Toy6().as_dataset());
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(groups[0].label, make_labels({1, 0}));
  EXPECT_EQ(groups[0].count, 3);
  EXPECT_EQ(groups[1].label, make_labels({1, 1}));
  EXPECT_EQ(groups[1].count, 2);
  EXPECT_EQ(groups[2].label, make_labels({0, 1}));
  EXPECT_EQ(groups[2].count, 1);
}

TEST(RankLabelGroupsTest, AllIdenticalIsSingleEntry) {
  Dataset d = ramp(9);
  d.Y.setZero();
  d.Y.col(1).setOnes();
  const auto groups = rank_label_groups(d);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].label, make_labels({0, 1}));
  EXPECT_EQ(groups[0].count, 9);
}

TEST(RankLabelGroupsTest, TiesBrokenByBitstring) {
  Dataset d = ramp(4);
  d.Y << 1, 1, 0, 1, 1, 0, 0, 0;
  const auto groups = rank_label_groups(d);
  ASSERT_EQ(groups.size(), 4u);
  EXPECT_EQ(to_bitstring(groups[0].label), "00");
  EXPECT_EQ(to_bitstring(groups[1].label), "01");
  EXPECT_EQ(to_bitstring(groups[2].label), "10");
  EXPECT_EQ(to_bitstring(groups[3].label), "11");
}

TEST(RankLabelGroupsTest, CountsSumAndOrderingProperty) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = testing::random_instance(rng, 1, 120, 4);
    Dataset d;
    d.X = r.probs;
    d.a = r.a;
    d.Y = r.y;
    d.num_groups = r.num_groups;
    const auto groups = rank_label_groups(d);
    Index total = 0;
    std::set<std::string> seen;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      total += groups[g].count;
      EXPECT_TRUE(seen.insert(to_bitstring(groups[g].label)).second);
      if (g > 0) {
        const auto& prev = groups[g - 1];
        const bool ordered =
            prev.count > groups[g].count ||
            (prev.count == groups[g].count &&
             to_bitstring(prev.label) < to_bitstring(groups[g].label));
        EXPECT_TRUE(ordered);
      }
    }
    EXPECT_EQ(total, d.size());
  }
}

// ---------------------------------------------------------------------------
// subsample_advantaged

TEST(SubsampleTest, KeepAllIsUnchanged) {
  const Dataset d = Toy6().as_dataset();
  const auto s = subsample_advantaged(d, make_labels({1, 0}), 1.0, 3);
  EXPECT_EQ(s.data, d);
  EXPECT_TRUE(s.y_adv_present);
  EXPECT_EQ(s.advantaged_before, 3);
  EXPECT_EQ(s.advantaged_after, 3);
}

TEST(SubsampleTest, Toy6KeepThird) {
  const Dataset d = Toy6().as_dataset();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = subsample_advantaged(d, make_labels({1, 0}), 1.0 / 3.0, seed);
    ASSERT_EQ(s.data.size(), 4);
    EXPECT_EQ(s.advantaged_after, 1);
    // One of rows 0..2 survives, followed by rows 3..5 in order.
    bool from_adv = false;
    for (Index i = 0; i < 3; ++i) from_adv = from_adv || s.data.X.row(0) == d.X.row(i);
    EXPECT_TRUE(from_adv);
    for (Index i = 0; i < 3; ++i) EXPECT_EQ(s.data.X.row(i + 1), d.X.row(i + 3));
  }
}

TEST(SubsampleTest, CeilingArithmetic) {
  Dataset d = ramp(1200);
  d.Y.setZero();
  d.Y.topRows(1000).col(0).setOnes();
  const auto s = subsample_advantaged(d, make_labels({1, 0}), 0.05, 1);
  EXPECT_EQ(s.advantaged_before, 1000);
  EXPECT_EQ(s.advantaged_after, 50);
  EXPECT_EQ(s.data.size(), 250);
}

TEST(SubsampleTest, KeepFractionOutOfRange) {
  const Dataset d = Toy6().as_dataset();
  EXPECT_THROW(subsample_advantaged(d, make_labels({1, 0}), 0.0, 1), ConfigError);
  EXPECT_THROW(subsample_advantaged(d, make_labels({1, 0}), 1.5, 1), ConfigError);
}

TEST(SubsampleTest, AbsentLabelIsFlaggedNoOp) {
  const Dataset d = Toy6().as_dataset();
  const auto s = subsample_advantaged(d, make_labels({0, 0}), 0.1, 1);
  EXPECT_FALSE(s.y_adv_present);
  EXPECT_EQ(s.data, d);
}

TEST(SubsampleTest, OtherRowsUntouchedAndDeterministic) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = testing::random_instance(rng, 4, 150, 3);
    Dataset d;
    d.X = r.probs;
    d.a = r.a;
    d.Y = r.y;
    d.num_groups = r.num_groups;
    const double keep = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    const std::uint64_t seed = rng();
    const auto s = subsample_advantaged(d, r.y_adv, keep, seed);
    EXPECT_EQ(s.data, subsample_advantaged(d, r.y_adv, keep, seed).data);

    auto is_adv = [&](const LabelMatrix& y, Index i) { return y.row(i) == r.y_adv.transpose(); };
    Dataset others_before;
    std::vector<Index> rows;
    for (Index i = 0; i < d.size(); ++i) {
      if (!is_adv(d.Y, i)) rows.push_back(i);
    }
    others_before = d.subset(rows);
    rows.clear();
    Index adv_after = 0;
    for (Index i = 0; i < s.data.size(); ++i) {
      if (is_adv(s.data.Y, i)) {
        ++adv_after;
      } else {
        rows.push_back(i);
      }
    }
    EXPECT_EQ(s.data.subset(rows), others_before);
    EXPECT_EQ(adv_after, s.advantaged_after);
    EXPECT_EQ(adv_after,
              static_cast<Index>(std::ceil(keep * static_cast<double>(s.advantaged_before) - 1e-9)));
  }
}

// ---------------------------------------------------------------------------
// manifest parsing and loading

constexpr const char* kManifest = R"(format = simfair-manifest/v1
csv = people.csv
feature = height
feature = color onehot
target = smoker binary
target = job onehot
target = income in high,top
sensitive = age
sensitive_range = 25 44 1
sensitive_value = * 2
missing = ?
)";

constexpr const char* kCsv =
    "height,color,smoker,job,income,age,unused\n"
    "1.5,red,1,a,high,30,x\n"
    "1.7,blue,0,b,low,50,x\n"
    "1.6,red,0,a,top,25,x\n"
    "1.8,green,1,c,low,?,x\n"
    "1.9,blue,0,b,high,44.5,x\n";

TEST(ManifestTest, ParsesGrammar) {
  const auto m = manifest_from(kManifest, "/data");
  EXPECT_EQ(m.csv, fs::path("/data/people.csv"));
  ASSERT_EQ(m.features.size(), 2u);
  EXPECT_FALSE(m.features[0].onehot);
  EXPECT_TRUE(m.features[1].onehot);
  ASSERT_EQ(m.targets.size(), 3u);
  EXPECT_EQ(m.targets[2].kind, TargetRule::Kind::In);
  EXPECT_EQ(m.targets[2].values, (std::vector<std::string>{"high", "top"}));
  EXPECT_EQ(*m.num_groups, 2);
  EXPECT_EQ(m.sensitive.map("30"), 1);
  EXPECT_EQ(m.sensitive.map("60"), 2);
  EXPECT_EQ(m.missing_tokens, std::vector<std::string>{"?"});
}

TEST(ManifestTest, ParseErrors) {
  const std::string head = "csv = x.csv\nsensitive = s\nsensitive_value = a 1\nsensitive_value = b 2\n";
  EXPECT_NO_THROW(manifest_from(head + "target = t binary\n"));
  EXPECT_THROW(manifest_from(head), ConfigError);  // no targets
  EXPECT_THROW(manifest_from(head + "target = t binary\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(manifest_from(head + "target = t maybe\n"), ConfigError);
  EXPECT_THROW(manifest_from(head + "target = t binary\nfeature = f weird\n"), ConfigError);
  EXPECT_THROW(manifest_from(head + "target = t binary\nfeature = t\n"), ConfigError);
  EXPECT_THROW(manifest_from(head + "target = s binary\n"), ConfigError);
  EXPECT_THROW(manifest_from(head + "target = t binary\nsensitive = s2\n"), ConfigError);
  EXPECT_THROW(manifest_from(head + "target = t binary\ngroups = 1\n"), ConfigError);
  EXPECT_THROW(manifest_from(head + "target = t binary\nformat = other/v9\n"), ConfigError);
  EXPECT_THROW(manifest_from("sensitive = s\nsensitive_value = a 2\ntarget = t binary\n"),
               ConfigError);  // no csv
  EXPECT_THROW(manifest_from("csv = x.csv\nsensitive = s\nsensitive_value = a 1\n"
                             "target = t binary\n"),
               ConfigError);  // K < 2
  EXPECT_THROW(manifest_from("csv = x.csv\nsensitive = s\ntarget = t binary\n"), ConfigError);
  EXPECT_THROW(manifest_from(head + "target = t binary\nno equals sign\n"), ConfigError);
}

TEST(ManifestTest, LoadAppliesRules) {
  const auto dir = scratch_dir();
  write_file(dir / "people.csv", kCsv);
  write_file(dir / "people.manifest", kManifest);
  const Dataset d = load(read_manifest(dir / "people.manifest"));
  ASSERT_EQ(d.size(), 4);  // the '?' row is dropped
  EXPECT_EQ(d.feature_names,
            (std::vector<std::string>{"height", "color=blue", "color=red"}));
  EXPECT_EQ(d.target_names,
            (std::vector<std::string>{"smoker", "job=a", "job=b", "income"}));
  Matrix<double> x(4, 3);
  x << 1.5, 0, 1, 1.7, 1, 0, 1.6, 0, 1, 1.9, 1, 0;
  EXPECT_EQ(d.X, x);
  LabelMatrix y(4, 4);
  y << 1, 1, 0, 1, 0, 0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 1;
  EXPECT_EQ(d.Y, y);
  GroupVector a(4);
  a << 1, 2, 1, 2;
  EXPECT_EQ(d.a, a);
  EXPECT_EQ(d.sensitive_name, "age");
}

void expect_load_error_mentions(const std::string& csv, const std::string& manifest,
                                const std::string& needle) {
  const auto dir = scratch_dir();
  write_file(dir / "people.csv", csv);
  write_file(dir / "people.manifest", manifest);
  const auto m = read_manifest(dir / "people.manifest");
  try {
    load(m);
    ADD_FAILURE() << "expected DataError mentioning " << needle;
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(ManifestTest, MissingTargetColumnNamed) {
  expect_load_error_mentions("height,color,job,income,age\n1,red,a,high,30\n", kManifest,
                             "'smoker'");
}

TEST(ManifestTest, UnmappedSensitiveValueNamed) {
  const std::string m = "csv = people.csv\ntarget = t binary\nsensitive = s\n"
                        "sensitive_value = m 1\nsensitive_value = f 2\n";
  expect_load_error_mentions("t,s\n1,m\n0,x\n", m, "'s'");
  expect_load_error_mentions("t,s\n1,m\n0,x\n", m, "'x'");
}

TEST(ManifestTest, NonBinaryTargetNamed) {
  const std::string m = "csv = people.csv\ntarget = t binary\nsensitive = s\n"
                        "sensitive_value = m 1\nsensitive_value = f 2\n";
  expect_load_error_mentions("t,s\n1,m\n2,f\n", m, "'t'");
}

TEST(ManifestTest, NonNumericFeatureNamed) {
  const std::string m = "csv = people.csv\nfeature = h\ntarget = t binary\nsensitive = s\n"
                        "sensitive_value = m 1\nsensitive_value = f 2\n";
  expect_load_error_mentions("h,t,s\n1.2,1,m\ntall,0,f\n", m, "'h'");
}

TEST(ManifestTest, RaggedRowRejected) {
  const std::string m = "csv = people.csv\ntarget = t binary\nsensitive = s\n"
                        "sensitive_value = m 1\nsensitive_value = f 2\n";
  expect_load_error_mentions("t,s\n1,m\n0\n", m, "expected 2 fields");
}

TEST(ManifestTest, MissingCsvIsDataError) {
  const auto m = manifest_from("csv = /nonexistent/simfair.csv\ntarget = t binary\n"
                               "sensitive = s\nsensitive_value = m 1\nsensitive_value = f 2\n");
  EXPECT_THROW(load(m), DataError);
  EXPECT_THROW(read_manifest("/nonexistent/simfair.manifest"), ConfigError);
}

TEST(ManifestTest, ExportLoadRoundTrip) {
  const auto dir = scratch_dir();
  SynthSpec spec;
  spec.n = 300;
  spec.k = 3;
  spec.proportions = {0.2, 0.3, 0.5};
  const Dataset d = gen_synthetic(spec);
  export_dataset(d, dir / "synth.csv", dir / "synth.manifest");
  EXPECT_EQ(load(read_manifest(dir / "synth.manifest")), d);

  // Regenerating and re-exporting gives byte-identical files.
  fs::create_directories(dir / "again");
  export_dataset(gen_synthetic(spec), dir / "again" / "synth.csv",
                 dir / "again" / "synth.manifest");
  EXPECT_EQ(read_file(dir / "synth.csv"), read_file(dir / "again" / "synth.csv"));
  EXPECT_EQ(read_file(dir / "synth.manifest"), read_file(dir / "again" / "synth.manifest"));
}

TEST(ManifestTest, ExportRejectsUnsafeNames) {
  const auto dir = scratch_dir();
  Dataset d = Toy6().as_dataset();
  d.feature_names[0] = "bad,name";
  EXPECT_THROW(export_dataset(d, dir / "x.csv", dir / "x.manifest"), DataError);
}

fs::path shipped_manifest(const char* name) {
  return fs::path(SIMFAIR_SOURCE_DIR) / "manifests" / name;
}

TEST(ShippedManifestTest, AdultRowCount) {
  const auto m = read_manifest(shipped_manifest("adult.manifest"));
  if (!fs::exists(m.csv)) GTEST_SKIP() << m.csv << " not present";
  const Dataset d = load(m);
  EXPECT_EQ(d.size(), 48842);
  EXPECT_EQ(d.num_groups, 2);
}

TEST(ShippedManifestTest, CreditRowCount) {
  const auto m = read_manifest(shipped_manifest("credit.manifest"));
  if (!fs::exists(m.csv)) GTEST_SKIP() << m.csv << " not present";
  const Dataset d = load(m);
  EXPECT_EQ(d.size(), 30000);
  EXPECT_EQ(d.num_groups, 2);
}

// ---------------------------------------------------------------------------
// synthetic generator

TEST(SyntheticTest, ZeroBiasBayesPredictorIsFair) {
  SynthSpec spec;
  spec.n = 10000;
  spec.bias = 0.0;
  const Dataset d = gen_synthetic(spec);
  const Matrix<double> p = make_synthetic_model(spec).probabilities(d);
  const auto dp = dp_violation(p, d.a, d.num_groups);
  ASSERT_TRUE(dp.defined());
  EXPECT_LE(*dp.violation, 0.05);
}

TEST(SyntheticTest, LongTailDecay) {
  SynthSpec spec;
  spec.n = 10000;
  const Dataset d = gen_synthetic(spec);
  const double first = d.Y.col(0).cast<double>().mean();
  const double last = d.Y.col(spec.l - 1).cast<double>().mean();
  EXPECT_GE(first, 3.0 * last);
  for (Index l = 1; l < spec.l; ++l) {
    EXPECT_LT(d.Y.col(l).cast<double>().mean(), d.Y.col(l - 1).cast<double>().mean());
  }
}

TEST(SyntheticTest, SameSeedSameData) {
  SynthSpec spec;
  spec.n = 500;
  spec.seed = 77;
  EXPECT_EQ(gen_synthetic(spec), gen_synthetic(spec));
  SynthSpec other = spec;
  other.seed = 78;
  EXPECT_FALSE(gen_synthetic(spec) == gen_synthetic(other));
}

TEST(SyntheticTest, ShapesAndGroups) {
  SynthSpec spec;
  spec.n = 400;
  spec.m = 5;
  spec.l = 4;
  spec.k = 3;
  spec.proportions = {0.5, 0.25, 0.25};
  spec.biased_targets = 2;
  const Dataset d = gen_synthetic(spec);
  d.validate();
  EXPECT_EQ(d.num_features(), 5);
  EXPECT_EQ(d.num_targets(), 4);
  EXPECT_EQ(d.num_groups, 3);
  for (int k = 1; k <= 3; ++k) EXPECT_TRUE((d.a.array() == k).any());
  const auto model = make_synthetic_model(spec);
  EXPECT_TRUE((model.weight.col(0).array() == 0.0).all());
  EXPECT_TRUE((model.group_effect.bottomRows(2).array() == 0.0).all());
  EXPECT_TRUE((model.group_effect.topRows(2).array() != 0.0).any());
}

TEST(SyntheticTest, InvalidSpecs) {
  auto bad = [](auto mutate) {
    SynthSpec s;
    mutate(s);
    EXPECT_THROW(gen_synthetic(s), ConfigError);
  };
  bad([](SynthSpec& s) { s.n = 0; });
  bad([](SynthSpec& s) { s.k = 1; s.proportions = {1.0}; });
  bad([](SynthSpec& s) { s.proportions = {0.6, 0.6}; });
  bad([](SynthSpec& s) { s.proportions = {1.0}; });
  bad([](SynthSpec& s) { s.decay = 0.0; });
  bad([](SynthSpec& s) { s.bias = -1.0; });
  bad([](SynthSpec& s) { s.top_frequency = 1.0; });
  bad([](SynthSpec& s) { s.biased_targets = 7; });
  bad([](SynthSpec& s) { s.biased_targets = -1; });
}

TEST(SyntheticTest, SpecRoundTrip) {
  SynthSpec s;
  s.n = 1234;
  s.k = 3;
  s.proportions = {0.1, 0.2, 0.7};
  s.bias = 0.25;
  s.biased_targets = 3;
  s.seed = 99;
  std::stringstream ss;
  write_synth_spec(ss, s);
  const SynthSpec back = parse_synth_spec(ss);
  EXPECT_EQ(back.n, s.n);
  EXPECT_EQ(back.k, s.k);
  EXPECT_EQ(back.proportions, s.proportions);
  EXPECT_EQ(back.bias, s.bias);
  EXPECT_EQ(back.biased_targets, s.biased_targets);
  EXPECT_EQ(back.seed, s.seed);
  EXPECT_EQ(back.top_frequency, s.top_frequency);
}

TEST(SyntheticTest, SpecParseErrors) {
  auto parse = [](const std::string& text) {
    std::istringstream is(text);
    return parse_synth_spec(is);
  };
  EXPECT_THROW(parse("n = 0\n"), ConfigError);
  EXPECT_THROW(parse("n = many\n"), ConfigError);
  EXPECT_THROW(parse("unknown = 1\n"), ConfigError);
  EXPECT_THROW(parse("format = simfair-synth/v0\n"), ConfigError);
  EXPECT_EQ(parse("k = 4\n").proportions, (std::vector<double>{0.25, 0.25, 0.25, 0.25}));

  std::istringstream is("n = 10\nlambda = 5\n");
  std::vector<std::pair<std::string, std::string>> rest;
  EXPECT_EQ(parse_synth_spec(is, &rest).n, 10);
  ASSERT_EQ(rest.size(), 1u);
  EXPECT_EQ(rest[0].first, "lambda");
}

TEST(SyntheticTest, TrainedModelViolationGrowsWithBias) {
  const std::vector<double> betas{0.0, 0.5, 1.0, 2.0};
  double total_rho = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::vector<double> dps;
    for (double beta : betas) {
      SynthSpec spec;
      spec.n = 5000;
      spec.bias = beta;
      spec.seed = seed;
      const auto s = split(gen_synthetic(spec), 0.7, seed);
      TrainConfig config;
      config.epochs = 10;
      config.seed = seed;
      const auto result = train(s.train, config);
      const auto probs = forward(result.model, s.test.X);
      dps.push_back(*dp_violation(probs, s.test.a, s.test.num_groups).violation);
    }
    const double rho = testing::spearman(betas, dps);
    total_rho += rho;
    RecordProperty("rho_seed_" + std::to_string(seed), std::to_string(rho));
  }
  EXPECT_GE(total_rho / 5.0, 0.8);
}

}  // namespace
}  // namespace simfair
