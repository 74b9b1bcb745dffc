// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <fstream>
#include <sstream>

#include "simfair/model.hpp"

namespace simfair {

namespace {

constexpr const char* kFormatTag = "simfair-model";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename Derived>
void write_row(std::ostream& os, const Eigen::MatrixBase<Derived>& row) {
  for (Index c = 0; c < row.size(); ++c) {
    if (c > 0) os << ' ';
    os << fmt(row(c));
  }
  os << '\n';
}

std::istringstream next_line(std::istream& is, const char* what) {
  std::string line;
  if (!std::getline(is, line)) {
    throw DataError(std::string("model file truncated: expected ") + what);
  }
  return std::istringstream(line);
}

void expect_word(std::istringstream& ls, const std::string& word) {
  std::string w;
  if (!(ls >> w) || w != word) {
    throw DataError("model file: expected '" + word + "', got '" + w + "'");
  }
}

void read_values(std::istringstream& ls, double* out, Index n, const char* what) {
  for (Index i = 0; i < n; ++i) {
    std::string tok;
    if (!(ls >> tok)) throw DataError(std::string("model file: short row in ") + what);
    char* end = nullptr;
    out[i] = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) {
      throw DataError(std::string("model file: bad number '") + tok + "' in " + what);
    }
  }
  std::string extra;
  if (ls >> extra) throw DataError(std::string("model file: trailing data in ") + what);
}

}  // namespace

void save_model(std::ostream& os, const Backbone<double>& b) {
  os << kFormatTag << ' ' << kModelFormatVersion << '\n';
  os << "dims";
  for (Index d : b.dims()) os << ' ' << d;
  os << '\n';
  for (std::size_t i = 0; i < b.layers().size(); ++i) {
    const auto& layer = b.layers()[i];
    os << "layer " << i << '\n';
    for (Index r = 0; r < layer.weight.rows(); ++r) write_row(os, layer.weight.row(r));
    os << "bias\n";
    write_row(os, layer.bias);
  }
}

Backbone<double> load_model(std::istream& is) {
  {
    auto ls = next_line(is, "header");
    std::string tag;
    int version = 0;
    if (!(ls >> tag >> version) || tag != kFormatTag) {
      throw DataError("not a simfair model file");
    }
    if (version != kModelFormatVersion) {
      throw DataError("unsupported model format version " + std::to_string(version));
    }
  }
  std::vector<Index> dims;
  {
    auto ls = next_line(is, "dims");
    expect_word(ls, "dims");
    long long d = 0;
    while (ls >> d) dims.push_back(static_cast<Index>(d));
    if (!ls.eof()) throw DataError("model file: malformed dims line");
  }
  Backbone<double> b;
  try {
    b = Backbone<double>(dims);
  } catch (const ConfigError& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  for (std::size_t i = 0; i < b.layers().size(); ++i) {
    auto& layer = b.layers()[i];
    {
      auto ls = next_line(is, "layer header");
      expect_word(ls, "layer");
      std::size_t idx = 0;
      if (!(ls >> idx) || idx != i) throw DataError("model file: layer index out of order");
    }
    for (Index r = 0; r < layer.weight.rows(); ++r) {
      auto ls = next_line(is, "weight row");
      read_values(ls, layer.weight.row(r).data(), layer.weight.cols(), "weights");
    }
    {
      auto ls = next_line(is, "bias header");
      expect_word(ls, "bias");
    }
    auto ls = next_line(is, "bias row");
    read_values(ls, layer.bias.data(), layer.bias.size(), "bias");
  }
  return b;
}

void save_model(const std::string& path, const Backbone<double>& b) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  save_model(os, b);
  if (!os) throw std::runtime_error("failed writing " + path);
}

Backbone<double> load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open model file " + path);
  return load_model(is);
}

}  // namespace simfair
