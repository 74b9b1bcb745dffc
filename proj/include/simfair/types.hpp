// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace simfair {

using Index = Eigen::Index;

// Label vectors and matrices hold 0/1 targets. Rows are samples.
using LabelVector = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>;
using LabelMatrix =
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Sensitive attribute per sample, values in {1..K}.
using GroupVector = Eigen::VectorXi;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_same_length(Index a, Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

// "101" <-> (1,0,1)
inline std::string to_bitstring(const LabelVector& y) {
  std::string s(static_cast<std::size_t>(y.size()), '0');
  for (Index l = 0; l < y.size(); ++l) {
    if (y[l] != 0) s[static_cast<std::size_t>(l)] = '1';
  }
  return s;
}

inline LabelVector from_bitstring(const std::string& s) {
  if (s.empty()) throw ConfigError("empty label bitstring");
  LabelVector y(static_cast<Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') {
      throw ConfigError("label bitstring must contain only 0/1: '" + s + "'");
    }
    y[static_cast<Index>(i)] = s[i] == '1' ? 1 : 0;
  }
  return y;
}

inline LabelVector make_labels(std::initializer_list<int> bits) {
  LabelVector y(static_cast<Index>(bits.size()));
  Index i = 0;
  for (int b : bits) y[i++] = static_cast<std::uint8_t>(b != 0);
  return y;
}

}  // namespace simfair
