// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

// `key = value` line format shared by manifests, synthetic specs and run
// files. '#' starts a comment; blank lines are ignored; keys may repeat.

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace simfair {

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<KeyValue> parse_kv(std::istream& is);

std::string trim(std::string_view s);
std::vector<std::string> split_on(std::string_view s, char sep);

double parse_double(const std::string& s, const std::string& what);
long long parse_int(const std::string& s, const std::string& what);

}  // namespace simfair
