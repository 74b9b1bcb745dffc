// Copyright 2026 The SimFair Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "simfair/cli.hpp"

int main(int argc, char** argv) { return simfair::cli::run(argc, argv, std::cout, std::cerr); }
