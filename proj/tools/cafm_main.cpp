// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cafm/cli.hpp"

int main(int argc, char** argv) { return cafm::run_cli(argc, argv, std::cout, std::cerr); }
