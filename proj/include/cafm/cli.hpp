// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace cafm {

/// Entry point of the `cafm` tool, with the streams injectable for tests.
///
///   cafm check FILE [--analysis A] [--approach P] ...
///   cafm generate --features N --contexts K --ratio R --seed S [-o FILE]
///   cafm bench DIR [--analyses ...] [--approaches ...] [--csv PATH] ...
///
/// `check` exits 0 when no anomaly is found, 1 when one is, and 2 on errors
/// or timeouts. `generate` and `bench` exit 0 on success and 2 otherwise;
/// a bench with cross-approach disagreement exits 2.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cafm
