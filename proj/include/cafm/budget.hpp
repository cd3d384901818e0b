// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <optional>
#include <stop_token>

namespace cafm {

/// Wall-clock deadline plus cooperative cancellation, polled by the solvers.
struct Budget {
  using Clock = std::chrono::steady_clock;

  std::optional<Clock::time_point> deadline;
  std::stop_token stop;

  static Budget unlimited() { return {}; }

  static Budget with_timeout(std::chrono::duration<double> timeout,
                             std::stop_token stop = {}) {
    return Budget{Clock::now() + std::chrono::duration_cast<Clock::duration>(timeout),
                  std::move(stop)};
  }

  bool exhausted() const {
    if (stop.stop_requested()) return true;
    return deadline && Clock::now() >= *deadline;
  }
};

}  // namespace cafm
