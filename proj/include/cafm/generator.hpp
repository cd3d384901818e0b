// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cafm/model.hpp"

namespace cafm {

/// SplitMix64. Portable, so instances are identical across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, bound), unbiased.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform in [0, 1) with 53 bits.
  double unit();
  bool coin() { return (next() >> 63) != 0; }

 private:
  std::uint64_t state_;
};

enum class Distribution { Uniform, PowerLaw };

struct GenSpec {
  std::size_t n_features = 1;
  std::size_t n_contexts = 0;
  double ratio = 1.0;  // clauses per feature
  std::uint64_t seed = 0;
  Distribution distribution = Distribution::Uniform;
  double exponent = 2.5;  // power-law only
  /// Redraw context-only clauses instead of dropping them.
  bool redraw_context_only = false;
};

/// Variable ids 0..n_contexts-1 are contexts c1..cK, the rest features
/// f1..fN.
struct GenLiteral {
  std::size_t var = 0;
  bool positive = true;
};

using GenClause = std::array<GenLiteral, 3>;

struct GeneratedInstance {
  CaFM model;
  /// Surviving clauses, in draw order.
  std::vector<GenClause> clauses;
  std::size_t clauses_drawn = 0;
  std::size_t clauses_removed = 0;
};

/// round(ratio * n_features); throws Error when not representable.
std::size_t clause_count(const GenSpec& spec);

/// Random 3-literal clauses over 3 distinct variables; context-only clauses
/// are removed; every feature is optional. Clause k draws from its own
/// SplitMix64 stream seeded from (seed, k), so it does not depend on the
/// clauses before it. Throws Error for invalid specs (fewer than three
/// variables, ratio <= 0, no features).
GeneratedInstance generate(const GenSpec& spec);

std::string_view to_string(Distribution d);

}  // namespace cafm
