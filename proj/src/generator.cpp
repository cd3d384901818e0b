// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#include "cafm/generator.hpp"

#include <algorithm>
#include <cmath>

#include "cafm/errors.hpp"

namespace cafm {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = ~0ull - (~0ull % bound);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % bound;
}

double SplitMix64::unit() { return static_cast<double>(next() >> 11) * 0x1p-53; }

std::string_view to_string(Distribution d) {
  return d == Distribution::Uniform ? "uniform" : "power-law";
}

std::size_t clause_count(const GenSpec& spec) {
  if (!(spec.ratio > 0) || !std::isfinite(spec.ratio)) throw Error("ratio must be positive");
  return static_cast<std::size_t>(std::llround(spec.ratio * static_cast<double>(spec.n_features)));
}

namespace {

// Seed of the stream for clause k.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t k) {
  SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ull * (k + 1)));
  return mix.next();
}

class VariableSampler {
 public:
  VariableSampler(const GenSpec& spec, std::size_t universe) : universe_(universe) {
    if (spec.distribution == Distribution::PowerLaw) {
      if (!(spec.exponent > 1)) throw Error("power-law exponent must be greater than 1");
      // Weight of the i-th variable (1-based) is i^(-1/(exponent-1)).
      cumulative_.reserve(universe);
      double total = 0;
      for (std::size_t i = 1; i <= universe; ++i) {
        total += std::pow(static_cast<double>(i), -1.0 / (spec.exponent - 1.0));
        cumulative_.push_back(total);
      }
      for (auto& c : cumulative_) c /= total;
    }
  }

  std::size_t draw(SplitMix64& rng) const {
    if (cumulative_.empty()) return static_cast<std::size_t>(rng.below(universe_));
    double u = rng.unit();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min(static_cast<std::size_t>(it - cumulative_.begin()), universe_ - 1);
  }

 private:
  std::size_t universe_;
  std::vector<double> cumulative_;
};

GenClause draw_clause(SplitMix64& rng, const VariableSampler& sampler) {
  GenClause clause;
  for (std::size_t slot = 0; slot < 3; ++slot) {
    std::size_t v;
    do {
      v = sampler.draw(rng);
    } while (std::any_of(clause.begin(), clause.begin() + static_cast<std::ptrdiff_t>(slot),
                         [&](const GenLiteral& l) { return l.var == v; }));
    clause[slot] = GenLiteral{v, rng.coin()};
  }
  return clause;
}

}  // namespace

GeneratedInstance generate(const GenSpec& spec) {
  if (spec.n_features < 1) throw Error("need at least one feature");
  const std::size_t universe = spec.n_features + spec.n_contexts;
  if (universe < 3) throw Error("need at least three variables to form 3-literal clauses");
  const std::size_t drawn = clause_count(spec);
  VariableSampler sampler(spec, universe);

  auto is_context_only = [&](const GenClause& c) {
    return std::all_of(c.begin(), c.end(), [&](const GenLiteral& l) { return l.var < spec.n_contexts; });
  };

  GeneratedInstance out;
  out.clauses_drawn = drawn;
  for (std::size_t k = 0; k < drawn; ++k) {
    SplitMix64 rng(stream_seed(spec.seed, k));
    GenClause clause = draw_clause(rng, sampler);
    if (is_context_only(clause)) {
      if (!spec.redraw_context_only) {
        ++out.clauses_removed;
        continue;
      }
      do {
        clause = draw_clause(rng, sampler);
      } while (is_context_only(clause));
    }
    out.clauses.push_back(clause);
  }

  std::vector<std::string> contexts, features;
  for (std::size_t i = 1; i <= spec.n_contexts; ++i) contexts.push_back("c" + std::to_string(i));
  for (std::size_t i = 1; i <= spec.n_features; ++i) features.push_back("f" + std::to_string(i));
  auto name_of = [&](std::size_t v) -> const std::string& {
    return v < spec.n_contexts ? contexts[v] : features[v - spec.n_contexts];
  };

  std::vector<Formula> parts;
  parts.reserve(out.clauses.size());
  for (const auto& clause : out.clauses) {
    std::vector<Formula> lits;
    for (const auto& l : clause) {
      Formula v = Formula::variable(name_of(l.var));
      lits.push_back(l.positive ? v : Formula::negation(v));
    }
    parts.push_back(disjoin(lits));
  }
  out.model = CaFM(contexts, features, features, conjoin(parts));
  return out;
}

}  // namespace cafm
