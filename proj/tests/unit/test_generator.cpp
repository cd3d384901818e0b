// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "cafm/document.hpp"
#include "cafm/errors.hpp"
#include "cafm/generator.hpp"

using namespace cafm;

TEST_CASE("SplitMix64 reference values") {
  // First outputs for seed 0 of the published reference implementation.
  SplitMix64 r(0);
  CHECK(r.next() == 0xe220a8397b1dcdafULL);
  CHECK(r.next() == 0x6e789e6aa1b965f4ULL);
  CHECK(r.next() == 0x06c45d188009454fULL);
  SplitMix64 u(9);
  for (int i = 0; i < 1000; ++i) {
    CHECK(u.below(7) < 7);
    double x = u.unit();
    CHECK((x >= 0.0 && x < 1.0));
  }
}

TEST_CASE("clause count arithmetic") {
  CHECK(clause_count(GenSpec{.n_features = 250, .n_contexts = 10, .ratio = 5.5}) == 1375);
  CHECK(clause_count(GenSpec{.n_features = 3, .ratio = 0.5}) == 2);
  CHECK(clause_count(GenSpec{.n_features = 50, .ratio = 5.99}) == 300);
}

TEST_CASE("large instance") {
  GenSpec spec{.n_features = 250, .n_contexts = 10, .ratio = 5.5, .seed = 7};
  auto inst = generate(spec);
  CHECK(inst.clauses_drawn == 1375);
  CHECK(inst.clauses.size() + inst.clauses_removed == 1375);
  CHECK(inst.model.features().size() == 250);
  CHECK(inst.model.contexts().size() == 10);
  CHECK(inst.model.optional() == inst.model.features());
  CHECK(inst.model.contexts().front() == "c1");
  CHECK(inst.model.features().back() == "f250");
}

TEST_CASE("determinism") {
  GenSpec spec{.n_features = 40, .n_contexts = 4, .ratio = 4.2, .seed = 123};
  CHECK(document_text(to_document(generate(spec).model)) == document_text(to_document(generate(spec).model)));
  GenSpec other = spec;
  other.seed = 124;
  CHECK_FALSE(generate(spec).model == generate(other).model);
}

TEST_CASE("clause k does not depend on the clauses before it") {
  GenSpec a{.n_features = 30, .n_contexts = 0, .ratio = 2, .seed = 5};
  GenSpec b = a;
  b.ratio = 3;
  auto ia = generate(a), ib = generate(b);
  REQUIRE(ia.clauses.size() == 60);
  for (std::size_t k = 0; k < ia.clauses.size(); ++k)
    for (int j = 0; j < 3; ++j) {
      CHECK(ia.clauses[k][j].var == ib.clauses[k][j].var);
      CHECK(ia.clauses[k][j].positive == ib.clauses[k][j].positive);
    }
}

TEST_CASE("context-only clauses are removed") {
  GenSpec spec{.n_features = 3, .n_contexts = 6, .ratio = 20, .seed = 1};
  auto inst = generate(spec);
  CHECK(inst.clauses_removed > 0);
  for (const auto& c : inst.clauses) {
    bool feature = false;
    for (const auto& l : c) feature = feature || l.var >= spec.n_contexts;
    CHECK(feature);
  }
  GenSpec small{.n_features = 10, .n_contexts = 3, .ratio = 4, .seed = 2};
  for (const auto& c : generate(small).clauses) {
    bool feature = false;
    for (const auto& l : c) feature = feature || l.var >= small.n_contexts;
    CHECK(feature);
  }
  spec.redraw_context_only = true;
  auto redrawn = generate(spec);
  CHECK(redrawn.clauses.size() == 60);
  CHECK(redrawn.clauses_removed == 0);
}

TEST_CASE("formula mirrors the clauses") {
  GenSpec spec{.n_features = 8, .n_contexts = 2, .ratio = 3, .seed = 77};
  auto inst = generate(spec);
  auto parts = conjuncts(inst.model.formula());
  REQUIRE(parts.size() == inst.clauses.size());
  for (const auto& part : parts) {
    CHECK(part.kind() == Formula::Kind::Or);
    CHECK(vars(part).size() == 3);
  }
}

TEST_CASE("power-law favours low ids") {
  GenSpec spec{.n_features = 100, .ratio = 20, .seed = 3, .distribution = Distribution::PowerLaw};
  auto inst = generate(spec);
  std::size_t low = 0, high = 0;
  for (const auto& c : inst.clauses)
    for (const auto& l : c) (l.var < 10 ? low : high) += 1;
  CHECK(low > high / 4);
  CHECK(to_string(Distribution::PowerLaw) == "power-law");
}

TEST_CASE("invalid specs") {
  CHECK_THROWS_AS(generate(GenSpec{.n_features = 1, .n_contexts = 1, .ratio = 3}), Error);
  CHECK_THROWS_AS(generate(GenSpec{.n_features = 5, .ratio = 0}), Error);
  CHECK_THROWS_AS(generate(GenSpec{.n_features = 0, .n_contexts = 5, .ratio = 1}), Error);
}
