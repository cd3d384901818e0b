// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "brute_force.hpp"
#include "cafm/analyses.hpp"
#include "cafm/document.hpp"
#include "cafm/errors.hpp"
#include "cafm/generator.hpp"

using namespace cafm;
using cafm::testing::naive_truth;

namespace {

CaFM fixture(const char* name) { return load_model(std::string(CAFM_FIXTURES) + "/" + name); }

bool is_void(const AnalysisReport& r) { return std::get<VoidnessResult>(r.payload).is_void; }
const std::set<std::string>& features(const AnalysisReport& r) {
  return std::get<FeatureSetResult>(r.payload).features;
}

CaFM with_extra(const CaFM& m, const std::string& feature, const std::string& conjunct, bool optional) {
  auto fs = m.features();
  fs.push_back(feature);
  auto os = m.optional();
  if (optional) os.push_back(feature);
  return CaFM(m.contexts(), fs, os, Formula::conjunction(m.formula(), parse(conjunct)));
}

// The void witness really admits no product.
bool witness_is_void(const CaFM& m, const ContextAssignment& d) {
  return !cafm::testing::brute_sat(ground(m, d), m.features());
}

}  // namespace

TEST_CASE("only_one") {
  CHECK(only_one({"x1", "x2"}) == parse("(x1 | x2) & (!x1 | !x2)"));
  Formula one = only_one({"x"});
  CHECK(evaluate(one, {{"x", true}}));
  CHECK_FALSE(evaluate(one, {{"x", false}}));
  int count = 0;
  for (const auto& a : cafm::testing::all_assignments({"a", "b", "c"})) count += evaluate(only_one({"a", "b", "c"}), a);
  CHECK(count == 3);
  CHECK_THROWS_AS(only_one({}), Error);
  CHECK_THROWS_AS(only_one({"a", "a"}), Error);
}

TEST_CASE("aux names avoid collisions") {
  CaFM m({"aux_f"}, {"f", "aux_f_", "g"}, {}, Formula());
  AuxVarMap aux(m, {"f", "g"});
  CHECK(aux.aux("f") == "aux_f__");
  CHECK(aux.aux("g") == "aux_g");
  CHECK(aux.feature("aux_g") == "g");
  CHECK(aux.aux_names().size() == 2);
}

TEST_CASE("voidness examples") {
  CaFM e = fixture("ecall.json");
  CaFM c = fixture("contradiction.json");
  for (auto a : {Approach::Iterative, Approach::Forall, Approach::Oracle}) {
    CAPTURE(to_string(a));
    CHECK_FALSE(is_void(run_analysis(e, AnalysisKind::Voidness, a)));
    CHECK_FALSE(is_void(run_analysis(fixture("ecall_fm.json"), AnalysisKind::Voidness, a)));
    auto r = run_analysis(c, AnalysisKind::Voidness, a);
    CHECK(is_void(r));
    CHECK(std::get<VoidnessResult>(r.payload).witness == ContextAssignment{{"c"}});
    CHECK(r.anomaly());
    CHECK(r.verdict() == "void");
    CaFM unsat({}, {"a"}, {}, parse("a & !a"));
    CHECK(is_void(run_analysis(unsat, AnalysisKind::Voidness, a)));
  }
}

TEST_CASE("dead feature examples") {
  CaFM e = fixture("ecall.json");
  CaFM g = with_extra(e, "g", "!g", true);
  CaFM ab({}, {"a", "b"}, {}, parse("!a & !b"));
  for (auto a : {Approach::Iterative, Approach::Pruning, Approach::Oracle}) {
    CAPTURE(to_string(a));
    CHECK(features(run_analysis(e, AnalysisKind::DeadFeatures, a)).empty());
    CHECK(features(run_analysis(g, AnalysisKind::DeadFeatures, a)) == std::set<std::string>{"g"});
    CHECK(features(run_analysis(ab, AnalysisKind::DeadFeatures, a)) == std::set<std::string>{"a", "b"});
  }
  CHECK(features(dead_features_forall(e)).empty());
  CHECK(features(dead_features_forall(g)) == std::set<std::string>{"g"});
  AnalysisOptions first;
  first.stop_mode = StopMode::FirstAnomaly;
  CHECK(features(dead_features_forall(ab, first)).size() == 1);
  CHECK(features(dead_features_forall(ab)) == std::set<std::string>{"a", "b"});
  CHECK(features(dead_features_iterative(ab, first)).size() == 1);

  auto pr = dead_features_pruning(ab);
  CHECK(pr.stats.sat_calls == 1);
}

TEST_CASE("false-optional examples") {
  CaFM e = fixture("ecall.json");
  CaFM none(e.contexts(), e.features(), {}, e.formula());
  CaFM fo({}, {"a"}, {"a"}, parse("a"));
  for (auto a : {Approach::Iterative, Approach::Pruning, Approach::Oracle, Approach::Forall}) {
    CAPTURE(to_string(a));
    CHECK(features(run_analysis(e, AnalysisKind::FalseOptional, a)) == std::set<std::string>{"eCall"});
    CHECK(features(run_analysis(none, AnalysisKind::FalseOptional, a)).empty());
    CHECK(features(run_analysis(fo, AnalysisKind::FalseOptional, a)) == std::set<std::string>{"a"});
  }
  CHECK(false_optional_pruning(fo).stats.sat_calls == 1);
  auto empty = false_optional_forall(none);
  CHECK(empty.stats.sat_calls == 0);
  CHECK(empty.verdict() == "no-anomaly");
}

TEST_CASE("combined feature analysis") {
  CaFM e = fixture("ecall.json");
  for (auto a : {Approach::Iterative, Approach::Pruning, Approach::Forall, Approach::Oracle}) {
    auto r = feature_analysis(e, a);
    const auto& p = std::get<FeatureAnalysisResult>(r.payload);
    CHECK(p.dead.empty());
    CHECK(p.false_optional == std::set<std::string>{"eCall"});
    CHECK(r.verdict() == "false-optional");
  }
  CaFM g = with_extra(e, "g", "!g", true);
  AnalysisOptions first;
  first.stop_mode = StopMode::FirstAnomaly;
  auto r = feature_analysis(g, Approach::Iterative, first);
  CHECK(r.verdict() == "dead");
  CHECK(std::get<FeatureAnalysisResult>(r.payload).false_optional.empty());
}

TEST_CASE("Location is free for dead-feature checks") {
  CaFM e = fixture("ecall.json");
  for (auto a : {Approach::Iterative, Approach::Pruning, Approach::Forall})
    CHECK_FALSE(features(run_analysis(e, AnalysisKind::DeadFeatures, a)).contains("eCallRussia"));
  CHECK_FALSE(validate_product(e, {}, Product{{"eCall", "eCallRussia", "GLONASS"}}));
}

TEST_CASE("redundancy examples") {
  CaFM fm = fixture("ecall_fm.json");
  for (auto a : {Approach::Iterative, Approach::Forall, Approach::Oracle}) {
    CAPTURE(to_string(a));
    auto r = redundancy_check(fm, 0, a);
    CHECK_FALSE(std::get<RedundancyResult>(r.payload).redundant);
    CHECK(r.verdict() == "not-redundant");
  }
  CaFM taut({}, {"x", "y"}, {}, parse("(x -> y) & (x | !x)"));
  CaFM dup({}, {"x", "y"}, {}, parse("(x -> y) & y & (x -> y)"));
  for (auto a : {Approach::Iterative, Approach::Forall, Approach::Oracle}) {
    CHECK(std::get<RedundancyResult>(redundancy_check(taut, 1, a).payload).redundant);
    CHECK(std::get<RedundancyResult>(redundancy_check(dup, 2, a).payload).redundant);
    CHECK(std::get<RedundancyResult>(redundancy_check(dup, 0, a).payload).redundant);
    CHECK_FALSE(std::get<RedundancyResult>(redundancy_check(dup, 1, a).payload).redundant);
  }
  CHECK_THROWS_AS(redundancy_check(taut, 2), Error);
  CHECK_THROWS_AS(redundancy_check(CaFM({}, {"x"}, {}, parse("x | x")), 0), Error);
  CHECK_THROWS_AS(redundancy_check(taut, 0, Approach::Pruning), Error);

  auto free = redundancy_check_formula(fm, parse("eCallRussia -> !eCallEurope"));
  CHECK(std::get<RedundancyResult>(free.payload).redundant);
  CHECK_FALSE(std::get<RedundancyResult>(free.payload).candidate_index);
  CHECK_FALSE(std::get<RedundancyResult>(redundancy_check_formula(fm, parse("GPS")).payload).redundant);
}

TEST_CASE("oracle examples") {
  auto e = oracle(fixture("ecall.json"));
  CHECK_FALSE(e.is_void);
  CHECK(e.dead.empty());
  CHECK(e.false_optional == std::set<std::string>{"eCall"});
  CHECK(e.valid_contexts == 2);

  auto u = oracle(CaFM({}, {"a", "b"}, {}, parse("a & !a & b")));
  CHECK(u.is_void);
  CHECK(u.dead == std::set<std::string>{"a", "b"});

  CHECK_FALSE(oracle(CaFM({}, {}, {}, Formula())).is_void);
  CHECK_THROWS_AS(oracle(fixture("ecall.json"), 5), Error);
}

TEST_CASE("bit-parallel oracle matches the evaluate-based reference") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 300; ++i) {
    CaFM m = cafm::testing::random_cafm(rng, rng() % 4, 1 + rng() % 7, 1 + rng() % 5);
    auto o = oracle(m);
    auto t = naive_truth(m);
    CAPTURE(print(m.formula()));
    CHECK(o.is_void == t.is_void);
    CHECK(o.void_witness == t.first_void);
    CHECK(o.dead == t.dead);
    CHECK(o.false_optional == t.false_optional);
    CHECK(o.redundant == t.redundant);
  }
}

TEST_CASE("approaches agree with the oracle on random models") {
  std::mt19937_64 rng(2718);
  for (int i = 0; i < 200; ++i) {
    CaFM m = i % 2 == 0 ? cafm::testing::random_cafm(rng, rng() % 4, 2 + rng() % 6, 1 + rng() % 6)
                        : generate(GenSpec{.n_features = 4 + rng() % 6,
                                           .n_contexts = rng() % 4,
                                           .ratio = 2.0 + static_cast<double>(rng() % 5),
                                           .seed = rng()})
                              .model;
    CAPTURE(print(m.formula()));
    auto o = oracle(m);
    AnalysisOptions opt;
    opt.seed = static_cast<std::uint64_t>(i);

    auto vi = voidness_iterative(m, opt);
    auto vf = voidness_forall(m, opt);
    CHECK(is_void(vi) == o.is_void);
    CHECK(is_void(vf) == o.is_void);
    // Iterative walks contexts in the same order as the oracle.
    CHECK(std::get<VoidnessResult>(vi.payload).witness == o.void_witness);
    if (is_void(vf)) CHECK(witness_is_void(m, *std::get<VoidnessResult>(vf.payload).witness));

    CHECK(features(dead_features_iterative(m, opt)) == o.dead);
    CHECK(features(dead_features_pruning(m, opt)) == o.dead);
    CHECK(features(dead_features_forall(m, opt)) == o.dead);
    AnalysisOptions first = opt;
    first.stop_mode = StopMode::FirstAnomaly;
    auto df = features(dead_features_forall(m, first));
    CHECK(df.empty() == o.dead.empty());
    CHECK(df.size() <= 1);
    for (const auto& f : df) CHECK(o.dead.contains(f));

    CHECK(features(false_optional_iterative(m, opt)) == o.false_optional);
    CHECK(features(false_optional_pruning(m, opt)) == o.false_optional);
    CHECK(features(false_optional_forall(m, opt)) == o.false_optional);
    auto ff = features(false_optional_forall(m, first));
    CHECK(ff.empty() == o.false_optional.empty());
    for (const auto& f : ff) CHECK(o.false_optional.contains(f));

    for (auto a : {Approach::Iterative, Approach::Pruning, Approach::Forall}) {
      auto r = feature_analysis(m, a, opt);
      const auto& p = std::get<FeatureAnalysisResult>(r.payload);
      CHECK(p.dead == o.dead);
      CHECK(p.false_optional == o.false_optional);
    }

    if (m.formula().kind() == Formula::Kind::And) {
      auto parts = conjuncts(m.formula());
      for (std::size_t k = 0; k < parts.size(); ++k) {
        CHECK(std::get<RedundancyResult>(redundancy_check(m, k, Approach::Iterative, opt).payload).redundant ==
              o.redundant[k]);
        CHECK(std::get<RedundancyResult>(redundancy_check(m, k, Approach::Forall, opt).payload).redundant ==
              o.redundant[k]);
      }
    }
  }
}

TEST_CASE("pruning soundness: each reported feature fails on its own") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    CaFM m = cafm::testing::random_cafm(rng, rng() % 3, 2 + rng() % 5, 2 + rng() % 5);
    std::vector<std::string> all = m.contexts();
    all.insert(all.end(), m.features().begin(), m.features().end());
    const auto dead = dead_features_pruning(m);
    const auto fo = false_optional_pruning(m);
    for (const auto& f : features(dead))
      CHECK_FALSE(cafm::testing::brute_sat(Formula::conjunction(m.formula(), Formula::variable(f)), all));
    for (const auto& f : features(fo))
      CHECK_FALSE(cafm::testing::brute_sat(
          Formula::conjunction(m.formula(), Formula::negation(Formula::variable(f))), all));
  }
}

TEST_CASE("voidness_iterative walks contexts true-first") {
  // Every context combination admits a product: all 2^|C| leaves visited.
  CaFM m({"c1", "c2", "c3"}, {"f"}, {}, parse("c1 | c2 | c3 | f"));
  std::vector<ContextAssignment> seen;
  AnalysisOptions opt;
  opt.on_leaf = [&](const ContextAssignment& d, bool) { seen.push_back(d); };
  auto r = voidness_iterative(m, opt);
  CHECK_FALSE(is_void(r));
  CHECK(seen == cafm::testing::true_first_contexts(m.contexts()));
  CHECK(r.stats.sat_calls == 8);
}

TEST_CASE("first-anomaly mode stops early") {
  CaFM m({}, {"a", "b", "c"}, {"a", "b", "c"}, parse("!a & !b & !c"));
  AnalysisOptions first;
  first.stop_mode = StopMode::FirstAnomaly;
  CHECK(features(dead_features_iterative(m, first)).size() == 1);
  CHECK(features(dead_features_iterative(m)).size() == 3);
  // Pruning always returns the full set.
  CHECK(features(dead_features_pruning(m, first)).size() == 3);
}

TEST_CASE("deselected features are exempt from false-optional checks") {
  CaFM m({}, {"a", "b", "c"}, {"a", "b", "c"}, parse("a"));
  AnalysisOptions opt;
  opt.known_deselectable = {"b", "c"};
  auto r = false_optional_iterative(m, opt);
  CHECK(features(r) == std::set<std::string>{"a"});
  CHECK(r.stats.sat_calls == 1);
}

TEST_CASE("exhausted budget gives an incomplete report") {
  std::stop_source stop;
  stop.request_stop();
  AnalysisOptions opt;
  opt.budget.stop = stop.get_token();
  CaFM e = fixture("ecall.json");
  for (auto a : {Approach::Iterative, Approach::Forall}) {
    auto r = run_analysis(e, AnalysisKind::Voidness, a, opt);
    CHECK_FALSE(r.complete);
    CHECK(r.verdict() == "incomplete");
  }
  CHECK_FALSE(dead_features_pruning(e, opt).complete);
  CHECK_FALSE(feature_analysis(e, Approach::Iterative, opt).complete);
}

TEST_CASE("portfolio agrees with its members") {
  std::mt19937_64 rng(44);
  for (int i = 0; i < 40; ++i) {
    CaFM m = cafm::testing::random_cafm(rng, rng() % 3, 2 + rng() % 5, 1 + rng() % 5);
    for (auto kind : {AnalysisKind::Voidness, AnalysisKind::AllFeatures}) {
      AnalysisOptions opt;
      opt.stop_mode = StopMode::FirstAnomaly;
      auto p = run_portfolio(m, kind, opt);
      CHECK(p.complete);
      for (auto a : {Approach::Iterative, Approach::Forall, Approach::Pruning})
        if (is_applicable(kind, a)) CHECK(run_analysis(m, kind, a, opt).verdict() == p.verdict());
    }
  }
}

TEST_CASE("names and applicability") {
  CHECK(approach_from_string("pruning") == Approach::Pruning);
  CHECK_FALSE(approach_from_string("portfolio"));
  CHECK(analysis_from_string("false-optional") == AnalysisKind::FalseOptional);
  CHECK(analysis_from_string("dead") == AnalysisKind::DeadFeatures);
  CHECK_FALSE(is_applicable(AnalysisKind::Voidness, Approach::Pruning));
  CHECK_FALSE(is_applicable(AnalysisKind::Redundancy, Approach::Pruning));
  CHECK(is_applicable(AnalysisKind::AllFeatures, Approach::Pruning));
  CHECK_THROWS_AS(run_analysis(fixture("ecall.json"), AnalysisKind::Voidness, Approach::Pruning), Error);
}
