// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include "brute_force.hpp"
#include "cafm/errors.hpp"
#include "cafm/sat.hpp"

using namespace cafm;
using cafm::testing::brute_sat;
using cafm::testing::brute_sat_clauses;
using cafm::testing::random_formula;

namespace {

std::vector<std::vector<int>> random_cnf(std::mt19937_64& rng, int n, int m) {
  std::vector<std::vector<int>> out;
  for (int i = 0; i < m; ++i) {
    std::vector<int> c;
    const int len = 1 + static_cast<int>(rng() % 4);
    for (int j = 0; j < len; ++j) {
      const int v = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
      c.push_back(rng() % 2 ? v : -v);
    }
    out.push_back(c);
  }
  return out;
}

sat::Status solve_ints(sat::CdclSolver& s, const std::vector<std::vector<int>>& cnf, int n) {
  while (s.num_vars() < n) s.new_var();
  for (const auto& c : cnf) {
    std::vector<sat::Lit> lits;
    for (int l : c) lits.push_back(sat::Lit::make(std::abs(l) - 1, l < 0));
    s.add_clause(lits);
  }
  return s.solve();
}

bool model_ok(const sat::CdclSolver& s, const std::vector<std::vector<int>>& cnf) {
  for (const auto& c : cnf) {
    bool some = false;
    for (int l : c) some = some || s.model_value(std::abs(l) - 1) == (l > 0);
    if (!some) return false;
  }
  return true;
}

const std::string kEcallFm =
    "eCall & (eCall -> eCallEurope | eCallRussia) & (eCall -> GPS | GLONASS) & !(GPS & GLONASS) & "
    "(eCallEurope -> eCall) & (eCallRussia -> eCall) & (GPS -> eCall) & (GLONASS -> eCall) & "
    "(eCallEurope -> GPS) & (eCallRussia -> GLONASS)";
const std::string kEcall31 = kEcallFm + " & (Location -> eCallRussia) & (!Location -> !eCallRussia)";

}  // namespace

TEST_CASE("core agrees with brute force on random CNFs") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 600; ++i) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const int m = static_cast<int>(rng() % static_cast<std::uint64_t>(5 * n + 2));
    auto cnf = random_cnf(rng, n, m);
    sat::CdclSolver s(i % 3);
    auto st = solve_ints(s, cnf, n);
    CHECK((st == sat::Status::Sat) == brute_sat_clauses(cnf, n));
    if (st == sat::Status::Sat) CHECK(model_ok(s, cnf));
  }
}

TEST_CASE("pigeonhole 7 into 6 is unsat") {
  const int p = 7, h = 6;
  auto var = [&](int i, int j) { return i * h + j + 1; };
  std::vector<std::vector<int>> cnf;
  for (int i = 0; i < p; ++i) {
    std::vector<int> c;
    for (int j = 0; j < h; ++j) c.push_back(var(i, j));
    cnf.push_back(c);
  }
  for (int j = 0; j < h; ++j)
    for (int a = 0; a < p; ++a)
      for (int b = a + 1; b < p; ++b) cnf.push_back({-var(a, j), -var(b, j)});
  sat::CdclSolver s;
  CHECK(solve_ints(s, cnf, p * h) == sat::Status::Unsat);
  CHECK(s.stats().conflicts > 0);
}

TEST_CASE("larger random 3-SAT models are checked") {
  std::mt19937_64 rng(99);
  int sat_count = 0;
  for (int i = 0; i < 30; ++i) {
    const int n = 120;
    std::vector<std::vector<int>> cnf;
    for (int k = 0; k < 500; ++k) {
      std::vector<int> c;
      for (int j = 0; j < 3; ++j) {
        const int v = 1 + static_cast<int>(rng() % n);
        c.push_back(rng() % 2 ? v : -v);
      }
      cnf.push_back(c);
    }
    sat::CdclSolver s;
    if (solve_ints(s, cnf, n) == sat::Status::Sat) {
      ++sat_count;
      CHECK(model_ok(s, cnf));
    }
  }
  CHECK(sat_count > 0);
}

TEST_CASE("assumptions") {
  sat::CdclSolver s;
  auto a = s.new_var(), b = s.new_var();
  std::vector<sat::Lit> c{sat::Lit::make(a), sat::Lit::make(b)};
  s.add_clause(c);
  std::vector<sat::Lit> na{sat::Lit::make(a, true)};
  CHECK(s.solve(na) == sat::Status::Sat);
  CHECK(s.model_value(b));
  std::vector<sat::Lit> both{sat::Lit::make(a, true), sat::Lit::make(b, true)};
  CHECK(s.solve(both) == sat::Status::Unsat);
  CHECK(s.solve() == sat::Status::Sat);
  CHECK(s.okay());
}

TEST_CASE("push and check") {
  IncrementalSolver s;
  s.push(parse("x"));
  auto v = s.check_sat();
  CHECK(v.sat);
  CHECK(v.model.at("x"));

  IncrementalSolver t;
  t.push(parse("x"));
  t.push(parse("!x"));
  CHECK_FALSE(t.check_sat().sat);
  t.pop();
  auto w = t.check_sat();
  CHECK(w.sat);
  CHECK(w.model.at("x"));

  IncrementalSolver u;
  u.push(parse(kEcallFm));
  CHECK(u.check_sat().sat);
}

TEST_CASE("pop") {
  IncrementalSolver s;
  s.push(parse("x"));
  s.pop();
  CHECK(s.check_sat().sat);
  CHECK(s.depth() == 0);
  CHECK_THROWS_AS(s.pop(), StackUnderflowError);
}

TEST_CASE("check_sat examples") {
  IncrementalSolver empty;
  CHECK(empty.check_sat().sat);

  IncrementalSolver s;
  s.push(parse("a | b"));
  s.push(parse("!a"));
  s.push(parse("!b"));
  CHECK_FALSE(s.check_sat().sat);

  IncrementalSolver e;
  e.push(parse(kEcall31));
  e.push(parse("Location"));
  for (int i = 0; i < 5; ++i) {
    auto v = e.check_sat();
    REQUIRE(v.sat);
    CHECK(v.model.at("eCallRussia"));
  }
}

TEST_CASE("get_model") {
  IncrementalSolver s;
  s.push(parse("x & !y"));
  REQUIRE(s.check_sat().sat);
  CHECK(s.get_model() == std::set<std::string>{"x"});

  IncrementalSolver e;
  e.declare("p");
  e.declare("q");
  REQUIRE(e.check_sat().sat);
  auto first = e.get_model();
  CHECK(e.get_model() == first);

  IncrementalSolver u;
  u.push(parse("a & !a"));
  CHECK_FALSE(u.check_sat().sat);
  CHECK_THROWS_AS(u.get_model(), NoModelError);

  IncrementalSolver fresh;
  CHECK_THROWS_AS(fresh.get_model(), NoModelError);
  fresh.push(parse("x"));
  REQUIRE(fresh.check_sat().sat);
  fresh.push(parse("y"));
  CHECK_THROWS_AS(fresh.get_model(), NoModelError);
}

TEST_CASE("aux variables stay out of models") {
  IncrementalSolver s;
  s.push(parse("(a & b) | (c & !a)"));
  REQUIRE(s.check_sat().sat);
  for (const auto& [name, value] : s.check_sat().model) CHECK(is_valid_name(name));
  CHECK(s.check_sat().model.size() == 3);
}

TEST_CASE("random push/pop scripts match a fresh solve of the active set") {
  std::mt19937_64 rng(77);
  const std::vector<std::string> ns{"a", "b", "c", "d", "e", "f"};
  for (int script = 0; script < 100; ++script) {
    IncrementalSolver s(script);
    std::vector<Formula> active;
    for (int step = 0; step < 12; ++step) {
      if (!active.empty() && rng() % 3 == 0) {
        s.pop();
        active.pop_back();
      } else {
        active.push_back(random_formula(rng, ns, 2));
        s.push(active.back());
      }
      Formula all = conjoin(active);
      auto v = s.check_sat();
      CHECK(v.sat == brute_sat(all, ns));
      if (v.sat) {
        Assignment a = v.model;
        for (const auto& n : ns) a.try_emplace(n, false);
        CHECK(evaluate(all, a));
      }
    }
  }
}

TEST_CASE("determinism under a fixed seed") {
  std::mt19937_64 rng(3);
  const std::vector<std::string> ns = cafm::testing::names("v", 10);
  std::vector<Formula> fs;
  for (int i = 0; i < 20; ++i) fs.push_back(random_formula(rng, ns, 2));
  for (std::uint64_t seed : {0, 5}) {
    IncrementalSolver a(seed), b(seed);
    for (const auto& f : fs) {
      a.push(f);
      b.push(f);
      auto va = a.check_sat(), vb = b.check_sat();
      CHECK(va.sat == vb.sat);
      CHECK(va.model == vb.model);
      if (!va.sat) {
        a.pop();
        b.pop();
      }
    }
  }
}

TEST_CASE("budget") {
  std::stop_source stop;
  stop.request_stop();
  IncrementalSolver s;
  s.push(parse("a | b"));
  Budget b;
  b.stop = stop.get_token();
  CHECK_THROWS_AS(s.check_sat(b), ResourceLimitError);

  auto expired = Budget::with_timeout(std::chrono::duration<double>(0));
  CHECK(expired.exhausted());
  CHECK_FALSE(Budget::unlimited().exhausted());
}

TEST_CASE("DIMACS dump") {
  IncrementalSolver s;
  s.push(parse("a | !b"));
  s.push(parse("b"));
  s.pop();
  std::ostringstream out;
  s.dump_dimacs(out);
  const std::string text = out.str();
  CHECK(text.find("c var 1 a") != std::string::npos);
  CHECK(text.find("c var 2 b") != std::string::npos);
  CHECK(text.find("p cnf") != std::string::npos);
  CHECK(text.find("1 -2 0") != std::string::npos);
  // The popped unit is gone.
  CHECK(text.find("\n2 0") == std::string::npos);
}
