// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#include "cafm/qbf.hpp"

#include <algorithm>

#include "cafm/errors.hpp"

namespace cafm {

namespace {

void validate(const ExistsForallProblem& p) {
  for (const auto& x : p.exists_vars)
    if (p.forall_vars.contains(x))
      throw ValidationError("variable '" + x + "' is both existential and universal");
  for (const auto& v : vars(p.matrix))
    if (!p.exists_vars.contains(v) && !p.forall_vars.contains(v))
      throw ValidationError("matrix variable '" + v + "' is not quantified");
}

bool mentions_any(const Formula& f, const std::set<std::string>& names) {
  auto vs = vars(f);
  return std::any_of(vs.begin(), vs.end(), [&](const std::string& v) { return names.contains(v); });
}

Formula cube(const Assignment& values) {
  std::vector<Formula> lits;
  lits.reserve(values.size());
  for (const auto& [name, value] : values) {
    Formula v = Formula::variable(name);
    lits.push_back(value ? v : Formula::negation(v));
  }
  return conjoin(lits);
}

}  // namespace

CegarSolver::CegarSolver(ExistsForallProblem problem, QbfOptions options)
    : problem_(std::move(problem)),
      options_(std::move(options)),
      abstraction_(options_.seed),
      counterexample_(options_.seed) {
  validate(problem_);
  for (const auto& x : problem_.exists_vars) abstraction_.declare(x);
  for (const auto& y : problem_.forall_vars) counterexample_.declare(y);
  for (const auto& part : conjuncts(problem_.matrix)) {
    if (mentions_any(part, problem_.forall_vars))
      y_dependent_.push_back(part);
    else
      abstraction_.push(part);
  }
  counterexample_.push(Formula::negation(problem_.matrix));
}

void CegarSolver::restrict(const Formula& constraint_over_x) {
  for (const auto& v : vars(constraint_over_x))
    if (!problem_.exists_vars.contains(v))
      throw ValidationError("restriction mentions non-existential variable '" + v + "'");
  abstraction_.push(constraint_over_x);
}

QbfVerdict CegarSolver::solve() {
  const Formula y_part = conjoin(y_dependent_);
  for (;;) {
    SatVerdict candidate = abstraction_.check_sat(options_.budget);
    if (!candidate.sat) {
      return QbfVerdict{false, {}, refinements_,
                        abstraction_.sat_calls() + counterexample_.sat_calls()};
    }
    Assignment x_star;
    for (const auto& x : problem_.exists_vars) x_star.emplace(x, candidate.model.at(x));
    if (options_.on_candidate) options_.on_candidate(x_star);

    counterexample_.push(cube(x_star));
    SatVerdict counter = counterexample_.check_sat(options_.budget);
    counterexample_.pop();
    if (!counter.sat) {
      return QbfVerdict{true, std::move(x_star), refinements_,
                        abstraction_.sat_calls() + counterexample_.sat_calls()};
    }

    if (options_.max_refinements && refinements_ >= *options_.max_refinements)
      throw ResourceLimitError("refinement budget of " + std::to_string(*options_.max_refinements) +
                               " exhausted");
    Assignment y_star;
    for (const auto& y : problem_.forall_vars) y_star.emplace(y, counter.model.at(y));
    abstraction_.push(substitute(y_part, y_star));
    ++refinements_;
  }
}

QbfVerdict solve_exists_forall(const ExistsForallProblem& problem, QbfOptions options) {
  return CegarSolver(problem, std::move(options)).solve();
}

}  // namespace cafm
