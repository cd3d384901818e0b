// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>

#include "cafm/budget.hpp"
#include "cafm/formula.hpp"
#include "cafm/sat.hpp"

namespace cafm {

/// exists X . forall Y . matrix
struct ExistsForallProblem {
  std::set<std::string> exists_vars;
  std::set<std::string> forall_vars;
  Formula matrix;
};

struct QbfVerdict {
  bool sat = false;
  /// Assignment of the existential variables; empty when unsat.
  Assignment witness;
  std::uint64_t refinement_count = 0;
  std::uint64_t sat_calls = 0;
};

struct QbfOptions {
  std::uint64_t seed = 0;
  Budget budget;
  std::optional<std::uint64_t> max_refinements;
  /// Called with every candidate the abstraction proposes.
  std::function<void(const Assignment&)> on_candidate;
};

/// Counterexample-guided solver for exists-forall problems.
///
/// The abstraction is a SAT instance over X. Each candidate x* is checked
/// against the counterexample instance, which holds !matrix: unsat means x*
/// is a witness, otherwise the counterexample y* is eliminated for good by
/// pushing matrix[Y := y*] into the abstraction. Conjuncts of the matrix that
/// do not mention Y are pushed into the abstraction up front.
///
/// `solve` may be called repeatedly; constraints added through `restrict`
/// and all refinements persist between calls.
class CegarSolver {
 public:
  /// Throws ValidationError when X and Y overlap or the matrix mentions a
  /// variable from neither.
  CegarSolver(ExistsForallProblem problem, QbfOptions options = {});

  /// Throws ResourceLimitError when the budget or refinement cap runs out.
  QbfVerdict solve();

  /// Adds a constraint over X to the abstraction.
  void restrict(const Formula& constraint_over_x);

  std::uint64_t refinement_count() const { return refinements_; }

 private:
  ExistsForallProblem problem_;
  QbfOptions options_;
  IncrementalSolver abstraction_;
  IncrementalSolver counterexample_;
  std::vector<Formula> y_dependent_;
  std::uint64_t refinements_ = 0;
};

QbfVerdict solve_exists_forall(const ExistsForallProblem& problem, QbfOptions options = {});

}  // namespace cafm
