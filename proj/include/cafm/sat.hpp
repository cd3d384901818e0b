// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cafm/budget.hpp"
#include "cafm/formula.hpp"

namespace cafm {

namespace sat {

using Var = int;  // 0-based

/// Literal packed as 2*var + negated.
struct Lit {
  std::uint32_t x = 0;

  static Lit make(Var v, bool negated = false) {
    return Lit{static_cast<std::uint32_t>(v) * 2u + (negated ? 1u : 0u)};
  }
  Var var() const { return static_cast<Var>(x >> 1); }
  bool negated() const { return (x & 1u) != 0; }
  Lit operator~() const { return Lit{x ^ 1u}; }
  friend bool operator==(Lit, Lit) = default;
  friend auto operator<=>(Lit, Lit) = default;
};

enum class Status { Sat, Unsat, Unknown };

struct Stats {
  std::uint64_t solves = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learnt_literals = 0;
};

/// CDCL solver: two-watched-literal propagation, first-UIP learning with
/// clause minimization, VSIDS, phase saving (false first), Luby restarts and
/// activity-based learnt clause reduction. Incremental through assumptions.
///
/// With seed 0 all tie-breaking is by variable index; any other seed adds a
/// tiny random initial activity per variable.
class CdclSolver {
 public:
  explicit CdclSolver(std::uint64_t seed = 0);

  Var new_var();
  int num_vars() const { return static_cast<int>(assigns_.size()); }

  /// Returns false once the clause set is unsatisfiable at the root.
  bool add_clause(std::span<const Lit> lits);

  /// Status::Unknown means the budget ran out.
  Status solve(std::span<const Lit> assumptions = {}, const Budget& budget = {});

  /// Value in the last satisfying assignment.
  bool model_value(Var v) const { return model_[static_cast<std::size_t>(v)]; }
  bool okay() const { return ok_; }
  const Stats& stats() const { return stats_; }

 private:
  enum class Value : std::uint8_t { False, True, Undef };
  static constexpr int kNoReason = -1;

  struct ClauseData {
    std::vector<Lit> lits;
    double activity = 0;
    bool learnt = false;
    bool deleted = false;
  };

  struct Watcher {
    int clause;
    Lit blocker;
  };

  // Binary max-heap over variables keyed by activity.
  class Heap {
   public:
    bool empty() const { return heap_.empty(); }
    bool contains(Var v) const {
      return static_cast<std::size_t>(v) < index_.size() && index_[static_cast<std::size_t>(v)] >= 0;
    }
    void insert(Var v, const std::vector<double>& act);
    void increased(Var v, const std::vector<double>& act) {
      sift_up(index_[static_cast<std::size_t>(v)], act);
    }
    Var pop(const std::vector<double>& act);

   private:
    void sift_up(int i, const std::vector<double>& act);
    void sift_down(int i, const std::vector<double>& act);
    std::vector<Var> heap_;
    std::vector<int> index_;
  };

  enum class SearchResult { Sat, Unsat, Restart, Exhausted };

  Value value(Lit p) const {
    Value v = assigns_[static_cast<std::size_t>(p.var())];
    if (v == Value::Undef) return v;
    return (v == Value::True) != p.negated() ? Value::True : Value::False;
  }
  int level(Var v) const { return level_[static_cast<std::size_t>(v)]; }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit p, int reason);
  int propagate();
  void analyze(int conflict, std::vector<Lit>& learnt, int& backtrack_level);
  bool literal_redundant(Lit p, std::uint32_t level_mask);
  void cancel_until(int level);
  SearchResult search(std::uint64_t conflict_limit, std::span<const Lit> assumptions,
                const Budget& budget);
  std::optional<Lit> pick_branch();
  void attach(int clause);
  int add_learnt(std::vector<Lit> lits);
  void reduce_db();
  void simplify_root();
  bool locked(int clause) const;
  void bump_var(Var v);
  void bump_clause(ClauseData& c);

  std::vector<ClauseData> clauses_;
  std::vector<int> learnts_;
  std::vector<std::vector<Watcher>> watches_;  // indexed by Lit::x

  std::vector<Value> assigns_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<bool> phase_;  // saved polarity, true = positive
  std::vector<double> activity_;
  std::vector<std::uint8_t> seen_;
  std::vector<bool> model_;

  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  Heap order_;

  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  double max_learnts_ = 0;
  std::size_t simplified_trail_ = 0;
  bool ok_ = true;

  std::mt19937_64 rng_;
  bool randomize_ = false;
  Stats stats_;

  std::vector<Lit> analyze_stack_;
  std::vector<Var> analyze_clear_;
};

}  // namespace sat

/// Verdict of IncrementalSolver::check_sat. The model maps every named
/// variable known to the solver.
struct SatVerdict {
  bool sat = false;
  Assignment model;
};

/// Formula-level incremental solver with the push/pop/checkSat/getModel
/// stack discipline. Each push level is guarded by an activation literal;
/// check_sat assumes all open guards and pop disables the top guard for good.
class IncrementalSolver {
 public:
  explicit IncrementalSolver(std::uint64_t seed = 0);

  /// Makes `name` part of every model without constraining it.
  void declare(const std::string& name);

  void push(const Formula& f);
  /// Throws StackUnderflowError when nothing is pushed.
  void pop();
  std::size_t depth() const { return levels_.size(); }

  /// Throws ResourceLimitError when the budget runs out.
  SatVerdict check_sat(const Budget& budget = {});

  /// Names assigned true by the last satisfiable check (auxiliary variables
  /// excluded). Throws NoModelError when there is none.
  std::set<std::string> get_model() const;
  const Assignment& model() const;

  const VarMap& var_map() const { return var_map_; }
  std::uint64_t sat_calls() const { return sat_calls_; }
  const sat::Stats& stats() const { return core_.stats(); }

  /// Active clause set (guards stripped) in DIMACS CNF, with `c var` comments
  /// naming the original variables.
  void dump_dimacs(std::ostream& out) const;

 private:
  struct Level {
    sat::Lit guard;
    std::vector<Clause> clauses;
  };

  void sync_vars();

  sat::CdclSolver core_;
  VarMap var_map_;
  std::vector<Level> levels_;
  std::optional<Assignment> model_;
  std::uint64_t sat_calls_ = 0;
};

}  // namespace cafm
