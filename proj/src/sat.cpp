// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#include "cafm/sat.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>

#include "cafm/errors.hpp"

namespace cafm {
namespace sat {

namespace {

constexpr double kVarDecay = 0.95;
constexpr double kClauseDecay = 0.999;
constexpr std::uint64_t kRestartBase = 100;

// Luby sequence scaled by y: 1 1 2 1 1 2 4 ...
double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

std::uint32_t abstract_level(int level) { return 1u << (static_cast<unsigned>(level) & 31u); }

}  // namespace

// ---------------------------------------------------------------------------
// Heap

void CdclSolver::Heap::insert(Var v, const std::vector<double>& act) {
  if (static_cast<std::size_t>(v) >= index_.size()) index_.resize(static_cast<std::size_t>(v) + 1, -1);
  index_[static_cast<std::size_t>(v)] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  sift_up(static_cast<int>(heap_.size()) - 1, act);
}

Var CdclSolver::Heap::pop(const std::vector<double>& act) {
  Var top = heap_.front();
  heap_.front() = heap_.back();
  index_[static_cast<std::size_t>(heap_.front())] = 0;
  index_[static_cast<std::size_t>(top)] = -1;
  heap_.pop_back();
  if (heap_.size() > 1) sift_down(0, act);
  return top;
}

void CdclSolver::Heap::sift_up(int i, const std::vector<double>& act) {
  Var v = heap_[static_cast<std::size_t>(i)];
  auto key = [&](Var x) { return act[static_cast<std::size_t>(x)]; };
  while (i > 0) {
    int parent = (i - 1) >> 1;
    Var p = heap_[static_cast<std::size_t>(parent)];
    // Ties go to the smaller index so seed 0 is index-ordered.
    if (key(v) > key(p) || (key(v) == key(p) && v < p)) {
      heap_[static_cast<std::size_t>(i)] = p;
      index_[static_cast<std::size_t>(p)] = i;
      i = parent;
    } else {
      break;
    }
  }
  heap_[static_cast<std::size_t>(i)] = v;
  index_[static_cast<std::size_t>(v)] = i;
}

void CdclSolver::Heap::sift_down(int i, const std::vector<double>& act) {
  Var v = heap_[static_cast<std::size_t>(i)];
  auto better = [&](Var a, Var b) {
    double ka = act[static_cast<std::size_t>(a)], kb = act[static_cast<std::size_t>(b)];
    return ka > kb || (ka == kb && a < b);
  };
  const int n = static_cast<int>(heap_.size());
  for (;;) {
    int child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n &&
        better(heap_[static_cast<std::size_t>(child + 1)], heap_[static_cast<std::size_t>(child)]))
      ++child;
    Var c = heap_[static_cast<std::size_t>(child)];
    if (!better(c, v)) break;
    heap_[static_cast<std::size_t>(i)] = c;
    index_[static_cast<std::size_t>(c)] = i;
    i = child;
  }
  heap_[static_cast<std::size_t>(i)] = v;
  index_[static_cast<std::size_t>(v)] = i;
}

// ---------------------------------------------------------------------------
// Setup

CdclSolver::CdclSolver(std::uint64_t seed) : rng_(seed), randomize_(seed != 0) {}

Var CdclSolver::new_var() {
  Var v = num_vars();
  assigns_.push_back(Value::Undef);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  phase_.push_back(false);
  // 53 random bits -> [0, 1), scaled so it only breaks ties.
  activity_.push_back(randomize_ ? static_cast<double>(rng_() >> 11) * 0x1p-53 * 1e-5 : 0.0);
  seen_.push_back(0);
  model_.push_back(false);
  watches_.resize(2 * static_cast<std::size_t>(v + 1));
  order_.insert(v, activity_);
  return v;
}

bool CdclSolver::add_clause(std::span<const Lit> input) {
  if (!ok_) return false;
  cancel_until(0);
  std::vector<Lit> lits(input.begin(), input.end());
  std::sort(lits.begin(), lits.end());
  std::size_t j = 0;
  Lit prev{~0u};
  for (Lit p : lits) {
    assert(p.var() < num_vars());
    if (value(p) == Value::True || p == ~prev) return true;
    if (value(p) != Value::False && p != prev) lits[j++] = prev = p;
  }
  lits.resize(j);

  if (lits.empty()) {
    ok_ = false;
    return false;
  }
  if (lits.size() == 1) {
    enqueue(lits[0], kNoReason);
    if (propagate() != kNoReason) ok_ = false;
    return ok_;
  }
  clauses_.push_back(ClauseData{std::move(lits), 0.0, false, false});
  attach(static_cast<int>(clauses_.size()) - 1);
  return true;
}

void CdclSolver::attach(int clause) {
  const auto& lits = clauses_[static_cast<std::size_t>(clause)].lits;
  watches_[(~lits[0]).x].push_back(Watcher{clause, lits[1]});
  watches_[(~lits[1]).x].push_back(Watcher{clause, lits[0]});
}

// ---------------------------------------------------------------------------
// Propagation

void CdclSolver::enqueue(Lit p, int reason) {
  auto v = static_cast<std::size_t>(p.var());
  assigns_[v] = p.negated() ? Value::False : Value::True;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(p);
}

int CdclSolver::propagate() {
  int conflict = kNoReason;
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    ++stats_.propagations;
    auto& ws = watches_[p.x];
    const Lit false_lit = ~p;
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      Watcher w = ws[i];
      if (value(w.blocker) == Value::True) {
        ws[j++] = ws[i++];
        continue;
      }
      auto& c = clauses_[static_cast<std::size_t>(w.clause)];
      if (c.deleted) {
        ++i;
        continue;
      }
      auto& lits = c.lits;
      if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
      ++i;

      const Lit first = lits[0];
      const Watcher moved{w.clause, first};
      if (first != w.blocker && value(first) == Value::True) {
        ws[j++] = moved;
        continue;
      }

      bool found = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (value(lits[k]) != Value::False) {
          lits[1] = lits[k];
          lits[k] = false_lit;
          watches_[(~lits[1]).x].push_back(moved);
          found = true;
          break;
        }
      }
      if (found) continue;

      ws[j++] = moved;
      if (value(first) == Value::False) {
        conflict = w.clause;
        qhead_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.clause);
      }
    }
    ws.resize(j);
  }
  return conflict;
}

// ---------------------------------------------------------------------------
// Conflict analysis

void CdclSolver::analyze(int conflict, std::vector<Lit>& learnt, int& backtrack_level) {
  int path = 0;
  Lit p{};
  bool first = true;
  learnt.push_back(Lit{});  // asserting literal goes here
  auto index = static_cast<std::ptrdiff_t>(trail_.size()) - 1;

  do {
    assert(conflict != kNoReason);
    auto& c = clauses_[static_cast<std::size_t>(conflict)];
    if (c.learnt) bump_clause(c);
    for (std::size_t k = first ? 0 : 1; k < c.lits.size(); ++k) {
      Lit q = c.lits[k];
      auto v = static_cast<std::size_t>(q.var());
      if (!seen_[v] && level_[v] > 0) {
        bump_var(q.var());
        seen_[v] = 1;
        if (level_[v] >= decision_level())
          ++path;
        else
          learnt.push_back(q);
      }
    }
    while (!seen_[static_cast<std::size_t>(trail_[static_cast<std::size_t>(index--)].var())]) {
    }
    p = trail_[static_cast<std::size_t>(index + 1)];
    conflict = reason_[static_cast<std::size_t>(p.var())];
    seen_[static_cast<std::size_t>(p.var())] = 0;
    --path;
    first = false;
  } while (path > 0);
  learnt[0] = ~p;

  // Recursive minimization: drop literals implied by the rest of the clause.
  analyze_clear_.clear();
  for (Lit q : learnt) analyze_clear_.push_back(q.var());
  std::uint32_t mask = 0;
  for (std::size_t k = 1; k < learnt.size(); ++k) mask |= abstract_level(level(learnt[k].var()));
  std::size_t keep = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k) {
    if (reason_[static_cast<std::size_t>(learnt[k].var())] == kNoReason ||
        !literal_redundant(learnt[k], mask))
      learnt[keep++] = learnt[k];
  }
  learnt.resize(keep);
  for (Var v : analyze_clear_) seen_[static_cast<std::size_t>(v)] = 0;

  if (learnt.size() == 1) {
    backtrack_level = 0;
  } else {
    std::size_t max_i = 1;
    for (std::size_t k = 2; k < learnt.size(); ++k)
      if (level(learnt[k].var()) > level(learnt[max_i].var())) max_i = k;
    std::swap(learnt[1], learnt[max_i]);
    backtrack_level = level(learnt[1].var());
  }
  stats_.learnt_literals += learnt.size();
}

bool CdclSolver::literal_redundant(Lit p, std::uint32_t level_mask) {
  analyze_stack_.clear();
  analyze_stack_.push_back(p);
  const std::size_t top = analyze_clear_.size();
  while (!analyze_stack_.empty()) {
    Lit q = analyze_stack_.back();
    analyze_stack_.pop_back();
    const auto& c = clauses_[static_cast<std::size_t>(reason_[static_cast<std::size_t>(q.var())])];
    for (std::size_t k = 1; k < c.lits.size(); ++k) {
      Lit l = c.lits[k];
      auto v = static_cast<std::size_t>(l.var());
      if (seen_[v] || level_[v] == 0) continue;
      if (reason_[v] != kNoReason && (abstract_level(level_[v]) & level_mask) != 0) {
        seen_[v] = 1;
        analyze_stack_.push_back(l);
        analyze_clear_.push_back(l.var());
      } else {
        for (std::size_t k2 = top; k2 < analyze_clear_.size(); ++k2)
          seen_[static_cast<std::size_t>(analyze_clear_[k2])] = 0;
        analyze_clear_.resize(top);
        return false;
      }
    }
  }
  return true;
}

void CdclSolver::bump_var(Var v) {
  auto i = static_cast<std::size_t>(v);
  if ((activity_[i] += var_inc_) > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (order_.contains(v)) order_.increased(v, activity_);
}

void CdclSolver::bump_clause(ClauseData& c) {
  if ((c.activity += clause_inc_) > 1e20) {
    for (int idx : learnts_) clauses_[static_cast<std::size_t>(idx)].activity *= 1e-20;
    clause_inc_ *= 1e-20;
  }
}

void CdclSolver::cancel_until(int target) {
  if (decision_level() <= target) return;
  const auto stop = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(target)]);
  for (std::size_t c = trail_.size(); c-- > stop;) {
    Lit p = trail_[c];
    auto v = static_cast<std::size_t>(p.var());
    assigns_[v] = Value::Undef;
    reason_[v] = kNoReason;
    phase_[v] = !p.negated();
    if (!order_.contains(p.var())) order_.insert(p.var(), activity_);
  }
  trail_.resize(stop);
  trail_lim_.resize(static_cast<std::size_t>(target));
  qhead_ = stop;
}

std::optional<Lit> CdclSolver::pick_branch() {
  while (!order_.empty()) {
    Var v = order_.pop(activity_);
    if (assigns_[static_cast<std::size_t>(v)] == Value::Undef)
      return Lit::make(v, !phase_[static_cast<std::size_t>(v)]);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Clause database maintenance

int CdclSolver::add_learnt(std::vector<Lit> lits) {
  clauses_.push_back(ClauseData{std::move(lits), 0.0, true, false});
  int idx = static_cast<int>(clauses_.size()) - 1;
  learnts_.push_back(idx);
  attach(idx);
  bump_clause(clauses_.back());
  return idx;
}

bool CdclSolver::locked(int clause) const {
  const auto& c = clauses_[static_cast<std::size_t>(clause)];
  Lit first = c.lits[0];
  return reason_[static_cast<std::size_t>(first.var())] == clause && value(first) == Value::True;
}

void CdclSolver::reduce_db() {
  std::sort(learnts_.begin(), learnts_.end(), [&](int a, int b) {
    const auto& ca = clauses_[static_cast<std::size_t>(a)];
    const auto& cb = clauses_[static_cast<std::size_t>(b)];
    if (ca.activity != cb.activity) return ca.activity < cb.activity;
    return a < b;
  });
  const double extra = clause_inc_ / static_cast<double>(std::max<std::size_t>(learnts_.size(), 1));
  std::size_t keep = 0;
  const std::size_t half = learnts_.size() / 2;
  for (std::size_t i = 0; i < learnts_.size(); ++i) {
    int idx = learnts_[i];
    auto& c = clauses_[static_cast<std::size_t>(idx)];
    bool drop = c.lits.size() > 2 && !locked(idx) && (i < half || c.activity < extra);
    if (drop) {
      c.deleted = true;
      std::vector<Lit>().swap(c.lits);
    } else {
      learnts_[keep++] = idx;
    }
  }
  learnts_.resize(keep);
}

void CdclSolver::simplify_root() {
  assert(decision_level() == 0);
  for (std::size_t idx = 0; idx < clauses_.size(); ++idx) {
    auto& c = clauses_[idx];
    if (c.deleted) continue;
    bool satisfied = std::any_of(c.lits.begin(), c.lits.end(),
                                 [&](Lit p) { return value(p) == Value::True; });
    if (satisfied && !locked(static_cast<int>(idx))) {
      c.deleted = true;
      std::vector<Lit>().swap(c.lits);
    }
  }
  std::erase_if(learnts_, [&](int idx) { return clauses_[static_cast<std::size_t>(idx)].deleted; });
  simplified_trail_ = trail_.size();
}

// ---------------------------------------------------------------------------
// Search

CdclSolver::SearchResult CdclSolver::search(std::uint64_t conflict_limit,
                                            std::span<const Lit> assumptions,
                                            const Budget& budget) {
  std::uint64_t conflicts_here = 0;
  std::uint64_t ticks = 0;
  std::vector<Lit> learnt;
  for (;;) {
    if ((++ticks & 255u) == 0 && budget.exhausted()) {
      cancel_until(0);
      return SearchResult::Exhausted;
    }
    int conflict = propagate();
    if (conflict != kNoReason) {
      ++stats_.conflicts;
      ++conflicts_here;
      if (decision_level() == 0) {
        ok_ = false;
        return SearchResult::Unsat;
      }
      learnt.clear();
      int backtrack = 0;
      analyze(conflict, learnt, backtrack);
      cancel_until(backtrack);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        Lit asserting = learnt[0];
        int idx = add_learnt(learnt);
        enqueue(asserting, idx);
      }
      var_inc_ /= kVarDecay;
      clause_inc_ /= kClauseDecay;
      continue;
    }

    if (conflicts_here >= conflict_limit) {
      cancel_until(0);
      return SearchResult::Restart;
    }
    if (decision_level() == 0 && trail_.size() > simplified_trail_) simplify_root();
    if (static_cast<double>(learnts_.size()) >= max_learnts_ + static_cast<double>(trail_.size()))
      reduce_db();

    std::optional<Lit> next;
    while (decision_level() < static_cast<int>(assumptions.size())) {
      Lit a = assumptions[static_cast<std::size_t>(decision_level())];
      Value v = value(a);
      if (v == Value::True) {
        trail_lim_.push_back(static_cast<int>(trail_.size()));
      } else if (v == Value::False) {
        cancel_until(0);
        return SearchResult::Unsat;
      } else {
        next = a;
        break;
      }
    }
    if (!next) {
      ++stats_.decisions;
      next = pick_branch();
      if (!next) {
        for (std::size_t v = 0; v < assigns_.size(); ++v) model_[v] = assigns_[v] == Value::True;
        cancel_until(0);
        return SearchResult::Sat;
      }
    }
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(*next, kNoReason);
  }
}

Status CdclSolver::solve(std::span<const Lit> assumptions, const Budget& budget) {
  ++stats_.solves;
  if (!ok_) return Status::Unsat;
  if (budget.exhausted()) return Status::Unknown;
  if (max_learnts_ == 0) max_learnts_ = std::max(2000.0, static_cast<double>(clauses_.size()) / 3.0);
  for (int restart = 0;; ++restart) {
    auto limit = static_cast<std::uint64_t>(luby(2.0, restart) * static_cast<double>(kRestartBase));
    switch (search(limit, assumptions, budget)) {
      case SearchResult::Sat: return Status::Sat;
      case SearchResult::Unsat: return Status::Unsat;
      case SearchResult::Exhausted: return Status::Unknown;
      case SearchResult::Restart:
        ++stats_.restarts;
        max_learnts_ *= 1.05;
        break;
    }
  }
}

}  // namespace sat

// ---------------------------------------------------------------------------
// IncrementalSolver

namespace {

sat::Lit to_sat(Literal l) { return sat::Lit::make(l.var - 1, !l.positive); }

}  // namespace

IncrementalSolver::IncrementalSolver(std::uint64_t seed) : core_(seed) {}

void IncrementalSolver::sync_vars() {
  while (core_.num_vars() < var_map_.max_id()) core_.new_var();
}

void IncrementalSolver::declare(const std::string& name) {
  var_map_.intern(name);
  sync_vars();
  model_.reset();
}

void IncrementalSolver::push(const Formula& f) {
  model_.reset();
  // Names first so that original variables get the low ids.
  for (const auto& name : vars(f)) var_map_.intern(name);
  int guard_id = var_map_.fresh();
  std::vector<Clause> clauses = to_cnf_into(f, var_map_);
  sync_vars();
  const sat::Lit guard = sat::Lit::make(guard_id - 1);
  std::vector<sat::Lit> lits;
  for (const auto& clause : clauses) {
    lits.clear();
    for (Literal l : clause) lits.push_back(to_sat(l));
    lits.push_back(~guard);
    core_.add_clause(lits);
  }
  levels_.push_back(Level{guard, std::move(clauses)});
}

void IncrementalSolver::pop() {
  if (levels_.empty()) throw StackUnderflowError();
  const sat::Lit off[] = {~levels_.back().guard};
  core_.add_clause(off);
  levels_.pop_back();
  model_.reset();
}

SatVerdict IncrementalSolver::check_sat(const Budget& budget) {
  ++sat_calls_;
  model_.reset();
  std::vector<sat::Lit> assumptions;
  assumptions.reserve(levels_.size());
  for (const auto& level : levels_) assumptions.push_back(level.guard);

  switch (core_.solve(assumptions, budget)) {
    case sat::Status::Unknown: throw ResourceLimitError("SAT call exceeded its time budget");
    case sat::Status::Unsat: return SatVerdict{false, {}};
    case sat::Status::Sat: break;
  }
  Assignment model;
  for (const auto& [name, id] : var_map_.named()) model.emplace(name, core_.model_value(id - 1));
  model_ = model;
  return SatVerdict{true, std::move(model)};
}

const Assignment& IncrementalSolver::model() const {
  if (!model_) throw NoModelError();
  return *model_;
}

std::set<std::string> IncrementalSolver::get_model() const {
  std::set<std::string> out;
  for (const auto& [name, value] : model())
    if (value) out.insert(name);
  return out;
}

void IncrementalSolver::dump_dimacs(std::ostream& out) const {
  std::size_t count = 0;
  for (const auto& level : levels_) count += level.clauses.size();
  for (const auto& [name, id] : var_map_.named()) out << "c var " << id << ' ' << name << '\n';
  out << "p cnf " << var_map_.max_id() << ' ' << count << '\n';
  for (const auto& level : levels_) {
    for (const auto& clause : level.clauses) {
      for (Literal l : clause) out << (l.positive ? l.var : -l.var) << ' ';
      out << "0\n";
    }
  }
}

}  // namespace cafm
