// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#include "cafm/analyses.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "cafm/errors.hpp"
#include "cafm/qbf.hpp"
#include "cafm/sat.hpp"

namespace cafm {

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(Approach a) {
  switch (a) {
    case Approach::Iterative: return "iterative";
    case Approach::Forall: return "forall";
    case Approach::Pruning: return "pruning";
    case Approach::Oracle: return "oracle";
  }
  return "?";
}

std::string_view to_string(AnalysisKind k) {
  switch (k) {
    case AnalysisKind::Voidness: return "voidness";
    case AnalysisKind::DeadFeatures: return "dead";
    case AnalysisKind::FalseOptional: return "false-optional";
    case AnalysisKind::AllFeatures: return "all-features";
    case AnalysisKind::Redundancy: return "redundancy";
  }
  return "?";
}

std::string_view to_string(StopMode s) {
  return s == StopMode::FirstAnomaly ? "first-anomaly" : "all-anomalies";
}

std::optional<Approach> approach_from_string(std::string_view s) {
  for (auto a : {Approach::Iterative, Approach::Forall, Approach::Pruning, Approach::Oracle})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

std::optional<AnalysisKind> analysis_from_string(std::string_view s) {
  for (auto k : {AnalysisKind::Voidness, AnalysisKind::DeadFeatures, AnalysisKind::FalseOptional,
                 AnalysisKind::AllFeatures, AnalysisKind::Redundancy})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

bool is_applicable(AnalysisKind kind, Approach approach) {
  if (approach != Approach::Pruning) return true;
  return kind == AnalysisKind::DeadFeatures || kind == AnalysisKind::FalseOptional ||
         kind == AnalysisKind::AllFeatures;
}

// ---------------------------------------------------------------------------
// Report

bool AnalysisReport::anomaly() const {
  return std::visit(
      [](const auto& p) -> bool {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, VoidnessResult>) return p.is_void;
        else if constexpr (std::is_same_v<T, FeatureSetResult>) return !p.features.empty();
        else if constexpr (std::is_same_v<T, FeatureAnalysisResult>)
          return !p.dead.empty() || !p.false_optional.empty();
        else return p.redundant;
      },
      payload);
}

std::string AnalysisReport::verdict() const {
  if (!complete) return "incomplete";
  switch (kind) {
    case AnalysisKind::Voidness: return anomaly() ? "void" : "not-void";
    case AnalysisKind::DeadFeatures: return anomaly() ? "dead" : "no-anomaly";
    case AnalysisKind::FalseOptional: return anomaly() ? "false-optional" : "no-anomaly";
    case AnalysisKind::Redundancy: return anomaly() ? "redundant" : "not-redundant";
    case AnalysisKind::AllFeatures: {
      const auto& r = std::get<FeatureAnalysisResult>(payload);
      if (!r.dead.empty()) return "dead";
      if (!r.false_optional.empty()) return "false-optional";
      return "no-anomaly";
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Building blocks

Formula only_one(const std::vector<std::string>& names) {
  if (names.empty()) throw Error("only_one needs at least one variable");
  std::set<std::string> distinct(names.begin(), names.end());
  if (distinct.size() != names.size()) throw Error("only_one variables must be distinct");
  std::vector<Formula> xs;
  xs.reserve(names.size());
  for (const auto& n : names) xs.push_back(Formula::variable(n));
  std::vector<Formula> parts{disjoin(xs)};
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      parts.push_back(Formula::disjunction(Formula::negation(xs[i]), Formula::negation(xs[j])));
  return conjoin(parts);
}

AuxVarMap::AuxVarMap(const CaFM& m, const std::vector<std::string>& domain) {
  std::set<std::string> taken(m.contexts().begin(), m.contexts().end());
  taken.insert(m.features().begin(), m.features().end());
  for (const auto& f : domain) {
    std::string name = "aux_" + f;
    while (taken.contains(name)) name += '_';
    taken.insert(name);
    to_aux_.emplace(f, name);
    to_feature_.emplace(name, f);
    aux_names_.push_back(name);
  }
}

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  Clock::time_point start_ = Clock::now();
};

AnalysisReport start_report(AnalysisKind kind, Approach approach, const AnalysisOptions& options,
                            AnalysisPayload payload) {
  AnalysisReport r;
  r.kind = kind;
  r.approach = approach;
  r.stop_mode = options.stop_mode;
  r.payload = std::move(payload);
  return r;
}

Formula var(const std::string& name) { return Formula::variable(name); }
Formula neg_var(const std::string& name) { return Formula::negation(Formula::variable(name)); }

// Deselected features (false in some valid product) are recorded for the
// false-optional exemption.
void record_deselected(const CaFM& m, const Assignment& model, std::set<std::string>* out) {
  if (!out) return;
  for (const auto& f : m.features())
    if (!model.at(f)) out->insert(f);
}

AnalysisReport dead_iterative_impl(const CaFM& m, const AnalysisOptions& options,
                                   std::set<std::string>* deselected) {
  Stopwatch watch;
  auto report = start_report(AnalysisKind::DeadFeatures, Approach::Iterative, options, FeatureSetResult{});
  auto& dead = std::get<FeatureSetResult>(report.payload).features;
  IncrementalSolver solver(options.seed);
  for (const auto& f : m.features()) solver.declare(f);
  try {
    solver.push(m.formula());
    std::set<std::string> pending(m.features().begin(), m.features().end());
    for (const auto& f : m.features()) {
      if (!pending.erase(f)) continue;
      solver.push(var(f));
      SatVerdict v = solver.check_sat(options.budget);
      if (!v.sat) {
        dead.insert(f);
        solver.pop();
        if (options.stop_mode == StopMode::FirstAnomaly) break;
        continue;
      }
      for (const auto& name : solver.get_model()) pending.erase(name);
      record_deselected(m, v.model, deselected);
      solver.pop();
    }
  } catch (const ResourceLimitError&) {
    report.complete = false;
  }
  report.stats.sat_calls = solver.sat_calls();
  report.wall_time = watch.seconds();
  return report;
}

AnalysisReport dead_pruning_impl(const CaFM& m, const AnalysisOptions& options,
                                 std::set<std::string>* deselected) {
  Stopwatch watch;
  auto report = start_report(AnalysisKind::DeadFeatures, Approach::Pruning, options, FeatureSetResult{});
  auto& dead = std::get<FeatureSetResult>(report.payload).features;
  IncrementalSolver solver(options.seed);
  for (const auto& f : m.features()) solver.declare(f);
  try {
    solver.push(m.formula());
    std::vector<std::string> pending = m.features();
    while (!pending.empty()) {
      std::vector<Formula> any;
      for (const auto& f : pending) any.push_back(var(f));
      solver.push(disjoin(any));
      SatVerdict v = solver.check_sat(options.budget);
      if (!v.sat) {
        dead.insert(pending.begin(), pending.end());
        break;
      }
      std::erase_if(pending, [&](const std::string& f) { return v.model.at(f); });
      record_deselected(m, v.model, deselected);
      solver.pop();
    }
  } catch (const ResourceLimitError&) {
    report.complete = false;
  }
  report.stats.sat_calls = solver.sat_calls();
  report.wall_time = watch.seconds();
  return report;
}

std::vector<std::string> exempted(const CaFM& m, const AnalysisOptions& options) {
  std::vector<std::string> out;
  for (const auto& f : m.optional())
    if (!options.known_deselectable.contains(f)) out.push_back(f);
  return out;
}

// Shared shape of the two feature encodings:
//   exists aux . OnlyOne(aux) & forall C,F . (AND_f aux(f) -> lit(f)) -> !phi
// where lit(f) is f for dead features and !f for false-optional ones.
AnalysisReport feature_forall(const CaFM& m, const std::vector<std::string>& domain, bool negate,
                              AnalysisKind kind, const AnalysisOptions& options) {
  Stopwatch watch;
  auto report = start_report(kind, Approach::Forall, options, FeatureSetResult{});
  auto& found = std::get<FeatureSetResult>(report.payload).features;
  if (domain.empty()) {
    report.wall_time = watch.seconds();
    return report;
  }
  AuxVarMap aux(m, domain);
  std::vector<Formula> selectors;
  for (const auto& f : domain)
    selectors.push_back(Formula::implication(var(aux.aux(f)), negate ? neg_var(f) : var(f)));

  ExistsForallProblem problem;
  problem.exists_vars.insert(aux.aux_names().begin(), aux.aux_names().end());
  problem.forall_vars.insert(m.contexts().begin(), m.contexts().end());
  problem.forall_vars.insert(m.features().begin(), m.features().end());
  problem.matrix = Formula::conjunction(
      only_one(aux.aux_names()),
      Formula::implication(conjoin(selectors), Formula::negation(m.formula())));

  try {
    CegarSolver solver(problem, QbfOptions{options.seed, options.budget, std::nullopt, {}});
    for (;;) {
      QbfVerdict v = solver.solve();
      report.stats.sat_calls = v.sat_calls;
      report.stats.refinement_count = v.refinement_count;
      if (!v.sat) break;
      auto chosen = std::find_if(v.witness.begin(), v.witness.end(),
                                 [](const auto& kv) { return kv.second; });
      const std::string& feature = aux.feature(chosen->first);
      found.insert(feature);
      if (options.stop_mode == StopMode::FirstAnomaly) break;
      solver.restrict(neg_var(chosen->first));
    }
  } catch (const ResourceLimitError&) {
    report.complete = false;
  }
  report.wall_time = watch.seconds();
  return report;
}

void merge_stats(SolverStatistics& into, const SolverStatistics& from) {
  into.sat_calls += from.sat_calls;
  into.refinement_count += from.refinement_count;
}

std::vector<Formula> top_level_conjuncts(const CaFM& m) {
  if (m.formula().kind() != Formula::Kind::And)
    throw Error("redundancy check needs a top-level conjunction");
  return conjuncts(m.formula());
}

AnalysisReport oracle_report(const CaFM& m, AnalysisKind kind, const AnalysisOptions& options,
                             std::size_t candidate_index) {
  Stopwatch watch;
  AnalysisReport report = start_report(kind, Approach::Oracle, options, FeatureSetResult{});
  if (kind == AnalysisKind::Redundancy) {
    auto parts = top_level_conjuncts(m);
    if (candidate_index >= parts.size()) throw Error("candidate index out of range");
  }
  OracleRecord truth = oracle(m, options.oracle_cap);
  switch (kind) {
    case AnalysisKind::Voidness:
      report.payload = VoidnessResult{truth.is_void, truth.void_witness};
      break;
    case AnalysisKind::DeadFeatures: report.payload = FeatureSetResult{truth.dead}; break;
    case AnalysisKind::FalseOptional: report.payload = FeatureSetResult{truth.false_optional}; break;
    case AnalysisKind::AllFeatures: {
      FeatureAnalysisResult r{truth.dead, {}};
      if (options.stop_mode == StopMode::AllAnomalies || truth.dead.empty())
        r.false_optional = truth.false_optional;
      report.payload = std::move(r);
      break;
    }
    case AnalysisKind::Redundancy:
      report.payload = RedundancyResult{truth.redundant[candidate_index], candidate_index};
      break;
  }
  report.wall_time = watch.seconds();
  return report;
}

}  // namespace

// ---------------------------------------------------------------------------
// Voidness

AnalysisReport voidness_iterative(const CaFM& m, const AnalysisOptions& options) {
  Stopwatch watch;
  auto report = start_report(AnalysisKind::Voidness, Approach::Iterative, options, VoidnessResult{});
  auto& result = std::get<VoidnessResult>(report.payload);
  IncrementalSolver solver(options.seed);
  const auto& contexts = m.contexts();
  std::set<std::string> truthy;

  // True branch first, then false; stops at the first leaf without products.
  std::function<bool(std::size_t)> check = [&](std::size_t i) -> bool {
    if (i == contexts.size()) {
      bool sat = solver.check_sat(options.budget).sat;
      if (options.on_leaf) options.on_leaf(ContextAssignment{truthy}, sat);
      if (!sat) {
        result.is_void = true;
        result.witness = ContextAssignment{truthy};
      }
      return !sat;
    }
    const std::string& c = contexts[i];
    solver.push(var(c));
    truthy.insert(c);
    if (check(i + 1)) return true;
    solver.pop();
    truthy.erase(c);
    solver.push(neg_var(c));
    if (check(i + 1)) return true;
    solver.pop();
    return false;
  };

  try {
    solver.push(m.formula());
    check(0);
  } catch (const ResourceLimitError&) {
    report.complete = false;
  }
  report.stats.sat_calls = solver.sat_calls();
  report.wall_time = watch.seconds();
  return report;
}

AnalysisReport voidness_forall(const CaFM& m, const AnalysisOptions& options) {
  Stopwatch watch;
  auto report = start_report(AnalysisKind::Voidness, Approach::Forall, options, VoidnessResult{});
  auto& result = std::get<VoidnessResult>(report.payload);
  ExistsForallProblem problem{{m.contexts().begin(), m.contexts().end()},
                              {m.features().begin(), m.features().end()},
                              Formula::negation(m.formula())};
  try {
    QbfVerdict v = solve_exists_forall(problem, QbfOptions{options.seed, options.budget, std::nullopt, {}});
    report.stats.sat_calls = v.sat_calls;
    report.stats.refinement_count = v.refinement_count;
    if (v.sat) {
      result.is_void = true;
      ContextAssignment d;
      for (const auto& [c, value] : v.witness)
        if (value) d.truthy.insert(c);
      result.witness = std::move(d);
    }
  } catch (const ResourceLimitError&) {
    report.complete = false;
  }
  report.wall_time = watch.seconds();
  return report;
}

// ---------------------------------------------------------------------------
// Dead features

AnalysisReport dead_features_iterative(const CaFM& m, const AnalysisOptions& options) {
  return dead_iterative_impl(m, options, nullptr);
}

AnalysisReport dead_features_pruning(const CaFM& m, const AnalysisOptions& options) {
  return dead_pruning_impl(m, options, nullptr);
}

AnalysisReport dead_features_forall(const CaFM& m, const AnalysisOptions& options) {
  return feature_forall(m, m.features(), false, AnalysisKind::DeadFeatures, options);
}

// ---------------------------------------------------------------------------
// False optional features

AnalysisReport false_optional_iterative(const CaFM& m, const AnalysisOptions& options) {
  Stopwatch watch;
  auto report = start_report(AnalysisKind::FalseOptional, Approach::Iterative, options, FeatureSetResult{});
  auto& found = std::get<FeatureSetResult>(report.payload).features;
  IncrementalSolver solver(options.seed);
  for (const auto& f : m.features()) solver.declare(f);
  const auto candidates = exempted(m, options);
  try {
    solver.push(m.formula());
    std::set<std::string> pending(candidates.begin(), candidates.end());
    for (const auto& f : candidates) {
      if (!pending.erase(f)) continue;
      solver.push(neg_var(f));
      SatVerdict v = solver.check_sat(options.budget);
      solver.pop();
      if (!v.sat) {
        found.insert(f);
        if (options.stop_mode == StopMode::FirstAnomaly) break;
        continue;
      }
      std::erase_if(pending, [&](const std::string& o) { return !v.model.at(o); });
    }
  } catch (const ResourceLimitError&) {
    report.complete = false;
  }
  report.stats.sat_calls = solver.sat_calls();
  report.wall_time = watch.seconds();
  return report;
}

AnalysisReport false_optional_pruning(const CaFM& m, const AnalysisOptions& options) {
  Stopwatch watch;
  auto report = start_report(AnalysisKind::FalseOptional, Approach::Pruning, options, FeatureSetResult{});
  auto& found = std::get<FeatureSetResult>(report.payload).features;
  IncrementalSolver solver(options.seed);
  for (const auto& f : m.features()) solver.declare(f);
  std::vector<std::string> pending = exempted(m, options);
  try {
    solver.push(m.formula());
    while (!pending.empty()) {
      std::vector<Formula> any;
      for (const auto& f : pending) any.push_back(neg_var(f));
      solver.push(disjoin(any));
      SatVerdict v = solver.check_sat(options.budget);
      if (!v.sat) {
        found.insert(pending.begin(), pending.end());
        break;
      }
      std::erase_if(pending, [&](const std::string& f) { return !v.model.at(f); });
      solver.pop();
    }
  } catch (const ResourceLimitError&) {
    report.complete = false;
  }
  report.stats.sat_calls = solver.sat_calls();
  report.wall_time = watch.seconds();
  return report;
}

AnalysisReport false_optional_forall(const CaFM& m, const AnalysisOptions& options) {
  return feature_forall(m, m.optional(), true, AnalysisKind::FalseOptional, options);
}

// ---------------------------------------------------------------------------
// Combined feature analysis

AnalysisReport feature_analysis(const CaFM& m, Approach approach, const AnalysisOptions& options) {
  if (approach == Approach::Oracle) return oracle_report(m, AnalysisKind::AllFeatures, options, 0);

  Stopwatch watch;
  auto report = start_report(AnalysisKind::AllFeatures, approach, options, FeatureAnalysisResult{});
  auto& result = std::get<FeatureAnalysisResult>(report.payload);

  std::set<std::string> deselected;
  AnalysisReport dead;
  switch (approach) {
    case Approach::Iterative: dead = dead_iterative_impl(m, options, &deselected); break;
    case Approach::Pruning: dead = dead_pruning_impl(m, options, &deselected); break;
    default: dead = dead_features_forall(m, options); break;
  }
  result.dead = std::get<FeatureSetResult>(dead.payload).features;
  merge_stats(report.stats, dead.stats);
  report.complete = dead.complete;

  bool stop = !dead.complete || (options.stop_mode == StopMode::FirstAnomaly && !result.dead.empty());
  if (!stop) {
    AnalysisOptions fo_options = options;
    fo_options.known_deselectable.insert(deselected.begin(), deselected.end());
    AnalysisReport fo;
    switch (approach) {
      case Approach::Iterative: fo = false_optional_iterative(m, fo_options); break;
      case Approach::Pruning: fo = false_optional_pruning(m, fo_options); break;
      default: fo = false_optional_forall(m, fo_options); break;
    }
    result.false_optional = std::get<FeatureSetResult>(fo.payload).features;
    merge_stats(report.stats, fo.stats);
    report.complete = fo.complete;
  }
  report.wall_time = watch.seconds();
  return report;
}

// ---------------------------------------------------------------------------
// Redundancy

AnalysisReport redundancy_check(const CaFM& m, std::size_t candidate_index, Approach approach,
                                const AnalysisOptions& options) {
  if (approach == Approach::Oracle)
    return oracle_report(m, AnalysisKind::Redundancy, options, candidate_index);
  if (approach == Approach::Pruning) throw Error("pruning does not apply to redundancy");

  Stopwatch watch;
  auto parts = top_level_conjuncts(m);
  if (candidate_index >= parts.size())
    throw Error("candidate index " + std::to_string(candidate_index) + " out of range (" +
                std::to_string(parts.size()) + " conjuncts)");
  Formula candidate = parts[candidate_index];
  parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(candidate_index));
  Formula rest = conjoin(parts);

  auto report = start_report(AnalysisKind::Redundancy, approach, options,
                             RedundancyResult{false, candidate_index});
  auto& result = std::get<RedundancyResult>(report.payload);
  try {
    if (approach == Approach::Iterative) {
      IncrementalSolver solver(options.seed);
      solver.push(rest);
      solver.push(Formula::negation(candidate));
      result.redundant = !solver.check_sat(options.budget).sat;
      report.stats.sat_calls = solver.sat_calls();
    } else {
      ExistsForallProblem problem;
      problem.exists_vars.insert(m.contexts().begin(), m.contexts().end());
      problem.exists_vars.insert(m.features().begin(), m.features().end());
      problem.matrix = Formula::conjunction(rest, Formula::negation(candidate));
      QbfVerdict v = solve_exists_forall(problem, QbfOptions{options.seed, options.budget, std::nullopt, {}});
      result.redundant = !v.sat;
      report.stats.sat_calls = v.sat_calls;
      report.stats.refinement_count = v.refinement_count;
    }
  } catch (const ResourceLimitError&) {
    report.complete = false;
  }
  report.wall_time = watch.seconds();
  return report;
}

AnalysisReport redundancy_check_formula(const CaFM& m, const Formula& candidate,
                                        const AnalysisOptions& options) {
  for (const auto& v : vars(candidate))
    if (!m.is_context(v) && !m.is_feature(v))
      throw ValidationError("candidate variable '" + v + "' is neither a context nor a feature");
  Stopwatch watch;
  auto report = start_report(AnalysisKind::Redundancy, Approach::Iterative, options, RedundancyResult{});
  auto& result = std::get<RedundancyResult>(report.payload);
  IncrementalSolver solver(options.seed);
  try {
    solver.push(m.formula());
    solver.push(Formula::negation(candidate));
    result.redundant = !solver.check_sat(options.budget).sat;
  } catch (const ResourceLimitError&) {
    report.complete = false;
  }
  report.stats.sat_calls = solver.sat_calls();
  report.wall_time = watch.seconds();
  return report;
}

// ---------------------------------------------------------------------------
// Oracle

namespace {

// Postfix program evaluating a formula on 64 assignments at once.
class BitProgram {
 public:
  BitProgram(const Formula& f, const std::unordered_map<std::string, int>& index) {
    compile(f, index);
  }

  std::uint64_t run(const std::vector<std::uint64_t>& var_words, std::vector<std::uint64_t>& stack) const {
    stack.clear();
    for (const auto& op : ops_) {
      switch (op.code) {
        case Code::Var: stack.push_back(var_words[static_cast<std::size_t>(op.arg)]); break;
        case Code::Const: stack.push_back(op.arg ? ~0ull : 0ull); break;
        case Code::Not: stack.back() = ~stack.back(); break;
        default: {
          std::uint64_t r = stack.back();
          stack.pop_back();
          std::uint64_t& l = stack.back();
          if (op.code == Code::And) l &= r;
          else if (op.code == Code::Or) l |= r;
          else l = ~l | r;
        }
      }
    }
    return stack.back();
  }

 private:
  enum class Code : std::uint8_t { Var, Const, Not, And, Or, Implies };
  struct Op {
    Code code;
    int arg;
  };

  void compile(const Formula& f, const std::unordered_map<std::string, int>& index) {
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::Var: ops_.push_back({Code::Var, index.at(f.name())}); return;
      case K::True: ops_.push_back({Code::Const, 1}); return;
      case K::False: ops_.push_back({Code::Const, 0}); return;
      case K::Not:
        compile(f.child(), index);
        ops_.push_back({Code::Not, 0});
        return;
      default:
        compile(f.left(), index);
        compile(f.right(), index);
        ops_.push_back({f.kind() == K::And ? Code::And : f.kind() == K::Or ? Code::Or : Code::Implies, 0});
    }
  }

  std::vector<Op> ops_;
};

}  // namespace

OracleRecord oracle(const CaFM& m, std::size_t cap) {
  const std::size_t k = m.contexts().size();
  const std::size_t n = k + m.features().size();
  if (n > cap)
    throw Error("oracle needs " + std::to_string(n) + " variables, cap is " + std::to_string(cap));

  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < m.contexts().size(); ++i) index.emplace(m.contexts()[i], static_cast<int>(i));
  for (std::size_t i = 0; i < m.features().size(); ++i)
    index.emplace(m.features()[i], static_cast<int>(k + i));

  std::vector<BitProgram> programs;
  for (const auto& part : conjuncts(m.formula())) programs.emplace_back(part, index);
  const std::size_t parts = programs.size();

  // Variable i is bit i of the assignment number; assignment a sits in lane
  // a % 64 of word a / 64.
  constexpr std::array<std::uint64_t, 6> kLaneMasks = {
      0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
      0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
  const std::uint64_t total = 1ull << n;
  const std::uint64_t words = std::max<std::uint64_t>(1, total / 64);
  const std::uint64_t lane_mask = total >= 64 ? ~0ull : ((1ull << total) - 1);

  std::vector<char> context_ok(std::size_t{1} << k, 0);
  std::vector<char> selectable(m.features().size(), 0), deselectable(m.features().size(), 0);
  std::vector<char> needed(parts, 0);  // conjunct is the only false one somewhere

  std::vector<std::uint64_t> var_words(n), vals(parts), prefix(parts + 1), suffix(parts + 1), stack;
  for (std::uint64_t w = 0; w < words; ++w) {
    for (std::size_t i = 0; i < n; ++i)
      var_words[i] = i < 6 ? kLaneMasks[i] : (((w >> (i - 6)) & 1u) ? ~0ull : 0ull);
    for (std::size_t p = 0; p < parts; ++p) vals[p] = programs[p].run(var_words, stack) & lane_mask;

    prefix[0] = lane_mask;
    for (std::size_t p = 0; p < parts; ++p) prefix[p + 1] = prefix[p] & vals[p];
    suffix[parts] = lane_mask;
    for (std::size_t p = parts; p-- > 0;) suffix[p] = suffix[p + 1] & vals[p];
    for (std::size_t p = 0; p < parts; ++p)
      if ((prefix[p] & suffix[p + 1] & ~vals[p]) != 0) needed[p] = 1;

    const std::uint64_t sat = prefix[parts];
    if (!sat) continue;
    for (std::size_t j = 0; j < m.features().size(); ++j) {
      const std::uint64_t v = var_words[k + j];
      if (sat & v) selectable[j] = 1;
      if (sat & ~v) deselectable[j] = 1;
    }
    for (std::uint64_t bits = sat; bits; bits &= bits - 1) {
      std::uint64_t a = w * 64 + static_cast<std::uint64_t>(std::countr_zero(bits));
      context_ok[static_cast<std::size_t>(a & ((1ull << k) - 1))] = 1;
    }
  }

  OracleRecord out;
  out.valid_contexts = static_cast<std::uint64_t>(std::count(context_ok.begin(), context_ok.end(), 1));
  // True-first order: the first context is the most significant choice.
  for (std::uint64_t t = 0; t < (1ull << k); ++t) {
    std::uint64_t ctx = 0;
    ContextAssignment d;
    for (std::size_t j = 0; j < k; ++j) {
      bool value = ((t >> (k - 1 - j)) & 1u) == 0;
      if (value) {
        ctx |= 1ull << j;
        d.truthy.insert(m.contexts()[j]);
      }
    }
    if (!context_ok[static_cast<std::size_t>(ctx)]) {
      out.is_void = true;
      out.void_witness = std::move(d);
      break;
    }
  }
  for (std::size_t j = 0; j < m.features().size(); ++j) {
    const auto& f = m.features()[j];
    if (!selectable[j]) out.dead.insert(f);
    if (!deselectable[j] && m.is_optional(f)) out.false_optional.insert(f);
  }
  out.redundant.resize(parts);
  for (std::size_t p = 0; p < parts; ++p) out.redundant[p] = !needed[p];
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch

AnalysisReport run_analysis(const CaFM& m, AnalysisKind kind, Approach approach,
                            const AnalysisOptions& options, std::size_t candidate_index) {
  if (!is_applicable(kind, approach))
    throw Error(std::string(to_string(approach)) + " does not apply to " + std::string(to_string(kind)));
  if (approach == Approach::Oracle) return oracle_report(m, kind, options, candidate_index);
  switch (kind) {
    case AnalysisKind::Voidness:
      return approach == Approach::Forall ? voidness_forall(m, options) : voidness_iterative(m, options);
    case AnalysisKind::DeadFeatures:
      if (approach == Approach::Forall) return dead_features_forall(m, options);
      if (approach == Approach::Pruning) return dead_features_pruning(m, options);
      return dead_features_iterative(m, options);
    case AnalysisKind::FalseOptional:
      if (approach == Approach::Forall) return false_optional_forall(m, options);
      if (approach == Approach::Pruning) return false_optional_pruning(m, options);
      return false_optional_iterative(m, options);
    case AnalysisKind::AllFeatures: return feature_analysis(m, approach, options);
    case AnalysisKind::Redundancy: return redundancy_check(m, candidate_index, approach, options);
  }
  throw Error("unknown analysis");
}

AnalysisReport run_portfolio(const CaFM& m, AnalysisKind kind, const AnalysisOptions& options,
                             std::size_t candidate_index) {
  std::vector<Approach> members;
  for (auto a : {Approach::Iterative, Approach::Forall, Approach::Pruning})
    if (is_applicable(kind, a)) members.push_back(a);

  Stopwatch watch;
  std::stop_source cancel;
  std::stop_callback forward(options.budget.stop, [&] { cancel.request_stop(); });

  std::mutex mutex;
  std::optional<AnalysisReport> winner;
  std::optional<AnalysisReport> fallback;
  std::exception_ptr failure;
  {
    std::vector<std::jthread> workers;
    for (Approach a : members) {
      workers.emplace_back([&, a] {
        AnalysisOptions mine = options;
        mine.budget.stop = cancel.get_token();
        try {
          AnalysisReport r = run_analysis(m, kind, a, mine, candidate_index);
          std::lock_guard lock(mutex);
          if (r.complete && !winner) {
            winner = std::move(r);
            cancel.request_stop();
          } else if (!fallback) {
            fallback = std::move(r);
          }
        } catch (...) {
          std::lock_guard lock(mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (!winner && failure) std::rethrow_exception(failure);
  AnalysisReport out = winner ? *winner : *fallback;
  out.wall_time = watch.seconds();
  return out;
}

}  // namespace cafm
