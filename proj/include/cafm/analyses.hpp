// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Anomaly analyses for context-aware feature models, each in the strategy
// variants that apply to it:
//
//   Iterative  repeated incremental SAT calls with push/pop
//   Pruning    SAT models shrink the candidate set until one call is unsat
//   Forall     a single exists-forall query (CEGAR backend)
//   Oracle     exhaustive enumeration, for verification
//
// Every analysis returns an AnalysisReport. Running out of budget never
// throws: the report comes back with `complete == false` and whatever was
// established so far.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cafm/budget.hpp"
#include "cafm/formula.hpp"
#include "cafm/model.hpp"

namespace cafm {

enum class Approach { Iterative, Forall, Pruning, Oracle };
enum class AnalysisKind { Voidness, DeadFeatures, FalseOptional, AllFeatures, Redundancy };
enum class StopMode { FirstAnomaly, AllAnomalies };

std::string_view to_string(Approach a);
std::string_view to_string(AnalysisKind k);
std::string_view to_string(StopMode s);
std::optional<Approach> approach_from_string(std::string_view s);
std::optional<AnalysisKind> analysis_from_string(std::string_view s);

/// Pruning only applies to the feature analyses; Forall and Iterative to
/// everything; Oracle to everything.
bool is_applicable(AnalysisKind kind, Approach approach);

struct VoidnessResult {
  bool is_void = false;
  /// A context assignment without valid products, when void.
  std::optional<ContextAssignment> witness;
};

/// Dead or false-optional features found. Forall in first-anomaly mode finds
/// exactly one.
struct FeatureSetResult {
  std::set<std::string> features;
};

/// Dead features first, then false-optional ones.
struct FeatureAnalysisResult {
  std::set<std::string> dead;
  std::set<std::string> false_optional;
};

struct RedundancyResult {
  bool redundant = false;
  /// Index of the checked conjunct; empty for a free-standing candidate.
  std::optional<std::size_t> candidate_index;
};

using AnalysisPayload =
    std::variant<VoidnessResult, FeatureSetResult, FeatureAnalysisResult, RedundancyResult>;

struct SolverStatistics {
  std::uint64_t sat_calls = 0;
  std::uint64_t refinement_count = 0;
};

struct AnalysisReport {
  AnalysisKind kind = AnalysisKind::Voidness;
  Approach approach = Approach::Iterative;
  StopMode stop_mode = StopMode::AllAnomalies;
  AnalysisPayload payload;
  double wall_time = 0;  // seconds
  SolverStatistics stats;
  /// False when the budget ran out before the analysis finished.
  bool complete = true;

  /// Whether an anomaly was found (void, some dead/false-optional feature,
  /// or a redundant candidate).
  bool anomaly() const;
  /// One word summary comparable across approaches: "void", "not-void",
  /// "dead", "false-optional", "no-anomaly", "redundant", "not-redundant",
  /// or "incomplete".
  std::string verdict() const;
};

/// Called at each leaf of the context enumeration with the grounded
/// contexts and the satisfiability result.
using LeafObserver = std::function<void(const ContextAssignment&, bool sat)>;

struct AnalysisOptions {
  StopMode stop_mode = StopMode::AllAnomalies;
  std::uint64_t seed = 0;
  Budget budget;
  LeafObserver on_leaf;
  /// Features known to be deselected in some valid product; the iterative
  /// and pruning false-optional checks skip them.
  std::set<std::string> known_deselectable;
  /// Variable cap for the oracle.
  std::size_t oracle_cap = 22;
};

/// Exactly one of `names` is true: at least one, and no pair together.
/// Throws Error on an empty list.
Formula only_one(const std::vector<std::string>& names);

/// Fresh selector name for every feature of a domain, colliding with no
/// context or feature name.
class AuxVarMap {
 public:
  AuxVarMap(const CaFM& m, const std::vector<std::string>& domain);

  const std::string& aux(const std::string& feature) const { return to_aux_.at(feature); }
  const std::string& feature(const std::string& aux) const { return to_feature_.at(aux); }
  const std::vector<std::string>& aux_names() const { return aux_names_; }

 private:
  std::map<std::string, std::string> to_aux_;
  std::map<std::string, std::string> to_feature_;
  std::vector<std::string> aux_names_;
};

AnalysisReport voidness_iterative(const CaFM& m, const AnalysisOptions& options = {});
AnalysisReport voidness_forall(const CaFM& m, const AnalysisOptions& options = {});

AnalysisReport dead_features_iterative(const CaFM& m, const AnalysisOptions& options = {});
AnalysisReport dead_features_pruning(const CaFM& m, const AnalysisOptions& options = {});
AnalysisReport dead_features_forall(const CaFM& m, const AnalysisOptions& options = {});

AnalysisReport false_optional_iterative(const CaFM& m, const AnalysisOptions& options = {});
AnalysisReport false_optional_pruning(const CaFM& m, const AnalysisOptions& options = {});
AnalysisReport false_optional_forall(const CaFM& m, const AnalysisOptions& options = {});

/// Dead features, then false-optional ones. In first-anomaly mode a dead
/// feature ends the run. Models found during the dead-feature phase exempt
/// their deselected features from the false-optional phase.
AnalysisReport feature_analysis(const CaFM& m, Approach approach, const AnalysisOptions& options = {});

/// Whether conjunct `candidate_index` of the top-level conjunction is
/// implied by the other conjuncts. One SAT call (Iterative) or one
/// quantifier-free query (Forall). Throws Error when the formula is not a
/// conjunction or the index is out of range.
AnalysisReport redundancy_check(const CaFM& m, std::size_t candidate_index,
                                Approach approach = Approach::Iterative,
                                const AnalysisOptions& options = {});

/// Whether the whole formula implies `candidate`.
AnalysisReport redundancy_check_formula(const CaFM& m, const Formula& candidate,
                                        const AnalysisOptions& options = {});

/// Ground truth by enumerating every assignment of contexts and features.
struct OracleRecord {
  bool is_void = false;
  /// First void context in true-first enumeration order.
  std::optional<ContextAssignment> void_witness;
  std::set<std::string> dead;
  std::set<std::string> false_optional;
  /// Per top-level conjunct.
  std::vector<bool> redundant;
  /// Number of context assignments that admit a valid product.
  std::uint64_t valid_contexts = 0;
};

/// Throws Error when contexts plus features exceed `cap`.
OracleRecord oracle(const CaFM& m, std::size_t cap = 22);

/// Runs one analysis with one approach. Redundancy uses
/// `candidate_index`.
AnalysisReport run_analysis(const CaFM& m, AnalysisKind kind, Approach approach,
                            const AnalysisOptions& options = {}, std::size_t candidate_index = 0);

/// Races every applicable approach (oracle excluded) on its own thread and
/// returns the first complete report; the others are cancelled.
AnalysisReport run_portfolio(const CaFM& m, AnalysisKind kind, const AnalysisOptions& options = {},
                             std::size_t candidate_index = 0);

}  // namespace cafm
