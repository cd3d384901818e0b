// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Benchmark harness: every (instance, analysis, approach, repetition) run
// gets its own wall-clock timeout; a timed-out run is recorded at the
// timeout value. The summary mirrors the best-approach tables (per context
// count and result category) and the virtual-best series.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cafm/analyses.hpp"

namespace cafm {

struct BenchInstance {
  std::string id;
  CaFM model;
};

struct BenchConfig {
  std::vector<AnalysisKind> analyses{AnalysisKind::Voidness, AnalysisKind::AllFeatures};
  std::vector<Approach> approaches{Approach::Iterative, Approach::Forall, Approach::Pruning};
  int repetitions = 10;
  double timeout_secs = 300;
  int parallel = 1;
  StopMode stop_mode = StopMode::FirstAnomaly;
  std::uint64_t seed = 0;
};

struct BenchRow {
  std::string instance;
  AnalysisKind analysis = AnalysisKind::Voidness;
  Approach approach = Approach::Iterative;
  int rep = 0;
  std::uint64_t seed = 0;
  double wall_time = 0;
  bool timeout = false;
  /// AnalysisReport::verdict(), or "error".
  std::string verdict;
  std::string error;
};

struct ApproachTiming {
  double mean = 0;
  double stddev = 0;
  int runs = 0;
  int timeouts = 0;
  int errors = 0;
};

struct InstanceSummary {
  std::string instance;
  AnalysisKind analysis = AnalysisKind::Voidness;
  std::size_t contexts = 0;
  /// Agreed verdict of the completed runs, "unsolved" when none completed.
  std::string category;
  std::map<Approach, ApproachTiming> timings;
  std::optional<Approach> best;
  /// Minimum mean over all approaches.
  double virtual_best = 0;
  /// Minimum mean over iterative and forall only.
  std::optional<double> virtual_best_iterative_forall;
};

/// Best-approach counts keyed by (analysis, contexts, category).
struct BestCountRow {
  AnalysisKind analysis;
  std::size_t contexts;
  std::string category;
  std::map<Approach, int> best;
  int total = 0;
};

struct BenchSummary {
  std::vector<InstanceSummary> instances;
  std::vector<BestCountRow> best_counts;
  std::vector<std::string> disagreements;
  std::vector<std::string> unsolved;
  /// Instances where forall had the lower mean than iterative, and the reverse.
  std::map<AnalysisKind, std::vector<std::string>> forall_beats_iterative;
  std::map<AnalysisKind, std::vector<std::string>> iterative_beats_forall;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  BenchSummary summary;
};

/// Runs the grid. Pairs where the approach does not apply to the analysis
/// are skipped.
BenchResult run_bench(const std::vector<BenchInstance>& instances, const BenchConfig& config);

BenchSummary summarize(const std::vector<BenchInstance>& instances, const std::vector<BenchRow>& rows,
                       const BenchConfig& config);

/// Every *.json file of `dir`, sorted by name; the id is the file stem.
std::vector<BenchInstance> load_instances(const std::filesystem::path& dir);

/// Columns: instance,analysis,approach,rep,seed,wall_time_s,timeout,verdict
void write_csv(std::ostream& out, const std::vector<BenchRow>& rows);
nlohmann::json summary_to_json(const BenchSummary& summary);
void print_summary(std::ostream& out, const BenchSummary& summary, const BenchConfig& config);

}  // namespace cafm
