// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#include "cafm/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cafm/bench.hpp"
#include "cafm/document.hpp"
#include "cafm/errors.hpp"
#include "cafm/generator.hpp"
#include "cafm/sat.hpp"

namespace cafm {

namespace {

constexpr int kExitError = 2;

struct CheckArgs {
  std::string file;
  std::string analysis = "voidness";
  std::string approach = "iterative";
  bool stop_at_first = false;
  std::uint64_t seed = 0;
  double timeout_secs = 0;
  std::size_t candidate_index = 0;
  std::string candidate;
  std::string output = "text";
  std::string dump_cnf;
};

struct GenerateArgs {
  std::size_t features = 0;
  std::size_t contexts = 0;
  double ratio = 0;
  std::uint64_t seed = 0;
  std::string distribution = "uniform";
  double exponent = 2.5;
  bool redraw = false;
  std::string output;
};

struct BenchArgs {
  std::string dir;
  std::vector<std::string> analyses{"voidness", "all-features"};
  std::vector<std::string> approaches{"iterative", "forall", "pruning"};
  int repetitions = 10;
  double timeout_secs = 300;
  int parallel = 1;
  std::string csv;
  std::string summary;
  std::uint64_t seed = 0;
  bool all_anomalies = false;
};

std::string join(const std::set<std::string>& names) {
  std::string s;
  for (const auto& n : names) s += (s.empty() ? "" : ", ") + n;
  return "{" + s + "}";
}

void print_text(std::ostream& out, const AnalysisReport& r) {
  out << "analysis: " << to_string(r.kind) << " (" << to_string(r.approach) << ", " << to_string(r.stop_mode)
      << ")\n";
  out << "verdict: " << r.verdict() << "\n";
  if (const auto* v = std::get_if<VoidnessResult>(&r.payload)) {
    if (v->witness) out << "witness context: " << join(v->witness->truthy) << "\n";
  } else if (const auto* f = std::get_if<FeatureSetResult>(&r.payload)) {
    out << "features: " << join(f->features) << "\n";
  } else if (const auto* a = std::get_if<FeatureAnalysisResult>(&r.payload)) {
    out << "dead: " << join(a->dead) << "\n";
    out << "false-optional: " << join(a->false_optional) << "\n";
  } else if (const auto* d = std::get_if<RedundancyResult>(&r.payload)) {
    if (d->candidate_index) out << "candidate index: " << *d->candidate_index << "\n";
  }
  out << "wall time: " << r.wall_time << " s\n";
  out << "sat calls: " << r.stats.sat_calls << ", refinements: " << r.stats.refinement_count << "\n";
  if (!r.complete) out << "incomplete: budget exhausted\n";
}

void dump_cnf(const CaFM& m, const std::string& path) {
  IncrementalSolver solver;
  for (const auto& c : m.contexts()) solver.declare(c);
  for (const auto& f : m.features()) solver.declare(f);
  solver.push(m.formula());
  std::ofstream file(path);
  if (!file) throw Error("cannot write '" + path + "'");
  solver.dump_dimacs(file);
}

int cmd_check(const CheckArgs& args, std::ostream& out) {
  CaFM m = load_model(args.file);
  if (!args.dump_cnf.empty()) dump_cnf(m, args.dump_cnf);

  auto kind = analysis_from_string(args.analysis);
  if (!kind) throw Error("unknown analysis '" + args.analysis + "'");
  const bool portfolio = args.approach == "portfolio";
  auto approach = approach_from_string(args.approach);
  if (!portfolio && !approach) throw Error("unknown approach '" + args.approach + "'");

  AnalysisOptions options;
  options.stop_mode = args.stop_at_first ? StopMode::FirstAnomaly : StopMode::AllAnomalies;
  options.seed = args.seed;
  if (args.timeout_secs > 0)
    options.budget = Budget::with_timeout(std::chrono::duration<double>(args.timeout_secs));

  AnalysisReport report;
  if (!args.candidate.empty()) {
    if (*kind != AnalysisKind::Redundancy) throw Error("--candidate needs --analysis redundancy");
    report = redundancy_check_formula(m, parse(args.candidate), options);
  } else if (portfolio) {
    report = run_portfolio(m, *kind, options, args.candidate_index);
  } else {
    report = run_analysis(m, *kind, *approach, options, args.candidate_index);
  }

  if (args.output == "json") out << report_to_json(report).dump(2) << "\n";
  else print_text(out, report);
  if (!report.complete) return kExitError;
  return report.anomaly() ? 1 : 0;
}

int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
  GenSpec spec;
  spec.n_features = args.features;
  spec.n_contexts = args.contexts;
  spec.ratio = args.ratio;
  spec.seed = args.seed;
  spec.exponent = args.exponent;
  spec.redraw_context_only = args.redraw;
  if (args.distribution == "uniform") spec.distribution = Distribution::Uniform;
  else if (args.distribution == "power-law") spec.distribution = Distribution::PowerLaw;
  else throw Error("unknown distribution '" + args.distribution + "'");

  GeneratedInstance inst = generate(spec);
  CaFmDocument doc = to_document(inst.model, generator_metadata(spec, inst));
  std::ostream* info = &out;
  if (args.output.empty()) {
    out << document_text(doc);
    info = &err;
  } else {
    write_document(args.output, doc);
  }
  *info << "clauses drawn: " << inst.clauses_drawn << ", removed (context-only): " << inst.clauses_removed
        << ", kept: " << inst.clauses.size() << "\n";
  return 0;
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  BenchConfig config;
  config.analyses.clear();
  for (const auto& a : args.analyses) {
    auto k = analysis_from_string(a);
    if (!k) throw Error("unknown analysis '" + a + "'");
    config.analyses.push_back(*k);
  }
  config.approaches.clear();
  for (const auto& a : args.approaches) {
    auto p = approach_from_string(a);
    if (!p) throw Error("unknown approach '" + a + "'");
    config.approaches.push_back(*p);
  }
  config.repetitions = args.repetitions;
  config.timeout_secs = args.timeout_secs;
  config.parallel = args.parallel;
  config.seed = args.seed;
  config.stop_mode = args.all_anomalies ? StopMode::AllAnomalies : StopMode::FirstAnomaly;

  auto instances = load_instances(args.dir);
  if (instances.empty()) throw Error("no *.json instances in '" + args.dir + "'");
  BenchResult result = run_bench(instances, config);

  if (!args.csv.empty()) {
    std::ofstream csv(args.csv);
    if (!csv) throw Error("cannot write '" + args.csv + "'");
    write_csv(csv, result.rows);
  }
  if (!args.summary.empty()) {
    std::ofstream js(args.summary);
    if (!js) throw Error("cannot write '" + args.summary + "'");
    js << summary_to_json(result.summary).dump(2) << "\n";
  }
  print_summary(out, result.summary, config);
  for (const auto& row : result.rows)
    if (row.verdict == "error")
      err << "error: " << row.instance << " " << to_string(row.analysis) << " " << to_string(row.approach)
          << " rep " << row.rep << ": " << row.error << "\n";
  if (!result.summary.disagreements.empty()) {
    err << "error: cross-approach disagreement on " << result.summary.disagreements.size() << " instance(s)\n";
    return kExitError;
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Anomaly analyses for context-aware feature models", "cafm"};
  app.require_subcommand(1);

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Run one analysis on a CaFM file");
  check_cmd->add_option("file", check.file, "CaFM JSON file")->required();
  check_cmd->add_option("--analysis", check.analysis, "voidness|dead|false-optional|redundancy|all-features")
      ->check(CLI::IsMember({"voidness", "dead", "false-optional", "redundancy", "all-features"}));
  check_cmd->add_option("--approach", check.approach, "iterative|forall|pruning|oracle|portfolio")
      ->check(CLI::IsMember({"iterative", "forall", "pruning", "oracle", "portfolio"}));
  check_cmd->add_flag("--stop-at-first", check.stop_at_first, "Stop at the first anomaly");
  check_cmd->add_option("--seed", check.seed, "Solver seed");
  check_cmd->add_option("--timeout-secs", check.timeout_secs, "Wall-clock limit, 0 for none");
  check_cmd->add_option("--candidate-index", check.candidate_index, "Top-level conjunct to check for redundancy");
  check_cmd->add_option("--candidate", check.candidate, "Check whether the formula implies this one");
  check_cmd->add_option("--output", check.output, "json|text")->check(CLI::IsMember({"json", "text"}));
  check_cmd->add_option("--dump-cnf", check.dump_cnf, "Write the formula's CNF in DIMACS to PATH");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Generate a random CaFM");
  gen_cmd->add_option("--features", gen.features, "Number of features")->required();
  gen_cmd->add_option("--contexts", gen.contexts, "Number of contexts")->required();
  gen_cmd->add_option("--ratio", gen.ratio, "Clauses per feature")->required();
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--distribution", gen.distribution, "uniform|power-law");
  gen_cmd->add_option("--exponent", gen.exponent, "Power-law exponent");
  gen_cmd->add_flag("--redraw-context-only", gen.redraw, "Redraw context-only clauses instead of dropping them");
  gen_cmd->add_option("-o,--output", gen.output, "Output file (stdout when omitted)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time the approaches on a directory of instances");
  bench_cmd->add_option("dir", bench.dir, "Directory of CaFM JSON files")->required();
  bench_cmd->add_option("--analyses", bench.analyses, "Comma-separated analyses")->delimiter(',');
  bench_cmd->add_option("--approaches", bench.approaches, "Comma-separated approaches")->delimiter(',');
  bench_cmd->add_option("--repetitions", bench.repetitions, "Runs per instance and approach");
  bench_cmd->add_option("--timeout-secs", bench.timeout_secs, "Per-run wall-clock limit");
  bench_cmd->add_option("--parallel", bench.parallel, "Worker threads");
  bench_cmd->add_option("--csv", bench.csv, "Per-run CSV output");
  bench_cmd->add_option("--summary", bench.summary, "JSON summary output");
  bench_cmd->add_option("--seed", bench.seed, "Base seed; repetition r uses seed + r");
  bench_cmd->add_flag("--all-anomalies", bench.all_anomalies, "Collect every anomaly instead of stopping at the first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (*check_cmd) return cmd_check(check, out);
    if (*gen_cmd) return cmd_generate(gen, out, err);
    if (*bench_cmd) return cmd_bench(bench, out, err);
  } catch (const ParseError& e) {
    err << "error: parse error at line " << e.line() << ", column " << e.column() << ": " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace cafm
