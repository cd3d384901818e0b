// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#include "cafm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "cafm/document.hpp"
#include "cafm/errors.hpp"

namespace cafm {

namespace {

struct Job {
  std::size_t instance;
  AnalysisKind analysis;
  Approach approach;
  int rep;
};

BenchRow run_job(const BenchInstance& inst, const Job& job, const BenchConfig& config) {
  BenchRow row;
  row.instance = inst.id;
  row.analysis = job.analysis;
  row.approach = job.approach;
  row.rep = job.rep;
  row.seed = config.seed + static_cast<std::uint64_t>(job.rep);

  AnalysisOptions options;
  options.stop_mode = config.stop_mode;
  options.seed = row.seed;
  try {
    options.budget = Budget::with_timeout(std::chrono::duration<double>(config.timeout_secs));
    AnalysisReport report = run_analysis(inst.model, job.analysis, job.approach, options);
    if (report.complete) {
      row.wall_time = report.wall_time;
      row.verdict = report.verdict();
    } else {
      row.timeout = true;
      row.wall_time = config.timeout_secs;
      row.verdict = "timeout";
    }
  } catch (const std::exception& e) {
    row.verdict = "error";
    row.error = e.what();
  }
  return row;
}

}  // namespace

BenchResult run_bench(const std::vector<BenchInstance>& instances, const BenchConfig& config) {
  if (config.repetitions < 1) throw Error("repetitions must be at least 1");
  if (!(config.timeout_secs > 0)) throw Error("timeout must be positive");

  std::vector<Job> jobs;
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (AnalysisKind a : config.analyses)
      for (Approach p : config.approaches)
        if (is_applicable(a, p))
          for (int r = 0; r < config.repetitions; ++r) jobs.push_back(Job{i, a, p, r});

  BenchResult result;
  result.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();)
      result.rows[j] = run_job(instances[jobs[j].instance], jobs[j], config);
  };
  {
    std::vector<std::jthread> pool;
    const int workers = std::max(1, config.parallel);
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  result.summary = summarize(instances, result.rows, config);
  return result;
}

BenchSummary summarize(const std::vector<BenchInstance>& instances, const std::vector<BenchRow>& rows,
                       const BenchConfig& config) {
  BenchSummary summary;
  std::map<std::string, std::size_t> contexts_of;
  for (const auto& inst : instances) contexts_of[inst.id] = inst.model.contexts().size();

  // Group rows by (instance, analysis) in first-seen order.
  std::vector<std::pair<std::string, AnalysisKind>> order;
  std::map<std::pair<std::string, AnalysisKind>, std::vector<const BenchRow*>> groups;
  for (const auto& row : rows) {
    auto key = std::make_pair(row.instance, row.analysis);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&row);
  }

  std::map<std::tuple<AnalysisKind, std::size_t, std::string>, BestCountRow> counts;
  for (const auto& key : order) {
    const auto& group = groups[key];
    InstanceSummary s;
    s.instance = key.first;
    s.analysis = key.second;
    s.contexts = contexts_of.count(key.first) ? contexts_of[key.first] : 0;

    std::map<Approach, std::vector<double>> times;
    std::map<std::string, std::set<Approach>> verdicts;
    for (const BenchRow* row : group) {
      auto& t = s.timings[row->approach];
      if (row->verdict == "error") {
        ++t.errors;
        continue;
      }
      times[row->approach].push_back(row->wall_time);
      if (row->timeout) ++t.timeouts;
      else verdicts[row->verdict].insert(row->approach);
    }
    for (auto& [approach, ts] : times) {
      auto& t = s.timings[approach];
      t.runs = static_cast<int>(ts.size());
      double sum = 0;
      for (double x : ts) sum += x;
      t.mean = sum / static_cast<double>(ts.size());
      double sq = 0;
      for (double x : ts) sq += (x - t.mean) * (x - t.mean);
      t.stddev = ts.size() > 1 ? std::sqrt(sq / static_cast<double>(ts.size() - 1)) : 0.0;
    }

    if (verdicts.size() > 1) {
      std::string msg = "instance " + s.instance + ", " + std::string(to_string(s.analysis)) + ":";
      for (const auto& [verdict, approaches] : verdicts)
        for (Approach a : approaches) msg += " " + std::string(to_string(a)) + "=" + verdict;
      summary.disagreements.push_back(msg);
    }
    s.category = verdicts.empty() ? "unsolved" : verdicts.begin()->first;
    if (verdicts.empty()) summary.unsolved.push_back(s.instance + " (" + std::string(to_string(s.analysis)) + ")");

    // Best = lowest mean; ties go to the earlier approach in the config.
    double best = INFINITY, best_if = INFINITY;
    for (Approach a : config.approaches) {
      auto it = times.find(a);
      if (it == times.end() || s.timings[a].timeouts == s.timings[a].runs) continue;
      double mean = s.timings[a].mean;
      if (mean < best) {
        best = mean;
        s.best = a;
      }
      if ((a == Approach::Iterative || a == Approach::Forall) && mean < best_if) best_if = mean;
    }
    // With every run timed out the virtual best is the timeout itself.
    s.virtual_best = std::isfinite(best) ? best : config.timeout_secs;
    if (std::isfinite(best_if)) s.virtual_best_iterative_forall = best_if;

    auto it_it = times.find(Approach::Iterative), it_fa = times.find(Approach::Forall);
    if (it_it != times.end() && it_fa != times.end()) {
      double mi = s.timings[Approach::Iterative].mean, mf = s.timings[Approach::Forall].mean;
      if (mf < mi) summary.forall_beats_iterative[s.analysis].push_back(s.instance);
      if (mi < mf) summary.iterative_beats_forall[s.analysis].push_back(s.instance);
    }

    auto ckey = std::make_tuple(s.analysis, s.contexts, s.category);
    auto& crow = counts[ckey];
    crow.analysis = s.analysis;
    crow.contexts = s.contexts;
    crow.category = s.category;
    if (s.best) ++crow.best[*s.best];
    ++crow.total;

    summary.instances.push_back(std::move(s));
  }
  for (auto& [key, row] : counts) summary.best_counts.push_back(std::move(row));
  return summary;
}

std::vector<BenchInstance> load_instances(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("'" + dir.string() + "' is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<BenchInstance> out;
  for (const auto& f : files) out.push_back(BenchInstance{f.stem().string(), load_model(f)});
  return out;
}

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "instance,analysis,approach,rep,seed,wall_time_s,timeout,verdict\n";
  for (const auto& r : rows) {
    out << r.instance << ',' << to_string(r.analysis) << ',' << to_string(r.approach) << ',' << r.rep
        << ',' << r.seed << ',' << std::setprecision(9) << r.wall_time << ','
        << (r.timeout ? "true" : "false") << ',' << r.verdict << '\n';
  }
}

nlohmann::json summary_to_json(const BenchSummary& summary) {
  nlohmann::json instances = nlohmann::json::array();
  for (const auto& s : summary.instances) {
    nlohmann::json timings = nlohmann::json::object();
    for (const auto& [a, t] : s.timings)
      timings[std::string(to_string(a))] = {{"mean_s", t.mean},
                                            {"stddev_s", t.stddev},
                                            {"runs", t.runs},
                                            {"timeouts", t.timeouts},
                                            {"errors", t.errors}};
    instances.push_back({{"instance", s.instance},
                         {"analysis", std::string(to_string(s.analysis))},
                         {"contexts", s.contexts},
                         {"category", s.category},
                         {"timings", timings},
                         {"best", s.best ? nlohmann::json(std::string(to_string(*s.best))) : nlohmann::json()},
                         {"virtual_best_s", s.virtual_best},
                         {"virtual_best_iterative_forall_s",
                          s.virtual_best_iterative_forall ? nlohmann::json(*s.virtual_best_iterative_forall)
                                                          : nlohmann::json()}});
  }
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& row : summary.best_counts) {
    nlohmann::json best = nlohmann::json::object();
    for (const auto& [a, n] : row.best) best[std::string(to_string(a))] = n;
    tables.push_back({{"analysis", std::string(to_string(row.analysis))},
                      {"contexts", row.contexts},
                      {"category", row.category},
                      {"best", best},
                      {"total", row.total}});
  }
  auto to_names = [](const std::map<AnalysisKind, std::vector<std::string>>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : m) j[std::string(to_string(k))] = v;
    return j;
  };
  return {{"instances", instances},
          {"best_counts", tables},
          {"disagreements", summary.disagreements},
          {"unsolved", summary.unsolved},
          {"forall_beats_iterative", to_names(summary.forall_beats_iterative)},
          {"iterative_beats_forall", to_names(summary.iterative_beats_forall)}};
}

void print_summary(std::ostream& out, const BenchSummary& summary, const BenchConfig& config) {
  for (AnalysisKind kind : config.analyses) {
    std::vector<Approach> columns;
    for (Approach a : config.approaches)
      if (is_applicable(kind, a)) columns.push_back(a);
    out << "Best approach counts: " << to_string(kind) << "\n";
    out << std::left << std::setw(9) << "contexts" << std::setw(16) << "result";
    for (Approach a : columns) out << std::setw(11) << to_string(a);
    out << "total\n";
    std::map<Approach, int> grand;
    int grand_total = 0;
    for (const auto& row : summary.best_counts) {
      if (row.analysis != kind) continue;
      out << std::setw(9) << row.contexts << std::setw(16) << row.category;
      for (Approach a : columns) {
        auto it = row.best.find(a);
        int n = it == row.best.end() ? 0 : it->second;
        grand[a] += n;
        out << std::setw(11) << n;
      }
      out << row.total << "\n";
      grand_total += row.total;
    }
    out << std::setw(25) << "total";
    for (Approach a : columns) out << std::setw(11) << grand[a];
    out << grand_total << "\n";

    auto count = [&](const std::map<AnalysisKind, std::vector<std::string>>& m) {
      auto it = m.find(kind);
      return it == m.end() ? std::size_t{0} : it->second.size();
    };
    out << "  forall faster than iterative on " << count(summary.forall_beats_iterative)
        << " instances, iterative faster than forall on " << count(summary.iterative_beats_forall)
        << "\n\n";
  }
  out << std::right;
  if (!summary.unsolved.empty()) out << "unsolved: " << summary.unsolved.size() << "\n";
  for (const auto& d : summary.disagreements) out << "DISAGREEMENT " << d << "\n";
}

}  // namespace cafm
