#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrc/classifier.hpp"
#include "nrc/heuristics.hpp"
#include "nrc/instance.hpp"

namespace nrc {

// Raised when delta strategies disagree; the message names the diverging runs.
class ExactnessError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct BenchRow {
  std::string instance;
  std::string heuristic;
  std::string mode;    // evaluation strategy, or "filtered"
  std::string filter;  // filter size, "-" when unfiltered
  std::uint64_t seed = 0;
  std::int64_t evals = 0;
  std::int64_t classifier_calls = 0;
  double mean_eval_us = 0;  // (eval + classify time) / evals
  double total_eval_ms = 0;
  Cost final_z = 0;
  double quality_diff = 0;  // final Z minus the reference run's final Z
  double reject_pct = 0;
  double accept_pct = 0;
  double speedup = 1;  // reference evaluation time / this row's evaluation time
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<std::string> notes;

  std::string to_csv() const;
};

// One finished solver run, kept for export.
struct RunRecord {
  std::string label;  // e.g. "ts-dec" or "ts-filtered"
  std::uint64_t seed = 0;
  SolverTrace trace;
};

struct BenchOptions {
  int stop = 200;
  std::int64_t max_iterations = 1'000'000;
  int tabu_capacity = 10;
  int warmup_runs = 1;  // discarded runs before measuring
};

// Every (heuristic, strategy, seed) from the same greedy start. Throws ExactnessError when
// the strategies disagree on final Z or evaluation count. Speedups are against ΔEC when
// it is part of the set, otherwise against the first strategy.
BenchReport bench_evaluation_modes(const ProblemInstance& instance, const std::vector<Heuristic>& heuristics,
                                   const std::vector<EvaluationStrategy>& strategies,
                                   const std::vector<std::uint64_t>& seeds, const BenchOptions& options = {},
                                   std::vector<RunRecord>* runs = nullptr);

struct FilteredOptions {
  Heuristic heuristic = Heuristic::TabuSearch;
  BenchOptions bench;
  bool audit = true;
};

struct FilteredSummary {
  BenchReport report;  // standard and filtered row per seed
  std::vector<RunRecord> runs;
  double speedup = 0;  // sum standard eval time / sum filtered (eval + classify) time
  double mean_standard_z = 0;
  double mean_filtered_z = 0;
  double quality_diff = 0;  // mean filtered Z - mean standard Z
  MisclassCounter misclass;
};

// Standard ΔEC runs against filtered runs with the same seeds and stopping rule.
FilteredSummary bench_filtered_vs_standard(const ProblemInstance& instance,
                                           std::shared_ptr<const CandidateScorer> scorer,
                                           const std::vector<std::uint64_t>& seeds, FilterSize filter_size,
                                           const FilteredOptions& options = {});

// One CSV per run (<label>_<seed>.csv) plus merged.csv sorted by elapsed time. Returns the
// written paths; nothing is written for an empty run set.
std::vector<std::string> trace_export(const std::vector<RunRecord>& runs, const std::string& directory);
std::string merged_trace_csv(const std::vector<RunRecord>& runs);
// One JSON object per run summary and per trace point.
std::string event_log_jsonl(const std::vector<RunRecord>& runs);

enum class MutationKind { AddConstraints, RemoveConstraints, AddEmployees, RemoveEmployees };

struct Mutation {
  MutationKind kind = MutationKind::AddConstraints;
  int count = 1;

  std::string name() const;  // "sc+", "3sc-", "e+", ...
  static Mutation parse(const std::string& text);
};

// sc+, sc-, 3sc+, 3sc-, e+, e-, 3e+, 3e-
std::vector<Mutation> all_mutations();

// Added constraints follow a few pattern templates; added employees clone existing ones.
// With rescale_coverage, demands become round(required * n' / n).
ProblemInstance mutate(const ProblemInstance& base, const Mutation& mutation, std::uint64_t seed,
                       bool rescale_coverage = true);

using ScorerFactory = std::function<std::shared_ptr<const CandidateScorer>(const ProblemInstance&)>;

struct RobustnessEntry {
  std::string mutation;
  bool skipped = false;
  std::string reason;
  int n = 0;
  int constraints = 0;
  FilteredSummary result;
};

struct RobustnessReport {
  std::vector<RobustnessEntry> entries;
  std::int64_t training_calls = 0;  // train_mlp calls during the suite; must be 0
  BenchReport combined;             // rows of every entry, instance column names the mutation
};

RobustnessReport robustness_suite(const ProblemInstance& base, const ScorerFactory& scorer,
                                  const std::vector<Mutation>& mutations, const std::vector<std::uint64_t>& seeds,
                                  FilterSize filter_size, const FilteredOptions& options = {});

struct CallCosts {
  std::int64_t calls = 0;
  double classify_ns = 0;  // mean per candidate (one score per changed employee)
  double eval_ns = 0;      // mean ΔEC probe per candidate
  double ratio = 0;        // eval_ns / classify_ns
};

// Times scoring and ΔEC probes on the same neighborhood candidates of greedy rosters.
CallCosts measure_call_costs(const ProblemInstance& instance, const CandidateScorer& scorer, std::int64_t calls,
                             std::uint64_t seed = 1);

}  // namespace nrc
