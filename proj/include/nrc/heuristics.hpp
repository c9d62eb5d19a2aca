#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nrc/constraints.hpp"
#include "nrc/instance.hpp"
#include "nrc/roster.hpp"

namespace nrc {

// Fixed-capacity ring of move records. A record also forbids its undo (same cells, shifts
// exchanged back) and its mirrored swap (emp_a and emp_b exchanged).
class TabuList {
 public:
  explicit TabuList(int capacity) : capacity_(capacity < 0 ? 0 : capacity) {}

  int capacity() const noexcept { return capacity_; }
  void add(const TabuRecord& record);
  bool contains(const TabuRecord& record) const;  // exact equality
  bool forbids(const TabuRecord& record) const;   // equality up to undo / mirror

 private:
  int capacity_;
  std::size_t next_ = 0;
  std::vector<TabuRecord> ring_;
};

struct TerminationEntry {
  Cost roster_penalty = std::numeric_limits<Cost>::max();
  int iteration = 0;
};

// Employee with the largest Z_i among those with iteration <= tabu_capacity; lowest index on ties.
std::optional<int> select_employee(std::span<const Cost> per_employee_z, std::span<const TerminationEntry> info,
                                   int tabu_capacity);

// Swaps (emp_a, emp_b, day) over emp_b then day, followed by coverage-preserving replaces
// (day, shift). Moves touching fixed cells or breaking skill/rest rules are skipped.
std::vector<CandidateMove> neighborhood(const ProblemInstance& instance, const Roster& roster, int emp_a);
void neighborhood(const ProblemInstance& instance, const Roster& roster, int emp_a, std::vector<CandidateMove>& out);

// Whether the single-cell change keeps the employee's skill and rest rules.
bool cell_feasible(const ProblemInstance& instance, const Roster& roster, int employee, int day, Shift shift);

// Scores the change of one employee's cell; higher is better and 0.5 is neutral.
class CandidateScorer {
 public:
  virtual ~CandidateScorer() = default;
  virtual double score(int employee, int day, std::span<const Shift> row_before, Shift after) const = 0;
  // Throws DimensionMismatch if the scorer cannot be used on the instance.
  virtual void check_compatible(const ProblemInstance& instance) const { (void)instance; }
};

// The exact evaluator posing as a classifier: 0.5 - (Z_i(after) - Z_i(before)) / 2^20.
class OracleScorer final : public CandidateScorer {
 public:
  explicit OracleScorer(const ProblemInstance& instance);
  double score(int employee, int day, std::span<const Shift> row_before, Shift after) const override;

 private:
  RowEvaluator rows_;
  mutable std::vector<Shift> scratch_;
};

// The same score for every candidate.
class ConstantScorer final : public CandidateScorer {
 public:
  explicit ConstantScorer(double value = 0.5) : value_(value) {}
  double score(int, int, std::span<const Shift>, Shift) const override { return value_; }

 private:
  double value_;
};

// filter_size as an absolute count (>= 1) or as a fraction of the live neighborhood.
struct FilterSize {
  bool fraction = true;
  double value = 0.10;

  int resolve(int live) const;
  static FilterSize absolute(int count) { return {false, static_cast<double>(count)}; }
  static FilterSize of(double share) { return {true, share}; }
  static FilterSize parse(const std::string& text);  // "50" or "0.1"
  std::string to_string() const;
};

enum class Heuristic { TabuSearch, HillClimbing, SimulatedAnnealing };
std::string_view to_string(Heuristic heuristic);  // "ts", "hc", "sa"
Heuristic parse_heuristic(std::string_view text);

struct MisclassCounter {
  std::int64_t rejected = 0;
  std::int64_t incorrectly_rejected = 0;  // filtered out although the move improves Z
  std::int64_t accepted = 0;
  std::int64_t incorrectly_accepted = 0;  // retained although the move does not improve Z

  double reject_rate() const { return rejected ? 100.0 * incorrectly_rejected / rejected : 0.0; }
  double accept_rate() const { return accepted ? 100.0 * incorrectly_accepted / accepted : 0.0; }
  MisclassCounter& operator+=(const MisclassCounter& o);
};

// Called after each candidate loop (outside timed code) for every cost-evaluated candidate.
using CandidateObserver = std::function<void(const Roster& before, const CandidateMove& move, const DeltaResult& delta)>;

struct SolverConfig {
  Heuristic heuristic = Heuristic::TabuSearch;
  EvaluationStrategy strategy = EvaluationStrategy::DeltaEC;
  int tabu_capacity = 10;
  int stop = 200;                 // iterations without improvement of the best Z
  std::int64_t max_iterations = 1'000'000;
  std::uint64_t seed = 1;

  std::shared_ptr<const CandidateScorer> filter;  // classifier filter when set
  FilterSize filter_size;
  bool audit = false;  // cost-evaluate every classified candidate (untimed) to count misclassifications

  double sa_initial_temperature = 20.0;
  double sa_cooling = 0.995;
  std::int64_t sa_max_steps = 200'000;

  CandidateObserver observer;
};

struct TracePoint {
  double elapsed_us = 0;
  Cost best_z = 0;
  std::int64_t cost_evals = 0;
  std::int64_t classifier_calls = 0;
};

struct SolverTrace {
  std::vector<TracePoint> points;  // best-Z series, non-increasing
  std::int64_t iterations = 0;
  std::int64_t cost_evals = 0;
  std::int64_t classifier_calls = 0;
  std::int64_t tabu_skipped = 0;
  std::int64_t eval_ns = 0;      // time inside cost-evaluation loops
  std::int64_t classify_ns = 0;  // time inside classification loops (encoding included)
  std::int64_t work_units = 0;
  std::int64_t employee_rows = 0;
  std::int64_t choices_outside_filter = 0;  // must stay 0
  MisclassCounter misclass;
  Cost initial_z = 0;
  Cost final_z = 0;
  double wall_us = 0;
};

struct SolveResult {
  Roster best;
  Cost best_z = 0;
  SolverTrace trace;
};

SolveResult tabu_search(const ProblemInstance& instance, const Roster& initial, const SolverConfig& config);
// Same as tabu_search but requires config.filter.
SolveResult tabu_search_filtered(const ProblemInstance& instance, const Roster& initial, const SolverConfig& config);
SolveResult hill_climbing(const ProblemInstance& instance, const Roster& initial, const SolverConfig& config);
SolveResult simulated_annealing(const ProblemInstance& instance, const Roster& initial, const SolverConfig& config);
// Dispatches on config.heuristic.
SolveResult solve(const ProblemInstance& instance, const Roster& initial, const SolverConfig& config);

// Seeded greedy coverage filler respecting the hard rules; throws InfeasibleRoster. With
// balance_workload the employees furthest below their contract are filled first,
// otherwise the choice among feasible employees is uniform.
Roster greedy_initial(const ProblemInstance& instance, std::uint64_t seed, int attempts = 200,
                      bool balance_workload = true);

// CSV with columns elapsed_us,best_Z,cost_evals,classifier_calls.
std::string trace_to_csv(const SolverTrace& trace);

}  // namespace nrc
