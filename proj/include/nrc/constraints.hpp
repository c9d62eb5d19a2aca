#pragma once

#include <array>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nrc/instance.hpp"
#include "nrc/roster.hpp"

namespace nrc {

// ---------------------------------------------------------------------------
// Hard constraints
// ---------------------------------------------------------------------------

struct HardViolation {
  enum class Kind { Skill, Rest, Fixed, Coverage };
  Kind kind;
  int employee = -1;  // -1 for coverage
  int day = -1;
  Shift shift = kDayOff;
  std::string detail;
};

std::vector<HardViolation> check_hard(const ProblemInstance& instance, const Roster& roster);
std::string_view to_string(HardViolation::Kind kind);

// Minutes from the end of the shift on day `day_a` to the start of the shift on `day_b`.
int rest_gap_minutes(const ProblemInstance& instance, int day_a, Shift a, int day_b, Shift b);

// ---------------------------------------------------------------------------
// Soft constraints and evaluation strategies
// ---------------------------------------------------------------------------

enum class EvaluationStrategy { Eval, DeltaC, DeltaE, DeltaEC, DeltaA };

inline constexpr std::array<EvaluationStrategy, 5> kAllStrategies = {
    EvaluationStrategy::Eval, EvaluationStrategy::DeltaC, EvaluationStrategy::DeltaE, EvaluationStrategy::DeltaEC,
    EvaluationStrategy::DeltaA};

std::string_view to_string(EvaluationStrategy strategy);       // "eval", "dc", "de", "dec", "da"
EvaluationStrategy parse_strategy(std::string_view text);       // throws std::invalid_argument

struct EvaluationResult {
  Cost total_z = 0;
  std::vector<Cost> per_employee_z;
  std::map<std::string, Cost> per_constraint;
};

EvaluationResult evaluate_full(const ProblemInstance& instance, const Roster& roster);
Cost evaluate_employee(const ProblemInstance& instance, const Roster& roster, int employee);
// Soft penalty of an arbitrary row for the given employee (the row need not be in a roster).
Cost evaluate_row(const ProblemInstance& instance, int employee, std::span<const Shift> row);

// Constraint evaluation work: one unit is one day cell inspected by one constraint
// (a pattern position costs its length). Used to compare strategies.
struct WorkCounters {
  std::int64_t units = 0;
  std::int64_t probes = 0;
  std::int64_t employee_rows = 0;  // employee rows visited by the evaluation
};

struct EmployeeDelta {
  int employee = -1;
  Cost before = 0;
  Cost after = 0;
};

struct DeltaResult {
  Cost delta_z = 0;  // Z(after) - Z(before)
  int affected = 0;
  std::array<EmployeeDelta, 2> employees{};
  std::int64_t units = 0;
  std::int64_t employee_rows = 0;
};

class CompiledConstraints;

// Per-row soft penalty with the instance's constraints compiled once.
class RowEvaluator {
 public:
  explicit RowEvaluator(const ProblemInstance& instance);
  Cost operator()(int employee, std::span<const Shift> row) const;

 private:
  std::shared_ptr<const CompiledConstraints> compiled_;
};

// Owns the evaluation cache (per employee/constraint penalties, pattern match counts,
// workload and shift-count accumulators) for one roster. Single owner; not thread safe.
class Evaluator {
 public:
  Evaluator(const ProblemInstance& instance, const Roster& roster);

  Cost total() const noexcept { return total_; }
  Cost employee_z(int employee) const { return employee_z_[employee]; }
  std::span<const Cost> per_employee() const { return employee_z_; }

  // delta_z = Z(after) - Z(before) for `roster` (which must match the cache). The cache is
  // left untouched.
  DeltaResult probe(const Roster& roster, const CandidateMove& move, EvaluationStrategy strategy) const;

  // Refresh the cache after `move` has been applied, `roster_after` is the new roster.
  void commit(const Roster& roster_after, const CandidateMove& move);

  // Throws InconsistentContext if the cache differs from a from-scratch recomputation.
  void verify(const Roster& roster) const;

  const WorkCounters& counters() const noexcept { return counters_; }
  void reset_counters() noexcept { counters_ = {}; }

 private:
  void rebuild_employee(int employee, std::span<const Shift> row);

  const ProblemInstance* instance_;
  std::shared_ptr<const CompiledConstraints> compiled_;
  mutable std::vector<int> active_;
  // [constraint * n + employee]
  std::vector<Cost> penalty_;
  std::vector<int> match_count_;
  std::vector<int> work_minutes_;
  std::vector<int> shift_counts_;  // [employee * (s + 1) + k]
  std::vector<Cost> employee_z_;
  Cost total_ = 0;
  mutable WorkCounters counters_;
  mutable std::vector<Shift> scratch_a_;
  mutable std::vector<Shift> scratch_b_;
};

}  // namespace nrc
