#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nrc/types.hpp"

namespace nrc {

struct ShiftType {
  int id = 0;  // 1..s
  std::string label;
  int start_minute = 0;
  int duration_minutes = 0;
  std::optional<std::string> required_skill;

  bool operator==(const ShiftType&) const = default;
};

struct FixedAssignment {
  int day = 0;  // 0-based
  Shift shift = kDayOff;

  bool operator==(const FixedAssignment&) const = default;
};

struct Employee {
  int id = 0;  // 1..n
  std::vector<std::string> skills;
  int contract_workload_minutes = 0;
  std::vector<FixedAssignment> fixed_assignments;
  std::string group = "default";

  bool has_skill(std::string_view skill) const;
  bool operator==(const Employee&) const = default;
};

struct CoverageDemand {
  int day = 0;    // 0-based
  Shift shift = 1;
  int required_count = 0;

  bool operator==(const CoverageDemand&) const = default;
};

// One element of a pattern: a concrete shift, a day off, or any worked shift.
struct PatternToken {
  enum class Kind : std::uint8_t { DayOff, AnyShift, Exact };
  Kind kind = Kind::AnyShift;
  Shift shift = kDayOff;  // Exact only

  bool matches(Shift cell) const noexcept {
    switch (kind) {
      case Kind::DayOff: return cell == kDayOff;
      case Kind::AnyShift: return cell != kDayOff;
      case Kind::Exact: return cell == shift;
    }
    return false;
  }
  bool operator==(const PatternToken&) const = default;
};

inline constexpr int kUnbounded = std::numeric_limits<int>::max();

// Counts occurrences of a token sequence starting at window_from, window_from+step, ...
// with the whole occurrence inside [window_from, window_to]. Penalised per missing
// match below min_matches and per extra match above max_matches.
struct PatternParams {
  std::vector<PatternToken> tokens;
  int min_matches = 0;
  int max_matches = kUnbounded;
  int window_from = 0;  // 0-based, inclusive
  int window_to = 0;    // 0-based, inclusive
  int step = 1;

  bool operator==(const PatternParams&) const = default;
};

// Blocks are maximal runs of consecutive worked days.
struct BlockParams {
  int max_work_minutes = 0;
  int min_rest_minutes = 0;

  bool operator==(const BlockParams&) const = default;
};

struct WorkloadParams {
  bool operator==(const WorkloadParams&) const = default;
};

struct ShiftBalanceParams {
  int tolerance = 0;

  bool operator==(const ShiftBalanceParams&) const = default;
};

enum class SoftKind { PatternBased, BlockBased, WorkloadBalance, ShiftTypeBalance };

struct SoftConstraintSpec {
  std::string name;
  Cost weight = 1;
  std::vector<int> scope;  // 0-based employee indices; empty = every employee
  std::variant<PatternParams, BlockParams, WorkloadParams, ShiftBalanceParams> params;

  SoftKind kind() const noexcept { return static_cast<SoftKind>(params.index()); }
  bool applies_to(int employee) const;
  bool operator==(const SoftConstraintSpec&) const = default;
};

struct HardRules {
  int min_rest_minutes = 0;
  bool enforce_skills = true;

  bool operator==(const HardRules&) const = default;
};

// Immutable after parsing. Indices are 0-based internally; the text format is 1-based.
struct ProblemInstance {
  std::string name;
  int n = 0;
  int d = 0;
  int s = 0;
  std::vector<ShiftType> shift_types;  // index k-1 holds shift k
  std::vector<Employee> employees;
  std::vector<int> coverage;  // d * s, coverage[day * s + (shift - 1)]
  std::vector<SoftConstraintSpec> soft_constraints;
  HardRules hard;

  const ShiftType& shift(Shift k) const { return shift_types.at(k - 1); }
  int required(int day, Shift k) const { return coverage[static_cast<std::size_t>(day) * s + (k - 1)]; }
  int duration(Shift k) const { return k == kDayOff ? 0 : shift_types[k - 1].duration_minutes; }
  std::optional<Shift> fixed_at(int employee, int day) const;
  std::string cell_label(Shift k) const { return k == kDayOff ? "O" : shift_types[k - 1].label; }
  std::optional<Shift> shift_by_label(std::string_view label) const;
  std::vector<CoverageDemand> coverage_demands() const;
  std::vector<std::string> groups() const;
  int group_index(int employee) const;

  // Validates every index invariant; throws SemanticError.
  void validate() const;
  bool operator==(const ProblemInstance&) const = default;
};

ProblemInstance parse_instance(std::string_view text);
std::string serialize_instance(const ProblemInstance& instance);
ProblemInstance load_instance(const std::string& path);

std::string pattern_to_string(const ProblemInstance& instance, const PatternParams& pattern);

// Largest single-violation weight among the soft constraints (at least 1).
Cost default_tau(const ProblemInstance& instance);

}  // namespace nrc
