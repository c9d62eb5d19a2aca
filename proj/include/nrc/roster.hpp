#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nrc/instance.hpp"

namespace nrc {

// Dense n x d assignment; each cell holds 0 (day off) or a shift index 1..s.
class Roster {
 public:
  Roster() = default;
  Roster(int n, int d) : n_(n), d_(d), cells_(static_cast<std::size_t>(n) * d, kDayOff) {}

  int employees() const noexcept { return n_; }
  int days() const noexcept { return d_; }

  Shift at(int employee, int day) const { return cells_[index(employee, day)]; }
  void set(int employee, int day, Shift shift) { cells_[index(employee, day)] = shift; }

  std::span<const Shift> row(int employee) const {
    return {cells_.data() + static_cast<std::size_t>(employee) * d_, static_cast<std::size_t>(d_)};
  }
  std::span<Shift> row(int employee) {
    return {cells_.data() + static_cast<std::size_t>(employee) * d_, static_cast<std::size_t>(d_)};
  }
  std::span<const Shift> cells() const { return cells_; }

  // R_ijk view, flattened as [(i * d + j) * s + (k - 1)].
  std::vector<std::uint8_t> to_binary(int s) const;
  static Roster from_binary(int n, int d, int s, std::span<const std::uint8_t> bits);

  bool operator==(const Roster&) const = default;

 private:
  std::size_t index(int employee, int day) const { return static_cast<std::size_t>(employee) * d_ + day; }

  int n_ = 0;
  int d_ = 0;
  std::vector<Shift> cells_;
};

enum class MoveKind : std::uint8_t { Swap, Replace };

struct CandidateMove {
  MoveKind kind = MoveKind::Swap;
  int emp_a = 0;
  int emp_b = -1;  // Swap only
  int day = 0;
  Shift shift = kDayOff;  // Replace only: the new cell content

  static CandidateMove swap(int a, int b, int day) { return {MoveKind::Swap, a, b, day, kDayOff}; }
  static CandidateMove replace(int a, int day, Shift shift) { return {MoveKind::Replace, a, -1, day, shift}; }

  bool touches_two() const noexcept { return kind == MoveKind::Swap; }
  bool operator==(const CandidateMove&) const = default;
};

// Swap:    (emp_a, emp_b, shift_a, shift_b, day)
// Replace: (emp_a, shift_old, shift_new, day) stored as (emp_a, -1, old, new, day)
struct TabuRecord {
  enum class Kind : std::uint8_t { Empty, Swap, Replace };
  Kind kind = Kind::Empty;
  int emp_a = -1;
  int emp_b = -1;
  Shift shift_a = kDayOff;
  Shift shift_b = kDayOff;
  int day = -1;

  static TabuRecord empty() { return {}; }
  // The record of the move that undoes this one.
  TabuRecord inverse() const;
  bool operator==(const TabuRecord&) const = default;
};

// One cell change caused by a move.
struct CellChange {
  int employee;
  int day;
  Shift before;
  Shift after;
};

// Throws MoveError for out-of-range indices, null moves, or fixed-assignment violations.
void validate_move(const ProblemInstance& instance, const Roster& roster, const CandidateMove& move);

// Number of changes written into out (1 for Replace, 2 for Swap).
int cell_changes(const Roster& roster, const CandidateMove& move, CellChange out[2]);

Roster apply_move(const ProblemInstance& instance, const Roster& roster, const CandidateMove& move);
// In-place variant used inside the solvers; the move must already be validated.
void apply_move_in_place(Roster& roster, const CandidateMove& move);

TabuRecord tabu_record_of(const ProblemInstance& instance, const Roster& roster, const CandidateMove& move);

// Roster file: header "roster <name> n=<n> d=<d>" then one line per employee with cell labels.
std::string serialize_roster(const ProblemInstance& instance, const Roster& roster);
Roster parse_roster(const ProblemInstance& instance, std::string_view text);

}  // namespace nrc
