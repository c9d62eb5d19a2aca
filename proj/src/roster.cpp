#include "nrc/roster.hpp"

#include <sstream>

namespace nrc {

std::vector<std::uint8_t> Roster::to_binary(int s) const {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n_) * d_ * s, 0);
  for (std::size_t c = 0; c < cells_.size(); ++c)
    if (cells_[c] != kDayOff) bits[c * s + (cells_[c] - 1)] = 1;
  return bits;
}

Roster Roster::from_binary(int n, int d, int s, std::span<const std::uint8_t> bits) {
  if (bits.size() != static_cast<std::size_t>(n) * d * s) throw DimensionMismatch("binary roster has wrong size");
  Roster r(n, d);
  for (std::size_t c = 0; c < r.cells_.size(); ++c) {
    for (int k = 0; k < s; ++k) {
      if (!bits[c * s + k]) continue;
      if (r.cells_[c] != kDayOff) throw MoveError("binary roster assigns two shifts on one day");
      r.cells_[c] = static_cast<Shift>(k + 1);
    }
  }
  return r;
}

TabuRecord TabuRecord::inverse() const {
  TabuRecord r = *this;
  std::swap(r.shift_a, r.shift_b);
  return r;
}

void validate_move(const ProblemInstance& instance, const Roster& roster, const CandidateMove& move) {
  const auto check_emp = [&](int e) {
    if (e < 0 || e >= roster.employees()) throw MoveError("employee index out of range");
  };
  check_emp(move.emp_a);
  if (move.day < 0 || move.day >= roster.days()) throw MoveError("day index out of range");
  if (move.kind == MoveKind::Swap) {
    check_emp(move.emp_b);
    if (move.emp_a == move.emp_b) throw MoveError("swap needs two distinct employees");
    if (roster.at(move.emp_a, move.day) == roster.at(move.emp_b, move.day))
      throw MoveError("swap of identical cells is a null move");
    if (instance.fixed_at(move.emp_b, move.day)) throw MoveError("move touches a fixed assignment");
  } else {
    if (move.shift > instance.s) throw MoveError("shift index out of range");
    if (roster.at(move.emp_a, move.day) == move.shift) throw MoveError("replace with identical shift is a null move");
  }
  if (instance.fixed_at(move.emp_a, move.day)) throw MoveError("move touches a fixed assignment");
}

int cell_changes(const Roster& roster, const CandidateMove& move, CellChange out[2]) {
  const Shift a = roster.at(move.emp_a, move.day);
  if (move.kind == MoveKind::Replace) {
    out[0] = {move.emp_a, move.day, a, move.shift};
    return 1;
  }
  const Shift b = roster.at(move.emp_b, move.day);
  out[0] = {move.emp_a, move.day, a, b};
  out[1] = {move.emp_b, move.day, b, a};
  return 2;
}

void apply_move_in_place(Roster& roster, const CandidateMove& move) {
  if (move.kind == MoveKind::Replace) {
    roster.set(move.emp_a, move.day, move.shift);
    return;
  }
  const Shift a = roster.at(move.emp_a, move.day);
  roster.set(move.emp_a, move.day, roster.at(move.emp_b, move.day));
  roster.set(move.emp_b, move.day, a);
}

Roster apply_move(const ProblemInstance& instance, const Roster& roster, const CandidateMove& move) {
  validate_move(instance, roster, move);
  Roster out = roster;
  apply_move_in_place(out, move);
  return out;
}

TabuRecord tabu_record_of(const ProblemInstance& instance, const Roster& roster, const CandidateMove& move) {
  validate_move(instance, roster, move);
  TabuRecord r;
  r.emp_a = move.emp_a;
  r.day = move.day;
  r.shift_a = roster.at(move.emp_a, move.day);
  if (move.kind == MoveKind::Swap) {
    r.kind = TabuRecord::Kind::Swap;
    r.emp_b = move.emp_b;
    r.shift_b = roster.at(move.emp_b, move.day);
  } else {
    r.kind = TabuRecord::Kind::Replace;
    r.shift_b = move.shift;
  }
  return r;
}

std::string serialize_roster(const ProblemInstance& instance, const Roster& roster) {
  std::ostringstream out;
  out << "roster " << instance.name << " n=" << roster.employees() << " d=" << roster.days() << "\n";
  for (int i = 0; i < roster.employees(); ++i) {
    out << i + 1;
    for (Shift c : roster.row(i)) out << ' ' << instance.cell_label(c);
    out << "\n";
  }
  return out.str();
}

Roster parse_roster(const ProblemInstance& instance, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  bool header = false;
  Roster roster(instance.n, instance.d);
  std::vector<bool> seen(instance.n, false);
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    if (!header) {
      if (toks.size() != 4 || toks[0] != "roster") throw ParseError(lineno, "expected 'roster <name> n=<n> d=<d>'");
      if (toks[2] != "n=" + std::to_string(instance.n) || toks[3] != "d=" + std::to_string(instance.d))
        throw DimensionMismatch("roster dimensions do not match the instance");
      header = true;
      continue;
    }
    if (static_cast<int>(toks.size()) != instance.d + 1) throw ParseError(lineno, "expected employee id and d cells");
    int id = 0;
    try {
      id = std::stoi(toks[0]);
    } catch (const std::exception&) {
      throw ParseError(lineno, "bad employee id");
    }
    if (id < 1 || id > instance.n || seen[id - 1]) throw ParseError(lineno, "bad or duplicate employee id");
    seen[id - 1] = true;
    for (int day = 0; day < instance.d; ++day) {
      const auto k = instance.shift_by_label(toks[day + 1]);
      if (!k) throw ParseError(lineno, "unknown shift label '" + toks[day + 1] + "'");
      roster.set(id - 1, day, *k);
    }
  }
  if (!header) throw ParseError(lineno, "missing roster header");
  for (int i = 0; i < instance.n; ++i)
    if (!seen[i]) throw ParseError(lineno, "missing row for employee " + std::to_string(i + 1));
  return roster;
}

}  // namespace nrc
