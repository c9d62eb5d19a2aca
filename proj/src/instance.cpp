#include "nrc/instance.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nrc {

bool Employee::has_skill(std::string_view skill) const {
  return std::find(skills.begin(), skills.end(), skill) != skills.end();
}

bool SoftConstraintSpec::applies_to(int employee) const {
  return scope.empty() || std::binary_search(scope.begin(), scope.end(), employee);
}

std::optional<Shift> ProblemInstance::fixed_at(int employee, int day) const {
  for (const auto& f : employees[employee].fixed_assignments)
    if (f.day == day) return f.shift;
  return std::nullopt;
}

std::optional<Shift> ProblemInstance::shift_by_label(std::string_view label) const {
  if (label == "O") return kDayOff;
  for (const auto& st : shift_types)
    if (st.label == label) return static_cast<Shift>(st.id);
  return std::nullopt;
}

std::vector<CoverageDemand> ProblemInstance::coverage_demands() const {
  std::vector<CoverageDemand> out;
  out.reserve(coverage.size());
  for (int day = 0; day < d; ++day)
    for (int k = 1; k <= s; ++k) out.push_back({day, static_cast<Shift>(k), required(day, static_cast<Shift>(k))});
  return out;
}

std::vector<std::string> ProblemInstance::groups() const {
  std::vector<std::string> out;
  for (const auto& e : employees)
    if (std::find(out.begin(), out.end(), e.group) == out.end()) out.push_back(e.group);
  return out;
}

int ProblemInstance::group_index(int employee) const {
  const auto all = groups();
  return static_cast<int>(std::find(all.begin(), all.end(), employees[employee].group) - all.begin());
}

void ProblemInstance::validate() const {
  if (n < 1) throw SemanticError("instance.n", "n must be ≥ 1");
  if (d < 1) throw SemanticError("instance.d", "d must be ≥ 1");
  if (s < 1) throw SemanticError("instance.s", "s must be ≥ 1");
  if (s > 250) throw SemanticError("instance.s", "at most 250 shift types are supported");
  if (static_cast<int>(shift_types.size()) != s)
    throw SemanticError("shifts", "expected " + std::to_string(s) + " shift types, found " +
                                      std::to_string(shift_types.size()));
  std::set<std::string> labels;
  for (int k = 0; k < s; ++k) {
    const auto& st = shift_types[k];
    const std::string path = "shifts[" + std::to_string(k + 1) + "]";
    if (st.id != k + 1) throw SemanticError(path + ".id", "shift ids must be 1..s, contiguous and unique");
    if (st.duration_minutes <= 0) throw SemanticError(path + ".duration", "duration must be positive");
    if (st.label.empty() || st.label == "O" || st.label == "*")
      throw SemanticError(path + ".label", "label must be non-empty and differ from O and *");
    if (!labels.insert(st.label).second) throw SemanticError(path + ".label", "duplicate label " + st.label);
  }
  if (static_cast<int>(employees.size()) != n)
    throw SemanticError("employees", "expected " + std::to_string(n) + " employees, found " +
                                         std::to_string(employees.size()));
  for (int i = 0; i < n; ++i) {
    const auto& e = employees[i];
    const std::string path = "employees[" + std::to_string(i + 1) + "]";
    if (e.id != i + 1) throw SemanticError(path + ".id", "employee ids must be 1..n, contiguous and unique");
    if (e.contract_workload_minutes < 0) throw SemanticError(path + ".workload", "negative workload");
    std::set<int> days;
    for (std::size_t f = 0; f < e.fixed_assignments.size(); ++f) {
      const auto& fa = e.fixed_assignments[f];
      const std::string fpath = path + ".fixed[" + std::to_string(f) + "]";
      if (fa.day < 0 || fa.day >= d) throw SemanticError(fpath + ".day", "day out of range");
      if (fa.shift > s) throw SemanticError(fpath + ".shift", "shift out of range");
      if (!days.insert(fa.day).second) throw SemanticError(fpath + ".day", "duplicate fixed day");
    }
  }
  if (static_cast<int>(coverage.size()) != d * s) throw SemanticError("coverage", "coverage table has wrong size");
  for (std::size_t c = 0; c < coverage.size(); ++c)
    if (coverage[c] < 0)
      throw SemanticError("coverage[" + std::to_string(c / s + 1) + "," + std::to_string(c % s + 1) + "]",
                          "negative count");
  for (int day = 0; day < d; ++day) {
    int total = 0;
    for (int k = 0; k < s; ++k) total += coverage[static_cast<std::size_t>(day) * s + k];
    if (total > n)
      throw SemanticError("coverage[" + std::to_string(day + 1) + "]", "demand exceeds the number of employees");
  }
  for (std::size_t c = 0; c < soft_constraints.size(); ++c) {
    const auto& sc = soft_constraints[c];
    const std::string path = "constraints[" + std::to_string(c) + "]";
    if (sc.weight < 0) throw SemanticError(path + ".weight", "weight must be ≥ 0");
    for (int e : sc.scope)
      if (e < 0 || e >= n) throw SemanticError(path + ".scope", "employee out of range");
    if (!std::is_sorted(sc.scope.begin(), sc.scope.end()))
      throw SemanticError(path + ".scope", "scope must be sorted");
    if (const auto* p = std::get_if<PatternParams>(&sc.params)) {
      if (p->tokens.empty()) throw SemanticError(path + ".pattern", "pattern length must be ≥ 1");
      for (const auto& t : p->tokens)
        if (t.kind == PatternToken::Kind::Exact && (t.shift < 1 || t.shift > s))
          throw SemanticError(path + ".pattern", "unknown shift in pattern");
      if (p->window_from < 0 || p->window_to >= d || p->window_from > p->window_to)
        throw SemanticError(path + ".window", "window must lie within 1..d");
      if (p->step < 1) throw SemanticError(path + ".step", "step must be ≥ 1");
      if (p->min_matches < 0 || p->max_matches < 0) throw SemanticError(path + ".min", "negative match bound");
    } else if (const auto* b = std::get_if<BlockParams>(&sc.params)) {
      if (b->max_work_minutes < 0 || b->min_rest_minutes < 0)
        throw SemanticError(path, "block parameters must be non-negative");
    } else if (const auto* sb = std::get_if<ShiftBalanceParams>(&sc.params)) {
      if (sb->tolerance < 0) throw SemanticError(path + ".tolerance", "tolerance must be ≥ 0");
    }
  }
  if (hard.min_rest_minutes < 0) throw SemanticError("hard.min_rest", "must be ≥ 0");
}

namespace {

std::string trim(std::string_view sv) {
  const auto b = sv.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = sv.find_last_not_of(" \t\r");
  return std::string(sv.substr(b, e - b + 1));
}

// Whitespace split that keeps double-quoted strings together (quotes retained).
std::vector<std::string> tokenize(const std::string& line, int lineno) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    std::string tok;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
      if (line[i] == '"') {
        const auto close = line.find('"', i + 1);
        if (close == std::string::npos) throw ParseError(lineno, "unterminated quote");
        tok += line.substr(i, close - i + 1);
        i = close + 1;
      } else {
        tok += line[i++];
      }
    }
    out.push_back(std::move(tok));
  }
  return out;
}

int to_int(std::string_view sv, int lineno, std::string_view what) {
  int value = 0;
  const auto* end = sv.data() + sv.size();
  const auto [ptr, ec] = std::from_chars(sv.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw ParseError(lineno, "expected integer for " + std::string(what) + ", got '" + std::string(sv) + "'");
  return value;
}

std::pair<std::string, std::string> split_kv(const std::string& tok, int lineno) {
  const auto eq = tok.find('=');
  if (eq == std::string::npos || eq == 0) throw ParseError(lineno, "expected key=value, got '" + tok + "'");
  return {tok.substr(0, eq), tok.substr(eq + 1)};
}

std::vector<std::string> split(std::string_view sv, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= sv.size()) {
    const auto pos = sv.find(sep, start);
    const auto piece = sv.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    if (!piece.empty()) out.emplace_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct PendingCell {
  int line;
  std::string text;
};

struct PendingConstraint {
  int line;
  std::vector<std::string> tokens;
};

Shift resolve_shift(const ProblemInstance& inst, const std::string& text, int lineno, bool allow_off) {
  if (auto by_label = inst.shift_by_label(text)) {
    if (*by_label == kDayOff && !allow_off) throw ParseError(lineno, "day off is not allowed here");
    return *by_label;
  }
  int k = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
  if (ec == std::errc{} && ptr == text.data() + text.size()) {
    if (k == 0 && !allow_off) throw ParseError(lineno, "day off is not allowed here");
    if (k < 0 || k > inst.s) throw SemanticError("shift", "shift index " + text + " out of range");
    return static_cast<Shift>(k);
  }
  throw SemanticError("shift", "unknown shift '" + text + "'");
}

std::vector<PatternToken> parse_pattern(const ProblemInstance& inst, const std::string& body, int lineno) {
  std::vector<std::string> parts = split(body, ' ');
  if (parts.size() == 1 && parts[0].size() > 1 && !inst.shift_by_label(parts[0])) {
    std::vector<std::string> chars;
    for (char c : parts[0]) chars.emplace_back(1, c);
    parts = std::move(chars);
  }
  std::vector<PatternToken> tokens;
  for (const auto& p : parts) {
    if (p == "*") {
      tokens.push_back({PatternToken::Kind::AnyShift, kDayOff});
    } else if (p == "O") {
      tokens.push_back({PatternToken::Kind::DayOff, kDayOff});
    } else if (auto k = inst.shift_by_label(p)) {
      tokens.push_back({PatternToken::Kind::Exact, *k});
    } else {
      throw ParseError(lineno, "unknown pattern token '" + p + "'");
    }
  }
  return tokens;
}

std::vector<int> parse_scope(const ProblemInstance& inst, const std::string& value, int lineno) {
  std::vector<int> scope;
  if (value.rfind("group:", 0) == 0) {
    const std::string g = value.substr(6);
    for (int i = 0; i < inst.n; ++i)
      if (inst.employees[i].group == g) scope.push_back(i);
    if (scope.empty()) throw SemanticError("scope", "group '" + g + "' has no employees");
    return scope;
  }
  for (const auto& id : split(value, ',')) {
    const int e = to_int(id, lineno, "scope") - 1;
    if (e < 0 || e >= inst.n) throw SemanticError("scope", "employee " + id + " out of range");
    scope.push_back(e);
  }
  std::sort(scope.begin(), scope.end());
  scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
  return scope;
}

SoftConstraintSpec parse_soft(const ProblemInstance& inst, const PendingConstraint& pc, std::size_t index) {
  const auto& toks = pc.tokens;
  const int ln = pc.line;
  if (toks.size() < 2) throw ParseError(ln, "soft constraint needs a kind");
  SoftConstraintSpec spec;
  spec.name = "c" + std::to_string(index + 1);
  const std::string& kind = toks[1];
  std::size_t first_kv = 2;
  PatternParams pattern;
  pattern.window_from = 0;
  pattern.window_to = inst.d - 1;
  if (kind == "pattern") {
    if (toks.size() < 3 || toks[2].size() < 2 || toks[2].front() != '"' || toks[2].back() != '"')
      throw ParseError(ln, "pattern constraint needs a quoted pattern");
    pattern.tokens = parse_pattern(inst, toks[2].substr(1, toks[2].size() - 2), ln);
    first_kv = 3;
  } else if (kind != "block" && kind != "workload" && kind != "shiftbalance") {
    throw ParseError(ln, "unknown soft constraint kind '" + kind + "'");
  }
  BlockParams block;
  ShiftBalanceParams balance;
  std::set<std::string> seen;
  for (std::size_t t = first_kv; t < toks.size(); ++t) {
    const auto [key, value] = split_kv(toks[t], ln);
    if (!seen.insert(key).second) throw ParseError(ln, "duplicate key " + key);
    if (key == "weight") {
      spec.weight = to_int(value, ln, key);
    } else if (key == "scope") {
      spec.scope = parse_scope(inst, value, ln);
    } else if (key == "name") {
      spec.name = value;
    } else if (kind == "pattern" && key == "min") {
      pattern.min_matches = to_int(value, ln, key);
    } else if (kind == "pattern" && key == "max") {
      pattern.max_matches = to_int(value, ln, key);
    } else if (kind == "pattern" && key == "step") {
      pattern.step = to_int(value, ln, key);
    } else if (kind == "pattern" && key == "window") {
      const auto dots = value.find("..");
      if (dots == std::string::npos) throw ParseError(ln, "window must be <from>..<to>");
      pattern.window_from = to_int(value.substr(0, dots), ln, "window") - 1;
      pattern.window_to = to_int(value.substr(dots + 2), ln, "window") - 1;
    } else if (kind == "block" && key == "max_work") {
      block.max_work_minutes = to_int(value, ln, key);
    } else if (kind == "block" && key == "min_rest") {
      block.min_rest_minutes = to_int(value, ln, key);
    } else if (kind == "shiftbalance" && key == "tolerance") {
      balance.tolerance = to_int(value, ln, key);
    } else {
      throw ParseError(ln, "unknown key '" + key + "' for " + kind);
    }
  }
  if (!seen.count("weight")) throw ParseError(ln, "missing weight");
  if (kind == "pattern") spec.params = pattern;
  else if (kind == "block") spec.params = block;
  else if (kind == "workload") spec.params = WorkloadParams{};
  else spec.params = balance;
  return spec;
}

void parse_hard(ProblemInstance& inst, const PendingConstraint& pc) {
  for (std::size_t t = 1; t < pc.tokens.size(); ++t) {
    const auto [key, value] = split_kv(pc.tokens[t], pc.line);
    if (key == "min_rest") {
      inst.hard.min_rest_minutes = to_int(value, pc.line, key);
    } else if (key == "skills") {
      if (value != "on" && value != "off") throw ParseError(pc.line, "skills must be on|off");
      inst.hard.enforce_skills = value == "on";
    } else {
      throw ParseError(pc.line, "unknown hard rule '" + key + "'");
    }
  }
}

}  // namespace

ProblemInstance parse_instance(std::string_view text) {
  ProblemInstance inst;
  enum class Section { None, Shifts, Employees, Coverage, Constraints } section = Section::None;
  bool have_header = false;

  std::vector<PendingCell> employee_lines;
  std::vector<std::pair<int, std::vector<std::string>>> coverage_lines;
  std::vector<PendingConstraint> constraint_lines;

  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? std::string_view(raw) : std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line == "shifts:") { section = Section::Shifts; continue; }
    if (line == "employees:") { section = Section::Employees; continue; }
    if (line == "coverage:") { section = Section::Coverage; continue; }
    if (line == "constraints:") { section = Section::Constraints; continue; }
    auto toks = tokenize(line, lineno);
    if (!have_header) {
      if (toks.size() != 5 || toks[0] != "instance")
        throw ParseError(lineno, "expected header 'instance <name> n=<int> d=<int> s=<int>'");
      inst.name = toks[1];
      for (int t = 2; t < 5; ++t) {
        const auto [key, value] = split_kv(toks[t], lineno);
        const int v = to_int(value, lineno, key);
        if (key == "n") inst.n = v;
        else if (key == "d") inst.d = v;
        else if (key == "s") inst.s = v;
        else throw ParseError(lineno, "unknown header key '" + key + "'");
      }
      if (inst.n < 1) throw SemanticError("instance.n", "n must be ≥ 1");
      if (inst.d < 1) throw SemanticError("instance.d", "d must be ≥ 1");
      if (inst.s < 1) throw SemanticError("instance.s", "s must be ≥ 1");
      have_header = true;
      continue;
    }
    switch (section) {
      case Section::None:
        throw ParseError(lineno, "content outside of a section");
      case Section::Shifts: {
        if (toks.size() < 4 || toks.size() > 5) throw ParseError(lineno, "expected 'k <label> <start> <duration> [skill]'");
        ShiftType st;
        st.id = to_int(toks[0], lineno, "shift id");
        st.label = toks[1];
        st.start_minute = to_int(toks[2], lineno, "start_minute");
        st.duration_minutes = to_int(toks[3], lineno, "duration");
        if (toks.size() == 5) st.required_skill = toks[4];
        inst.shift_types.push_back(std::move(st));
        break;
      }
      case Section::Employees:
        employee_lines.push_back({lineno, line});
        break;
      case Section::Coverage:
        coverage_lines.emplace_back(lineno, std::move(toks));
        break;
      case Section::Constraints:
        constraint_lines.push_back({lineno, std::move(toks)});
        break;
    }
  }
  if (!have_header) throw ParseError(lineno, "missing instance header");
  std::sort(inst.shift_types.begin(), inst.shift_types.end(),
            [](const ShiftType& a, const ShiftType& b) { return a.id < b.id; });
  if (static_cast<int>(inst.shift_types.size()) != inst.s)
    throw SemanticError("shifts", "expected " + std::to_string(inst.s) + " shift types, found " +
                                      std::to_string(inst.shift_types.size()));
  for (int k = 0; k < inst.s; ++k)
    if (inst.shift_types[k].id != k + 1)
      throw SemanticError("shifts[" + std::to_string(k + 1) + "].id", "shift ids must be 1..s, contiguous and unique");

  // Employees need shift labels for fixed assignments, so they are resolved after shifts.
  for (const auto& el : employee_lines) {
    const auto toks = tokenize(el.text, el.line);
    if (toks.size() < 2) throw ParseError(el.line, "expected 'i <workload_minutes> [skills=..] [fixed=..] [group=..]'");
    Employee e;
    e.id = to_int(toks[0], el.line, "employee id");
    e.contract_workload_minutes = to_int(toks[1], el.line, "workload");
    for (std::size_t t = 2; t < toks.size(); ++t) {
      const auto [key, value] = split_kv(toks[t], el.line);
      if (key == "skills") {
        e.skills = split(value, ',');
      } else if (key == "group") {
        e.group = value;
      } else if (key == "fixed") {
        for (const auto& item : split(value, ';')) {
          if (item.size() < 5 || item.front() != '(' || item.back() != ')')
            throw ParseError(el.line, "fixed assignment must look like (day,shift)");
          const auto parts = split(std::string_view(item).substr(1, item.size() - 2), ',');
          if (parts.size() != 2) throw ParseError(el.line, "fixed assignment must look like (day,shift)");
          FixedAssignment fa;
          fa.day = to_int(parts[0], el.line, "fixed day") - 1;
          fa.shift = resolve_shift(inst, parts[1], el.line, true);
          e.fixed_assignments.push_back(fa);
        }
      } else {
        throw ParseError(el.line, "unknown employee key '" + key + "'");
      }
    }
    inst.employees.push_back(std::move(e));
  }
  std::sort(inst.employees.begin(), inst.employees.end(), [](const Employee& a, const Employee& b) { return a.id < b.id; });

  inst.coverage.assign(static_cast<std::size_t>(inst.d) * inst.s, 0);
  std::set<std::pair<int, int>> explicit_cells;
  for (const auto& [ln, toks] : coverage_lines) {
    if (toks.size() != 3) throw ParseError(ln, "expected 'day shift count' or 'all shift count'");
    const Shift k = resolve_shift(inst, toks[1], ln, false);
    const int count = to_int(toks[2], ln, "count");
    if (count < 0) throw SemanticError("coverage", "negative count on line " + std::to_string(ln));
    if (toks[0] == "all") {
      for (int day = 0; day < inst.d; ++day)
        if (!explicit_cells.count({day, k})) inst.coverage[static_cast<std::size_t>(day) * inst.s + k - 1] = count;
    } else {
      const int day = to_int(toks[0], ln, "day") - 1;
      if (day < 0 || day >= inst.d) throw SemanticError("coverage", "day out of range on line " + std::to_string(ln));
      if (!explicit_cells.insert({day, k}).second)
        throw SemanticError("coverage", "duplicate demand on line " + std::to_string(ln));
      inst.coverage[static_cast<std::size_t>(day) * inst.s + k - 1] = count;
    }
  }

  for (const auto& pc : constraint_lines) {
    if (pc.tokens[0] == "soft") inst.soft_constraints.push_back(parse_soft(inst, pc, inst.soft_constraints.size()));
    else if (pc.tokens[0] == "hard") parse_hard(inst, pc);
    else throw ParseError(pc.line, "constraint lines start with 'soft' or 'hard'");
  }
  inst.validate();
  return inst;
}

std::string pattern_to_string(const ProblemInstance& instance, const PatternParams& pattern) {
  std::string out;
  for (const auto& t : pattern.tokens) {
    if (!out.empty()) out += ' ';
    switch (t.kind) {
      case PatternToken::Kind::DayOff: out += 'O'; break;
      case PatternToken::Kind::AnyShift: out += '*'; break;
      case PatternToken::Kind::Exact: out += instance.cell_label(t.shift); break;
    }
  }
  return out;
}

std::string serialize_instance(const ProblemInstance& inst) {
  std::ostringstream out;
  out << "instance " << inst.name << " n=" << inst.n << " d=" << inst.d << " s=" << inst.s << "\n";
  out << "shifts:\n";
  for (const auto& st : inst.shift_types) {
    out << st.id << ' ' << st.label << ' ' << st.start_minute << ' ' << st.duration_minutes;
    if (st.required_skill) out << ' ' << *st.required_skill;
    out << "\n";
  }
  out << "employees:\n";
  for (const auto& e : inst.employees) {
    out << e.id << ' ' << e.contract_workload_minutes;
    if (!e.skills.empty()) {
      out << " skills=";
      for (std::size_t i = 0; i < e.skills.size(); ++i) out << (i ? "," : "") << e.skills[i];
    }
    if (!e.fixed_assignments.empty()) {
      out << " fixed=";
      for (std::size_t i = 0; i < e.fixed_assignments.size(); ++i)
        out << (i ? ";" : "") << '(' << e.fixed_assignments[i].day + 1 << ',' << inst.cell_label(e.fixed_assignments[i].shift)
            << ')';
    }
    if (e.group != "default") out << " group=" << e.group;
    out << "\n";
  }
  out << "coverage:\n";
  for (int k = 1; k <= inst.s; ++k) {
    const Shift sk = static_cast<Shift>(k);
    std::map<int, int> freq;
    for (int day = 0; day < inst.d; ++day) ++freq[inst.required(day, sk)];
    const int common = std::max_element(freq.begin(), freq.end(), [](auto& a, auto& b) { return a.second < b.second; })->first;
    out << "all " << inst.cell_label(sk) << ' ' << common << "\n";
    for (int day = 0; day < inst.d; ++day)
      if (inst.required(day, sk) != common) out << day + 1 << ' ' << inst.cell_label(sk) << ' ' << inst.required(day, sk) << "\n";
  }
  out << "constraints:\n";
  const HardRules defaults;
  if (inst.hard.min_rest_minutes != defaults.min_rest_minutes) out << "hard min_rest=" << inst.hard.min_rest_minutes << "\n";
  if (inst.hard.enforce_skills != defaults.enforce_skills) out << "hard skills=" << (inst.hard.enforce_skills ? "on" : "off") << "\n";
  for (const auto& sc : inst.soft_constraints) {
    out << "soft ";
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, PatternParams>) {
            out << "pattern \"" << pattern_to_string(inst, p) << '"';
            if (p.min_matches != 0) out << " min=" << p.min_matches;
            if (p.max_matches != kUnbounded) out << " max=" << p.max_matches;
            out << " window=" << p.window_from + 1 << ".." << p.window_to + 1;
            if (p.step != 1) out << " step=" << p.step;
          } else if constexpr (std::is_same_v<P, BlockParams>) {
            out << "block max_work=" << p.max_work_minutes << " min_rest=" << p.min_rest_minutes;
          } else if constexpr (std::is_same_v<P, WorkloadParams>) {
            out << "workload";
          } else {
            out << "shiftbalance tolerance=" << p.tolerance;
          }
        },
        sc.params);
    out << " weight=" << sc.weight;
    if (!sc.scope.empty()) {
      out << " scope=";
      for (std::size_t i = 0; i < sc.scope.size(); ++i) out << (i ? "," : "") << sc.scope[i] + 1;
    }
    out << " name=" << sc.name << "\n";
  }
  return out.str();
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str());
}

Cost default_tau(const ProblemInstance& instance) {
  Cost tau = 1;
  for (const auto& sc : instance.soft_constraints) tau = std::max(tau, sc.weight);
  return tau;
}

}  // namespace nrc
