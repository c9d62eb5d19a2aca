#include "nrc/constraints.hpp"

#include <algorithm>
#include <cstdlib>

namespace nrc {

std::string_view to_string(HardViolation::Kind kind) {
  switch (kind) {
    case HardViolation::Kind::Skill: return "skill";
    case HardViolation::Kind::Rest: return "rest";
    case HardViolation::Kind::Fixed: return "fixed";
    case HardViolation::Kind::Coverage: return "coverage";
  }
  return "?";
}

std::string_view to_string(EvaluationStrategy strategy) {
  switch (strategy) {
    case EvaluationStrategy::Eval: return "eval";
    case EvaluationStrategy::DeltaC: return "dc";
    case EvaluationStrategy::DeltaE: return "de";
    case EvaluationStrategy::DeltaEC: return "dec";
    case EvaluationStrategy::DeltaA: return "da";
  }
  return "?";
}

EvaluationStrategy parse_strategy(std::string_view text) {
  for (auto s : kAllStrategies)
    if (to_string(s) == text) return s;
  throw std::invalid_argument("unknown evaluation strategy '" + std::string(text) + "'");
}

int rest_gap_minutes(const ProblemInstance& instance, int day_a, Shift a, int day_b, Shift b) {
  const auto& sa = instance.shift(a);
  const auto& sb = instance.shift(b);
  return (day_b * kMinutesPerDay + sb.start_minute) - (day_a * kMinutesPerDay + sa.start_minute + sa.duration_minutes);
}

std::vector<HardViolation> check_hard(const ProblemInstance& instance, const Roster& roster) {
  if (roster.employees() != instance.n || roster.days() != instance.d)
    throw DimensionMismatch("roster dimensions do not match the instance");
  std::vector<HardViolation> out;
  for (int i = 0; i < instance.n; ++i) {
    const auto& emp = instance.employees[i];
    int prev_day = -1;
    for (int j = 0; j < instance.d; ++j) {
      const Shift c = roster.at(i, j);
      if (auto fixed = instance.fixed_at(i, j); fixed && *fixed != c)
        out.push_back({HardViolation::Kind::Fixed, i, j, c, "expected " + instance.cell_label(*fixed)});
      if (c == kDayOff) continue;
      const auto& st = instance.shift(c);
      if (instance.hard.enforce_skills && st.required_skill && !emp.has_skill(*st.required_skill))
        out.push_back({HardViolation::Kind::Skill, i, j, c, "missing skill " + *st.required_skill});
      if (prev_day >= 0 && instance.hard.min_rest_minutes > 0) {
        const int gap = rest_gap_minutes(instance, prev_day, roster.at(i, prev_day), j, c);
        if (gap < instance.hard.min_rest_minutes)
          out.push_back({HardViolation::Kind::Rest, i, j, c, "rest gap " + std::to_string(gap) + " min"});
      }
      prev_day = j;
    }
  }
  std::vector<int> counts(static_cast<std::size_t>(instance.d) * (instance.s + 1), 0);
  for (int i = 0; i < instance.n; ++i)
    for (int j = 0; j < instance.d; ++j) ++counts[static_cast<std::size_t>(j) * (instance.s + 1) + roster.at(i, j)];
  for (int j = 0; j < instance.d; ++j)
    for (int k = 1; k <= instance.s; ++k) {
      const int have = counts[static_cast<std::size_t>(j) * (instance.s + 1) + k];
      const int need = instance.required(j, static_cast<Shift>(k));
      if (have != need)
        out.push_back({HardViolation::Kind::Coverage, -1, j, static_cast<Shift>(k),
                       "assigned " + std::to_string(have) + ", required " + std::to_string(need)});
    }
  return out;
}

// ---------------------------------------------------------------------------
// Compiled soft constraints
// ---------------------------------------------------------------------------

struct CompiledPattern {
  int length = 0;
  int first_start = 0;
  int last_start = -1;
  int step = 1;
  int min_matches = 0;
  int max_matches = kUnbounded;
  std::vector<std::uint8_t> match;  // [offset * (s + 1) + cell]

  int positions() const { return last_start < first_start ? 0 : (last_start - first_start) / step + 1; }
};

struct CompiledConstraint {
  SoftKind kind{};
  Cost weight = 0;
  std::vector<std::uint8_t> applies;   // per employee
  std::vector<std::uint8_t> affected;  // [(day * (s + 1) + before) * (s + 1) + after]
  CompiledPattern pattern;
  BlockParams block;
  int tolerance = 0;
  std::int64_t full_cost = 0;
};

class CompiledConstraints {
 public:
  explicit CompiledConstraints(const ProblemInstance& instance);

  const ProblemInstance& instance;
  int n, d, s;
  std::vector<CompiledConstraint> items;
  std::vector<std::vector<int>> per_employee;
  std::vector<int> start;     // per cell value, 0 for day off
  std::vector<int> duration;  // per cell value

  bool affected(const CompiledConstraint& c, int day, Shift before, Shift after) const {
    return c.affected[(static_cast<std::size_t>(day) * (s + 1) + before) * (s + 1) + after] != 0;
  }

  int count_matches(const CompiledPattern& p, const Shift* row, int lo, int hi) const {
    if (lo < p.first_start) lo = p.first_start;
    if (hi > p.last_start) hi = p.last_start;
    if (lo > hi) return 0;
    const int misalign = (lo - p.first_start) % p.step;
    if (misalign) lo += p.step - misalign;
    const int stride = s + 1;
    int count = 0;
    for (int pos = lo; pos <= hi; pos += p.step) {
      const std::uint8_t* m = p.match.data();
      const Shift* cell = row + pos;
      int q = 0;
      for (; q < p.length; ++q, m += stride)
        if (!m[cell[q]]) break;
      count += q == p.length;
    }
    return count;
  }

  int local_positions(const CompiledPattern& p, int day) const {
    int lo = std::max(p.first_start, day - p.length + 1);
    const int hi = std::min(p.last_start, day);
    if (lo > hi) return 0;
    const int misalign = (lo - p.first_start) % p.step;
    if (misalign) lo += p.step - misalign;
    return lo > hi ? 0 : (hi - lo) / p.step + 1;
  }

  static Cost pattern_penalty(const CompiledConstraint& c, int count) {
    Cost units = 0;
    if (count < c.pattern.min_matches) units += c.pattern.min_matches - count;
    if (count > c.pattern.max_matches) units += count - c.pattern.max_matches;
    return c.weight * units;
  }

  // Block terms for blocks whose first day lies in [lo, hi]; `context_day` is the last worked
  // day before lo (or -1). Requires row[lo-1] and row[hi+1] to be days off when in range.
  Cost block_terms(const CompiledConstraint& c, const Shift* row, int context_day, int lo, int hi) const {
    const int max_work = c.block.max_work_minutes;
    const int min_rest = c.block.min_rest_minutes;
    Cost violations = 0;
    bool have_prev = context_day >= 0;
    long prev_end = have_prev ? static_cast<long>(context_day) * kMinutesPerDay + start[row[context_day]] +
                                    duration[row[context_day]]
                              : 0;
    bool inside = false;
    long work = 0;
    long last_end = 0;
    for (int p = lo; p <= hi; ++p) {
      const Shift cell = row[p];
      if (cell == kDayOff) {
        if (inside) {
          violations += work > max_work;
          inside = false;
          have_prev = true;
          prev_end = last_end;
        }
        continue;
      }
      const long st = static_cast<long>(p) * kMinutesPerDay + start[cell];
      if (!inside) {
        if (have_prev && st - prev_end < min_rest) ++violations;
        inside = true;
        work = 0;
      } else if (st - last_end > min_rest) {
        ++violations;
      }
      work += duration[cell];
      last_end = st + duration[cell];
    }
    if (inside) violations += work > max_work;
    return c.weight * violations;
  }

  struct BlockWindow {
    int context_day;
    int lo;
    int hi;
    int span() const { return hi - (context_day >= 0 ? context_day : lo) + 1; }
  };

  BlockWindow block_window(const Shift* row, int day) const {
    int lo = day;
    while (lo > 0 && row[lo - 1] != kDayOff) --lo;
    int ctx = lo - 1;
    while (ctx >= 0 && row[ctx] == kDayOff) --ctx;
    int hi = day;
    while (hi + 1 < d && row[hi + 1] != kDayOff) ++hi;
    int next = hi + 1;
    while (next < d && row[next] == kDayOff) ++next;
    if (next >= d) return {ctx, lo, d - 1};
    while (next + 1 < d && row[next + 1] != kDayOff) ++next;
    return {ctx, lo, next};
  }

  // Full-row penalty; also reports the match count for pattern constraints.
  Cost row_penalty(const CompiledConstraint& c, int employee, const Shift* row, int* count_out) const {
    switch (c.kind) {
      case SoftKind::PatternBased: {
        const int count = count_matches(c.pattern, row, c.pattern.first_start, c.pattern.last_start);
        if (count_out) *count_out = count;
        return pattern_penalty(c, count);
      }
      case SoftKind::BlockBased:
        return block_terms(c, row, -1, 0, d - 1);
      case SoftKind::WorkloadBalance: {
        long minutes = 0;
        for (int j = 0; j < d; ++j) minutes += duration[row[j]];
        return c.weight * std::labs(minutes - instance.employees[employee].contract_workload_minutes);
      }
      case SoftKind::ShiftTypeBalance: {
        std::vector<int> counts(s + 1, 0);
        for (int j = 0; j < d; ++j) ++counts[row[j]];
        return balance_penalty(c, counts.data());
      }
    }
    return 0;
  }

  Cost balance_penalty(const CompiledConstraint& c, const int* counts) const {
    int lo = kUnbounded, hi = 0;
    for (int k = 1; k <= s; ++k) {
      lo = std::min(lo, counts[k]);
      hi = std::max(hi, counts[k]);
    }
    return c.weight * std::max(0, hi - lo - c.tolerance);
  }
};

CompiledConstraints::CompiledConstraints(const ProblemInstance& inst)
    : instance(inst), n(inst.n), d(inst.d), s(inst.s), per_employee(inst.n), start(inst.s + 1, 0), duration(inst.s + 1, 0) {
  for (int k = 1; k <= s; ++k) {
    start[k] = inst.shift_types[k - 1].start_minute;
    duration[k] = inst.shift_types[k - 1].duration_minutes;
  }
  const int stride = s + 1;
  for (std::size_t ci = 0; ci < inst.soft_constraints.size(); ++ci) {
    const auto& spec = inst.soft_constraints[ci];
    CompiledConstraint c;
    c.kind = spec.kind();
    c.weight = spec.weight;
    c.applies.resize(n);
    for (int e = 0; e < n; ++e) {
      c.applies[e] = spec.applies_to(e);
      if (c.applies[e]) per_employee[e].push_back(static_cast<int>(ci));
    }
    c.affected.assign(static_cast<std::size_t>(d) * stride * stride, 0);
    const auto mark = [&](auto&& pred) {
      for (int day = 0; day < d; ++day)
        for (int a = 0; a <= s; ++a)
          for (int b = 0; b <= s; ++b)
            if (a != b && pred(day, a, b)) c.affected[(static_cast<std::size_t>(day) * stride + a) * stride + b] = 1;
    };
    switch (c.kind) {
      case SoftKind::PatternBased: {
        const auto& p = std::get<PatternParams>(spec.params);
        auto& cp = c.pattern;
        cp.length = static_cast<int>(p.tokens.size());
        cp.first_start = p.window_from;
        cp.last_start = p.window_to - cp.length + 1;
        cp.step = p.step;
        cp.min_matches = p.min_matches;
        cp.max_matches = p.max_matches;
        cp.match.assign(static_cast<std::size_t>(cp.length) * stride, 0);
        for (int q = 0; q < cp.length; ++q)
          for (int cell = 0; cell <= s; ++cell) cp.match[q * stride + cell] = p.tokens[q].matches(static_cast<Shift>(cell));
        mark([&](int day, int a, int b) {
          for (int q = 0; q < cp.length; ++q) {
            const int pos = day - q;
            if (pos < cp.first_start || pos > cp.last_start || (pos - cp.first_start) % cp.step) continue;
            if (cp.match[q * stride + a] != cp.match[q * stride + b]) return true;
          }
          return false;
        });
        c.full_cost = static_cast<std::int64_t>(cp.positions()) * cp.length;
        break;
      }
      case SoftKind::BlockBased:
        c.block = std::get<BlockParams>(spec.params);
        mark([&](int, int a, int b) {
          return (a == 0) != (b == 0) || start[a] != start[b] || duration[a] != duration[b];
        });
        c.full_cost = d;
        break;
      case SoftKind::WorkloadBalance:
        mark([&](int, int a, int b) { return duration[a] != duration[b]; });
        c.full_cost = d;
        break;
      case SoftKind::ShiftTypeBalance:
        c.tolerance = std::get<ShiftBalanceParams>(spec.params).tolerance;
        mark([](int, int, int) { return true; });
        c.full_cost = d;
        break;
    }
    items.push_back(std::move(c));
  }
}

// ---------------------------------------------------------------------------
// Full evaluation
// ---------------------------------------------------------------------------

RowEvaluator::RowEvaluator(const ProblemInstance& instance) : compiled_(std::make_shared<CompiledConstraints>(instance)) {}

Cost RowEvaluator::operator()(int employee, std::span<const Shift> row) const {
  if (static_cast<int>(row.size()) != compiled_->d) throw DimensionMismatch("row length does not match d");
  Cost z = 0;
  for (int ci : compiled_->per_employee[employee]) z += compiled_->row_penalty(compiled_->items[ci], employee, row.data(), nullptr);
  return z;
}

EvaluationResult evaluate_full(const ProblemInstance& instance, const Roster& roster) {
  if (roster.employees() != instance.n || roster.days() != instance.d)
    throw DimensionMismatch("roster dimensions do not match the instance");
  const CompiledConstraints cc(instance);
  EvaluationResult result;
  result.per_employee_z.assign(instance.n, 0);
  for (std::size_t ci = 0; ci < cc.items.size(); ++ci) {
    Cost sum = 0;
    for (int e = 0; e < instance.n; ++e) {
      if (!cc.items[ci].applies[e]) continue;
      const Cost pen = cc.row_penalty(cc.items[ci], e, roster.row(e).data(), nullptr);
      result.per_employee_z[e] += pen;
      sum += pen;
    }
    result.per_constraint[instance.soft_constraints[ci].name] += sum;
    result.total_z += sum;
  }
  return result;
}

Cost evaluate_employee(const ProblemInstance& instance, const Roster& roster, int employee) {
  return evaluate_row(instance, employee, roster.row(employee));
}

Cost evaluate_row(const ProblemInstance& instance, int employee, std::span<const Shift> row) {
  if (employee < 0 || employee >= instance.n) throw std::out_of_range("employee index out of range");
  return RowEvaluator(instance)(employee, row);
}

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

Evaluator::Evaluator(const ProblemInstance& instance, const Roster& roster)
    : instance_(&instance), compiled_(std::make_shared<CompiledConstraints>(instance)) {
  if (roster.employees() != instance.n || roster.days() != instance.d)
    throw DimensionMismatch("roster dimensions do not match the instance");
  const std::size_t cells = compiled_->items.size() * static_cast<std::size_t>(instance.n);
  penalty_.assign(cells, 0);
  match_count_.assign(cells, 0);
  work_minutes_.assign(instance.n, 0);
  shift_counts_.assign(static_cast<std::size_t>(instance.n) * (instance.s + 1), 0);
  employee_z_.assign(instance.n, 0);
  scratch_a_.resize(instance.d);
  scratch_b_.resize(instance.d);
  active_.reserve(compiled_->items.size());
  for (int e = 0; e < instance.n; ++e) rebuild_employee(e, roster.row(e));
}

void Evaluator::rebuild_employee(int e, std::span<const Shift> row) {
  const auto& cc = *compiled_;
  const int n = cc.n;
  Cost z = 0;
  for (int ci : cc.per_employee[e]) {
    int count = 0;
    const Cost pen = cc.row_penalty(cc.items[ci], e, row.data(), &count);
    penalty_[static_cast<std::size_t>(ci) * n + e] = pen;
    match_count_[static_cast<std::size_t>(ci) * n + e] = count;
    z += pen;
  }
  int minutes = 0;
  int* counts = &shift_counts_[static_cast<std::size_t>(e) * (cc.s + 1)];
  std::fill(counts, counts + cc.s + 1, 0);
  for (Shift c : row) {
    minutes += cc.duration[c];
    ++counts[c];
  }
  work_minutes_[e] = minutes;
  total_ += z - employee_z_[e];
  employee_z_[e] = z;
}

DeltaResult Evaluator::probe(const Roster& roster, const CandidateMove& move, EvaluationStrategy strategy) const {
  const auto& cc = *compiled_;
  const int n = cc.n;
  CellChange ch[2];
  const int nch = cell_changes(roster, move, ch);
  std::vector<Shift>* scratch[2] = {&scratch_a_, &scratch_b_};
  for (int i = 0; i < nch; ++i) {
    const auto src = roster.row(ch[i].employee);
    std::copy(src.begin(), src.end(), scratch[i]->begin());
    (*scratch[i])[ch[i].day] = ch[i].after;
  }
  const auto after_row = [&](int e) -> const Shift* {
    if (e == ch[0].employee) return scratch_a_.data();
    if (nch == 2 && e == ch[1].employee) return scratch_b_.data();
    return roster.row(e).data();
  };

  DeltaResult r;
  r.affected = nch;
  for (int i = 0; i < nch; ++i) r.employees[i] = {ch[i].employee, employee_z_[ch[i].employee], employee_z_[ch[i].employee]};
  const auto slot = [&](int e) -> EmployeeDelta* {
    for (int i = 0; i < nch; ++i)
      if (r.employees[i].employee == e) return &r.employees[i];
    return nullptr;
  };

  switch (strategy) {
    case EvaluationStrategy::Eval: {
      Cost total_after = 0;
      for (int e = 0; e < n; ++e) {
        const Shift* row = after_row(e);
        Cost z = 0;
        for (int ci : cc.per_employee[e]) {
          z += cc.row_penalty(cc.items[ci], e, row, nullptr);
          r.units += cc.items[ci].full_cost;
        }
        if (auto* sl = slot(e)) sl->after = z;
        total_after += z;
      }
      r.employee_rows = n;
      r.delta_z = total_after - total_;
      break;
    }
    case EvaluationStrategy::DeltaC: {
      active_.clear();
      for (std::size_t ci = 0; ci < cc.items.size(); ++ci) {
        const auto& c = cc.items[ci];
        for (int i = 0; i < nch; ++i)
          if (c.applies[ch[i].employee] && cc.affected(c, ch[i].day, ch[i].before, ch[i].after)) {
            active_.push_back(static_cast<int>(ci));
            break;
          }
      }
      for (int ci : active_) {
        const auto& c = cc.items[ci];
        for (int e = 0; e < n; ++e) {
          if (!c.applies[e]) continue;
          const Cost diff = cc.row_penalty(c, e, after_row(e), nullptr) - penalty_[static_cast<std::size_t>(ci) * n + e];
          r.units += c.full_cost;
          r.delta_z += diff;
          if (auto* sl = slot(e)) sl->after += diff;
        }
      }
      r.employee_rows = active_.empty() ? 0 : n;
      break;
    }
    case EvaluationStrategy::DeltaE: {
      for (int i = 0; i < nch; ++i) {
        const int e = ch[i].employee;
        const Shift* row = after_row(e);
        Cost z = 0;
        for (int ci : cc.per_employee[e]) {
          z += cc.row_penalty(cc.items[ci], e, row, nullptr);
          r.units += cc.items[ci].full_cost;
        }
        r.employees[i].after = z;
        r.delta_z += z - employee_z_[e];
      }
      r.employee_rows = nch;
      break;
    }
    case EvaluationStrategy::DeltaEC: {
      for (int i = 0; i < nch; ++i) {
        const int e = ch[i].employee;
        const Shift* row = after_row(e);
        Cost diff_sum = 0;
        for (int ci : cc.per_employee[e]) {
          const auto& c = cc.items[ci];
          if (!cc.affected(c, ch[i].day, ch[i].before, ch[i].after)) continue;
          diff_sum += cc.row_penalty(c, e, row, nullptr) - penalty_[static_cast<std::size_t>(ci) * n + e];
          r.units += c.full_cost;
        }
        r.employees[i].after += diff_sum;
        r.delta_z += diff_sum;
      }
      r.employee_rows = nch;
      break;
    }
    case EvaluationStrategy::DeltaA: {
      for (int i = 0; i < nch; ++i) {
        const int e = ch[i].employee;
        const int day = ch[i].day;
        const Shift* before = roster.row(e).data();
        const Shift* after = after_row(e);
        Cost diff_sum = 0;
        for (int ci : cc.per_employee[e]) {
          const auto& c = cc.items[ci];
          if (!cc.affected(c, day, ch[i].before, ch[i].after)) continue;
          const std::size_t slot_index = static_cast<std::size_t>(ci) * n + e;
          Cost diff = 0;
          switch (c.kind) {
            case SoftKind::PatternBased: {
              const int local = cc.local_positions(c.pattern, day);
              if (2 * local >= c.pattern.positions()) {
                diff = cc.row_penalty(c, e, after, nullptr) - penalty_[slot_index];
                r.units += c.full_cost;
              } else {
                const int lo = day - c.pattern.length + 1;
                const int count = match_count_[slot_index] - cc.count_matches(c.pattern, before, lo, day) +
                                  cc.count_matches(c.pattern, after, lo, day);
                diff = CompiledConstraints::pattern_penalty(c, count) - penalty_[slot_index];
                r.units += 2L * local * c.pattern.length;
              }
              break;
            }
            case SoftKind::BlockBased: {
              const auto w = cc.block_window(before, day);
              if (2 * w.span() >= cc.d) {
                diff = cc.row_penalty(c, e, after, nullptr) - penalty_[slot_index];
                r.units += c.full_cost;
              } else {
                diff = cc.block_terms(c, after, w.context_day, w.lo, w.hi) -
                       cc.block_terms(c, before, w.context_day, w.lo, w.hi);
                r.units += 2L * w.span();
              }
              break;
            }
            case SoftKind::WorkloadBalance: {
              const long minutes = work_minutes_[e] - cc.duration[ch[i].before] + cc.duration[ch[i].after];
              diff = c.weight * std::labs(minutes - instance_->employees[e].contract_workload_minutes) - penalty_[slot_index];
              r.units += 1;
              break;
            }
            case SoftKind::ShiftTypeBalance: {
              const int* counts = &shift_counts_[static_cast<std::size_t>(e) * (cc.s + 1)];
              int lo = kUnbounded, hi = 0;
              for (int k = 1; k <= cc.s; ++k) {
                const int cnt = counts[k] - (k == ch[i].before) + (k == ch[i].after);
                lo = std::min(lo, cnt);
                hi = std::max(hi, cnt);
              }
              diff = c.weight * std::max(0, hi - lo - c.tolerance) - penalty_[slot_index];
              r.units += 1;
              break;
            }
          }
          diff_sum += diff;
        }
        r.employees[i].after += diff_sum;
        r.delta_z += diff_sum;
      }
      r.employee_rows = nch;
      break;
    }
  }
  ++counters_.probes;
  counters_.units += r.units;
  counters_.employee_rows += r.employee_rows;
  return r;
}

void Evaluator::commit(const Roster& roster_after, const CandidateMove& move) {
  rebuild_employee(move.emp_a, roster_after.row(move.emp_a));
  if (move.kind == MoveKind::Swap) rebuild_employee(move.emp_b, roster_after.row(move.emp_b));
}

void Evaluator::verify(const Roster& roster) const {
  const Evaluator fresh(*instance_, roster);
  if (fresh.total_ != total_) throw InconsistentContext("cached total Z differs from recomputation");
  if (fresh.employee_z_ != employee_z_) throw InconsistentContext("cached per-employee Z differs from recomputation");
  if (fresh.penalty_ != penalty_) throw InconsistentContext("cached constraint penalties differ from recomputation");
  if (fresh.match_count_ != match_count_) throw InconsistentContext("cached pattern counts differ from recomputation");
  if (fresh.work_minutes_ != work_minutes_ || fresh.shift_counts_ != shift_counts_)
    throw InconsistentContext("cached accumulators differ from recomputation");
}

}  // namespace nrc
