#include "nrc/heuristics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace nrc {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ns_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
}

double us_since(Clock::time_point t0) { return static_cast<double>(ns_since(t0)) / 1000.0; }

TabuRecord record_for(const Roster& roster, const CandidateMove& move) {
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

void require_feasible(const ProblemInstance& instance, const Roster& roster) {
  const auto violations = check_hard(instance, roster);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw InfeasibleRoster("initial roster violates " + std::to_string(violations.size()) + " hard rule(s); first: " +
                           std::string(to_string(v.kind)) + " at employee " + std::to_string(v.employee + 1) +
                           ", day " + std::to_string(v.day + 1) + " (" + v.detail + ")");
  }
}

bool qualifies(const ProblemInstance& instance, int employee, Shift shift) {
  if (shift == kDayOff || !instance.hard.enforce_skills) return true;
  const auto& skill = instance.shift(shift).required_skill;
  return !skill || instance.employees[employee].has_skill(*skill);
}

// Scores and move bookkeeping shared by the solvers.
class Search {
 public:
  Search(const ProblemInstance& instance, const Roster& initial, const SolverConfig& config)
      : inst(instance), cfg(config), actual(initial), ev(instance, initial), start(Clock::now()) {
    require_feasible(instance, initial);
    if (cfg.filter) cfg.filter->check_compatible(instance);
    best = actual;
    best_z = ev.total();
    trace.initial_z = best_z;
    trace.points.push_back({0.0, best_z, 0, 0});
  }

  double classify(const CandidateMove& m) const {
    const auto& f = *cfg.filter;
    if (m.kind == MoveKind::Replace) return f.score(m.emp_a, m.day, actual.row(m.emp_a), m.shift) + 0.5;
    const Shift a = actual.at(m.emp_a, m.day);
    const Shift b = actual.at(m.emp_b, m.day);
    return f.score(m.emp_a, m.day, actual.row(m.emp_a), b) + f.score(m.emp_b, m.day, actual.row(m.emp_b), a);
  }

  // Classification loop: indices of the retained candidates in enumeration order.
  std::vector<int> filter(std::span<const CandidateMove> moves, int size) {
    std::vector<std::pair<double, int>> kept;
    kept.reserve(size);
    const auto t0 = Clock::now();
    for (int i = 0; i < static_cast<int>(moves.size()); ++i) {
      const double c = classify(moves[i]);
      trace.classifier_calls += moves[i].kind == MoveKind::Swap ? 2 : 1;
      if (static_cast<int>(kept.size()) < size) {
        kept.emplace_back(c, i);
        continue;
      }
      std::size_t worst = 0;
      for (std::size_t k = 1; k < kept.size(); ++k)
        if (kept[k].first < kept[worst].first ||
            (kept[k].first == kept[worst].first && kept[k].second > kept[worst].second))
          worst = k;
      if (kept[worst].first < c) kept[worst] = {c, i};
    }
    std::vector<int> out(kept.size());
    for (std::size_t k = 0; k < kept.size(); ++k) out[k] = kept[k].second;
    std::sort(out.begin(), out.end());
    trace.classify_ns += ns_since(t0);
    return out;
  }

  void audit(std::span<const CandidateMove> moves, std::span<const int> retained) {
    std::vector<char> keep(moves.size(), 0);
    for (int i : retained) keep[i] = 1;
    for (std::size_t i = 0; i < moves.size(); ++i) {
      const bool improves = ev.probe(actual, moves[i], cfg.strategy).delta_z < 0;
      if (keep[i]) {
        ++trace.misclass.accepted;
        trace.misclass.incorrectly_accepted += !improves;
      } else {
        ++trace.misclass.rejected;
        trace.misclass.incorrectly_rejected += improves;
      }
    }
  }

  // Cost-evaluation loop: first strictly best candidate among `indices` (all when empty span
  // and `all` is set). Returns the position in `moves` or -1.
  int best_of(std::span<const CandidateMove> moves, std::span<const int> indices, bool all, Cost& best_delta) {
    const int count = all ? static_cast<int>(moves.size()) : static_cast<int>(indices.size());
    if (cfg.observer) observed.clear();
    int chosen = -1;
    best_delta = 0;
    const auto t0 = Clock::now();
    for (int k = 0; k < count; ++k) {
      const int i = all ? k : indices[k];
      const DeltaResult r = ev.probe(actual, moves[i], cfg.strategy);
      trace.work_units += r.units;
      trace.employee_rows += r.employee_rows;
      if (chosen < 0 || r.delta_z < best_delta) {
        chosen = i;
        best_delta = r.delta_z;
      }
      if (cfg.observer) observed.emplace_back(i, r);
    }
    trace.eval_ns += ns_since(t0);
    trace.cost_evals += count;
    if (cfg.observer)
      for (const auto& [i, r] : observed) cfg.observer(actual, moves[i], r);
    return chosen;
  }

  // Candidate choice through the filter (when configured) or the full loop.
  int choose(std::span<const CandidateMove> moves, Cost& delta) {
    if (moves.empty()) return -1;
    if (!cfg.filter) return best_of(moves, {}, true, delta);
    const auto retained = filter(moves, cfg.filter_size.resolve(static_cast<int>(moves.size())));
    if (cfg.audit) audit(moves, retained);
    const int chosen = best_of(moves, retained, false, delta);
    if (chosen >= 0 && !std::binary_search(retained.begin(), retained.end(), chosen)) ++trace.choices_outside_filter;
    return chosen;
  }

  void commit(const CandidateMove& move) {
    apply_move_in_place(actual, move);
    ev.commit(actual, move);
  }

  void improved() {
    best = actual;
    best_z = ev.total();
    trace.points.push_back({us_since(start), best_z, trace.cost_evals, trace.classifier_calls});
  }

  SolveResult finish() {
    trace.final_z = best_z;
    trace.wall_us = us_since(start);
    trace.points.push_back({trace.wall_us, best_z, trace.cost_evals, trace.classifier_calls});
    return {std::move(best), best_z, std::move(trace)};
  }

  const ProblemInstance& inst;
  const SolverConfig& cfg;
  Roster actual;
  Evaluator ev;
  Roster best;
  Cost best_z = 0;
  SolverTrace trace;
  Clock::time_point start;
  std::vector<std::pair<int, DeltaResult>> observed;
};

}  // namespace

// ---------------------------------------------------------------------------

void TabuList::add(const TabuRecord& record) {
  if (capacity_ == 0) return;
  if (static_cast<int>(ring_.size()) < capacity_) {
    ring_.push_back(record);
    return;
  }
  ring_[next_] = record;
  next_ = (next_ + 1) % ring_.size();
}

bool TabuList::contains(const TabuRecord& record) const {
  return std::find(ring_.begin(), ring_.end(), record) != ring_.end();
}

bool TabuList::forbids(const TabuRecord& record) const {
  if (record.kind == TabuRecord::Kind::Empty) return false;
  for (const auto& e : ring_) {
    if (e.kind != record.kind || e.day != record.day) continue;
    if (e.kind == TabuRecord::Kind::Replace) {
      if (e.emp_a == record.emp_a && ((e.shift_a == record.shift_a && e.shift_b == record.shift_b) ||
                                      (e.shift_a == record.shift_b && e.shift_b == record.shift_a)))
        return true;
      continue;
    }
    const bool same = e.emp_a == record.emp_a && e.emp_b == record.emp_b;
    const bool mirror = e.emp_a == record.emp_b && e.emp_b == record.emp_a;
    if ((same || mirror) && std::minmax(e.shift_a, e.shift_b) == std::minmax(record.shift_a, record.shift_b))
      return true;
  }
  return false;
}

std::optional<int> select_employee(std::span<const Cost> per_employee_z, std::span<const TerminationEntry> info,
                                   int tabu_capacity) {
  std::optional<int> pick;
  for (std::size_t i = 0; i < per_employee_z.size(); ++i) {
    if (info[i].iteration > tabu_capacity) continue;
    if (!pick || per_employee_z[i] > per_employee_z[*pick]) pick = static_cast<int>(i);
  }
  return pick;
}

bool cell_feasible(const ProblemInstance& instance, const Roster& roster, int employee, int day, Shift shift) {
  if (!qualifies(instance, employee, shift)) return false;
  const int min_rest = instance.hard.min_rest_minutes;
  if (min_rest <= 0) return true;
  const auto row = roster.row(employee);
  int prev = day - 1;
  while (prev >= 0 && row[prev] == kDayOff) --prev;
  int next = day + 1;
  while (next < instance.d && row[next] == kDayOff) ++next;
  const bool has_prev = prev >= 0, has_next = next < instance.d;
  if (shift == kDayOff) {
    return !(has_prev && has_next) || rest_gap_minutes(instance, prev, row[prev], next, row[next]) >= min_rest;
  }
  if (has_prev && rest_gap_minutes(instance, prev, row[prev], day, shift) < min_rest) return false;
  if (has_next && rest_gap_minutes(instance, day, shift, next, row[next]) < min_rest) return false;
  return true;
}

void neighborhood(const ProblemInstance& instance, const Roster& roster, int emp_a, std::vector<CandidateMove>& out) {
  out.clear();
  const int d = instance.d;
  std::vector<char> free_a(d);
  for (int j = 0; j < d; ++j) free_a[j] = !instance.fixed_at(emp_a, j);
  for (int b = 0; b < instance.n; ++b) {
    if (b == emp_a) continue;
    for (int j = 0; j < d; ++j) {
      if (!free_a[j]) continue;
      const Shift ca = roster.at(emp_a, j);
      const Shift cb = roster.at(b, j);
      if (ca == cb || instance.fixed_at(b, j)) continue;
      if (!cell_feasible(instance, roster, emp_a, j, cb) || !cell_feasible(instance, roster, b, j, ca)) continue;
      out.push_back(CandidateMove::swap(emp_a, b, j));
    }
  }
  // Replace keeps coverage exact only when the old shift is over-covered and the new one
  // is under-covered on that day; a day off counts as always available.
  for (int j = 0; j < d; ++j) {
    if (!free_a[j]) continue;
    const Shift old = roster.at(emp_a, j);
    std::vector<int> have(instance.s + 1, 0);
    bool any_gap = false;
    for (int i = 0; i < instance.n; ++i) ++have[roster.at(i, j)];
    for (int k = 1; k <= instance.s; ++k) any_gap |= have[k] != instance.required(j, static_cast<Shift>(k));
    if (!any_gap) continue;
    const bool old_surplus = old == kDayOff || have[old] > instance.required(j, old);
    if (!old_surplus) continue;
    for (int k = 0; k <= instance.s; ++k) {
      const Shift nk = static_cast<Shift>(k);
      if (nk == old) continue;
      if (nk != kDayOff && have[nk] >= instance.required(j, nk)) continue;
      if (nk == kDayOff && old == kDayOff) continue;
      if (!cell_feasible(instance, roster, emp_a, j, nk)) continue;
      out.push_back(CandidateMove::replace(emp_a, j, nk));
    }
  }
}

std::vector<CandidateMove> neighborhood(const ProblemInstance& instance, const Roster& roster, int emp_a) {
  std::vector<CandidateMove> out;
  neighborhood(instance, roster, emp_a, out);
  return out;
}

OracleScorer::OracleScorer(const ProblemInstance& instance) : rows_(instance), scratch_(instance.d) {}

double OracleScorer::score(int employee, int day, std::span<const Shift> row_before, Shift after) const {
  std::copy(row_before.begin(), row_before.end(), scratch_.begin());
  scratch_[day] = after;
  const Cost delta = rows_(employee, scratch_) - rows_(employee, row_before);
  return 0.5 - static_cast<double>(delta) / 1048576.0;
}

int FilterSize::resolve(int live) const {
  if (live <= 0) return 0;
  const int k = fraction ? static_cast<int>(std::ceil(value * live - 1e-9)) : static_cast<int>(value);
  return std::clamp(k, 1, live);
}

FilterSize FilterSize::parse(const std::string& text) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(v > 0))
    throw std::invalid_argument("filter size must be a positive count or a fraction in (0,1]: '" + text + "'");
  const bool is_fraction = text.find_first_of(".eE") != std::string::npos || v < 1;
  if (is_fraction) {
    if (v > 1) throw std::invalid_argument("filter fraction must be in (0,1]: '" + text + "'");
    return of(v);
  }
  return absolute(static_cast<int>(v));
}

std::string FilterSize::to_string() const {
  char buf[32];
  if (!fraction) return std::to_string(static_cast<int>(value));
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string_view to_string(Heuristic heuristic) {
  switch (heuristic) {
    case Heuristic::TabuSearch: return "ts";
    case Heuristic::HillClimbing: return "hc";
    case Heuristic::SimulatedAnnealing: return "sa";
  }
  return "?";
}

Heuristic parse_heuristic(std::string_view text) {
  if (text == "ts") return Heuristic::TabuSearch;
  if (text == "hc") return Heuristic::HillClimbing;
  if (text == "sa") return Heuristic::SimulatedAnnealing;
  throw std::invalid_argument("unknown heuristic '" + std::string(text) + "'");
}

MisclassCounter& MisclassCounter::operator+=(const MisclassCounter& o) {
  rejected += o.rejected;
  incorrectly_rejected += o.incorrectly_rejected;
  accepted += o.accepted;
  incorrectly_accepted += o.incorrectly_accepted;
  return *this;
}

// ---------------------------------------------------------------------------
// Tabu search
// ---------------------------------------------------------------------------

SolveResult tabu_search(const ProblemInstance& instance, const Roster& initial, const SolverConfig& config) {
  Search s(instance, initial, config);
  TabuList tabu(config.tabu_capacity);
  std::vector<TerminationEntry> info(instance.n);
  std::vector<CandidateMove> all, live;
  int since_improvement = 0;

  while (since_improvement < config.stop && s.trace.iterations < config.max_iterations && s.best_z > 0) {
    ++s.trace.iterations;
    const auto emp = select_employee(s.ev.per_employee(), info, tabu.capacity());
    if (!emp) break;

    neighborhood(instance, s.actual, *emp, all);
    live.clear();
    for (const auto& m : all) {
      if (tabu.forbids(record_for(s.actual, m))) {
        ++s.trace.tabu_skipped;
        continue;
      }
      live.push_back(m);
    }

    Cost delta = 0;
    const int chosen = s.choose(live, delta);
    Cost local_best_z = std::numeric_limits<Cost>::max();
    TabuRecord record;
    if (chosen >= 0) {
      record = record_for(s.actual, live[chosen]);
      s.commit(live[chosen]);
      local_best_z = s.ev.total();
    }

    if (local_best_z < s.best_z) {
      s.improved();
      std::fill(info.begin(), info.end(), TerminationEntry{});
      tabu.add(record);
      since_improvement = 0;
    } else {
      auto& entry = info[*emp];
      if (local_best_z < entry.roster_penalty) {
        entry.roster_penalty = local_best_z;
        entry.iteration = 0;
      } else {
        ++entry.iteration;
      }
      tabu.add(TabuRecord::empty());
      ++since_improvement;
    }
  }
  return s.finish();
}

SolveResult tabu_search_filtered(const ProblemInstance& instance, const Roster& initial, const SolverConfig& config) {
  if (!config.filter) throw std::invalid_argument("filtered tabu search needs a classifier");
  return tabu_search(instance, initial, config);
}

// ---------------------------------------------------------------------------
// Hill climbing: best improvement for the worst employee that still has one.
// ---------------------------------------------------------------------------

SolveResult hill_climbing(const ProblemInstance& instance, const Roster& initial, const SolverConfig& config) {
  Search s(instance, initial, config);
  std::vector<TerminationEntry> exhausted(instance.n);
  std::vector<CandidateMove> moves;
  while (s.trace.iterations < config.max_iterations && s.best_z > 0) {
    const auto emp = select_employee(s.ev.per_employee(), exhausted, 0);
    if (!emp) break;
    ++s.trace.iterations;
    neighborhood(instance, s.actual, *emp, moves);
    Cost delta = 0;
    const int chosen = s.choose(moves, delta);
    if (chosen >= 0 && delta < 0) {
      s.commit(moves[chosen]);
      s.improved();
      std::fill(exhausted.begin(), exhausted.end(), TerminationEntry{});
    } else {
      exhausted[*emp].iteration = 1;
    }
  }
  return s.finish();
}

// ---------------------------------------------------------------------------
// Simulated annealing
// ---------------------------------------------------------------------------

SolveResult simulated_annealing(const ProblemInstance& instance, const Roster& initial, const SolverConfig& config) {
  if (!(config.sa_initial_temperature > 0) || !std::isfinite(config.sa_initial_temperature))
    throw std::invalid_argument("annealing temperature must be positive");
  if (!(config.sa_cooling > 0 && config.sa_cooling < 1)) throw std::invalid_argument("cooling factor must lie in (0,1)");
  Search s(instance, initial, config);
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<int> pick_emp(0, instance.n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<CandidateMove> moves, sample;
  double temperature = config.sa_initial_temperature;
  int since_improvement = 0;

  while (s.trace.iterations < config.sa_max_steps && since_improvement < config.stop && s.best_z > 0) {
    ++s.trace.iterations;
    const int emp = pick_emp(rng);
    neighborhood(instance, s.actual, emp, moves);
    temperature *= config.sa_cooling;
    if (moves.empty()) {
      ++since_improvement;
      continue;
    }
    const int k = config.filter ? config.filter_size.resolve(static_cast<int>(moves.size())) : 1;
    for (int i = 0; i < k; ++i) {
      std::uniform_int_distribution<int> pick(i, static_cast<int>(moves.size()) - 1);
      std::swap(moves[i], moves[pick(rng)]);
    }
    sample.assign(moves.begin(), moves.begin() + k);

    int chosen = 0;
    if (config.filter) {
      // Classify the whole sample and cost-evaluate only its best-scored member.
      const auto t0 = Clock::now();
      double best_score = -1;
      for (int i = 0; i < k; ++i) {
        const double c = s.classify(sample[i]);
        s.trace.classifier_calls += sample[i].kind == MoveKind::Swap ? 2 : 1;
        if (c > best_score) {
          best_score = c;
          chosen = i;
        }
      }
      s.trace.classify_ns += ns_since(t0);
      if (config.audit) s.audit(sample, std::array<int, 1>{chosen});
    }
    const int pos[1] = {chosen};
    Cost delta = 0;
    s.best_of(sample, pos, false, delta);

    const bool accept = delta <= 0 || unit(rng) < std::exp(-static_cast<double>(delta) / temperature);
    if (accept) {
      s.commit(sample[chosen]);
      if (s.ev.total() < s.best_z) {
        s.improved();
        since_improvement = 0;
        continue;
      }
    }
    ++since_improvement;
  }
  return s.finish();
}

SolveResult solve(const ProblemInstance& instance, const Roster& initial, const SolverConfig& config) {
  switch (config.heuristic) {
    case Heuristic::TabuSearch: return tabu_search(instance, initial, config);
    case Heuristic::HillClimbing: return hill_climbing(instance, initial, config);
    case Heuristic::SimulatedAnnealing: return simulated_annealing(instance, initial, config);
  }
  throw std::invalid_argument("unknown heuristic");
}

// ---------------------------------------------------------------------------
// Initial solutions
// ---------------------------------------------------------------------------

Roster greedy_initial(const ProblemInstance& instance, std::uint64_t seed, int attempts, bool balance_workload) {
  const int n = instance.n, d = instance.d, s = instance.s;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + attempt);
    Roster r(n, d);
    std::vector<char> fixed(static_cast<std::size_t>(n) * d, 0);
    for (int i = 0; i < n; ++i)
      for (const auto& f : instance.employees[i].fixed_assignments) {
        r.set(i, f.day, f.shift);
        fixed[static_cast<std::size_t>(i) * d + f.day] = 1;
      }
    std::vector<int> minutes(n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) minutes[i] += instance.duration(r.at(i, j));

    bool ok = true;
    std::vector<int> order(s), pool;
    for (int j = 0; j < d && ok; ++j) {
      std::iota(order.begin(), order.end(), 1);
      std::shuffle(order.begin(), order.end(), rng);
      for (int k : order) {
        int need = instance.required(j, static_cast<Shift>(k));
        for (int i = 0; i < n; ++i) need -= r.at(i, j) == k;
        if (need < 0) {
          ok = false;
          break;
        }
        pool.clear();
        for (int i = 0; i < n; ++i)
          if (!fixed[static_cast<std::size_t>(i) * d + j] && r.at(i, j) == kDayOff &&
              cell_feasible(instance, r, i, j, static_cast<Shift>(k)))
            pool.push_back(i);
        if (static_cast<int>(pool.size()) < need) {
          ok = false;
          break;
        }
        std::shuffle(pool.begin(), pool.end(), rng);
        if (balance_workload)
          std::stable_sort(pool.begin(), pool.end(), [&](int a, int b) {
            return minutes[a] - instance.employees[a].contract_workload_minutes <
                   minutes[b] - instance.employees[b].contract_workload_minutes;
          });
        for (int q = 0; q < need; ++q) {
          r.set(pool[q], j, static_cast<Shift>(k));
          minutes[pool[q]] += instance.duration(static_cast<Shift>(k));
        }
      }
    }
    if (ok && check_hard(instance, r).empty()) return r;
  }
  throw InfeasibleRoster("no hard-feasible initial roster found after " + std::to_string(attempts) + " attempts");
}

std::string trace_to_csv(const SolverTrace& trace) {
  std::ostringstream out;
  out << "elapsed_us,best_Z,cost_evals,classifier_calls\n";
  char buf[64];
  for (const auto& p : trace.points) {
    const auto res = std::to_chars(buf, buf + sizeof buf, p.elapsed_us, std::chars_format::fixed, 3);
    out << std::string_view(buf, res.ptr - buf) << ',' << p.best_z << ',' << p.cost_evals << ',' << p.classifier_calls
        << '\n';
  }
  return out.str();
}

}  // namespace nrc
