#include "nrc/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "nrc/mlp.hpp"

namespace nrc {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::int64_t eval_time_ns(const SolverTrace& t) { return t.eval_ns + t.classify_ns; }

BenchRow row_of(const ProblemInstance& instance, Heuristic h, std::string mode, std::string filter, std::uint64_t seed,
                const SolverTrace& t) {
  BenchRow r;
  r.instance = instance.name;
  r.heuristic = std::string(to_string(h));
  r.mode = std::move(mode);
  r.filter = std::move(filter);
  r.seed = seed;
  r.evals = t.cost_evals;
  r.classifier_calls = t.classifier_calls;
  r.total_eval_ms = eval_time_ns(t) / 1e6;
  r.mean_eval_us = t.cost_evals ? eval_time_ns(t) / 1e3 / t.cost_evals : 0.0;
  r.final_z = t.final_z;
  r.reject_pct = t.misclass.reject_rate();
  r.accept_pct = t.misclass.accept_rate();
  return r;
}

SolverConfig base_config(const BenchOptions& o, Heuristic h, std::uint64_t seed) {
  SolverConfig cfg;
  cfg.heuristic = h;
  cfg.stop = o.stop;
  cfg.max_iterations = o.max_iterations;
  cfg.tabu_capacity = o.tabu_capacity;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

std::string BenchReport::to_csv() const {
  std::ostringstream out;
  out << "instance,heuristic,mode,filter,seed,evals,classifier_calls,mean_eval_us,total_eval_ms,final_Z,"
         "quality_diff,reject_pct,accept_pct,speedup\n";
  for (const auto& r : rows)
    out << r.instance << ',' << r.heuristic << ',' << r.mode << ',' << r.filter << ',' << r.seed << ',' << r.evals
        << ',' << r.classifier_calls << ',' << fmt(r.mean_eval_us) << ',' << fmt(r.total_eval_ms) << ','
        << r.final_z << ',' << fmt(r.quality_diff) << ',' << fmt(r.reject_pct) << ',' << fmt(r.accept_pct) << ','
        << fmt(r.speedup) << '\n';
  return out.str();
}

BenchReport bench_evaluation_modes(const ProblemInstance& instance, const std::vector<Heuristic>& heuristics,
                                   const std::vector<EvaluationStrategy>& strategies,
                                   const std::vector<std::uint64_t>& seeds, const BenchOptions& options,
                                   std::vector<RunRecord>* runs) {
  if (seeds.empty()) throw std::invalid_argument("bench needs at least one seed");
  if (heuristics.empty() || strategies.empty()) throw std::invalid_argument("bench needs heuristics and strategies");
  const auto ref_it = std::find(strategies.begin(), strategies.end(), EvaluationStrategy::DeltaEC);
  const std::size_t ref = ref_it == strategies.end() ? 0 : static_cast<std::size_t>(ref_it - strategies.begin());

  for (int w = 0; w < options.warmup_runs; ++w) {
    SolverConfig cfg = base_config(options, heuristics.front(), seeds.front());
    cfg.strategy = strategies.front();
    solve(instance, greedy_initial(instance, seeds.front()), cfg);
  }

  BenchReport report;
  for (Heuristic h : heuristics) {
    for (std::uint64_t seed : seeds) {
      const Roster initial = greedy_initial(instance, seed);
      std::vector<SolverTrace> traces;
      for (EvaluationStrategy st : strategies) {
        SolverConfig cfg = base_config(options, h, seed);
        cfg.strategy = st;
        traces.push_back(solve(instance, initial, cfg).trace);
      }
      for (std::size_t k = 0; k < strategies.size(); ++k) {
        if (traces[k].final_z != traces[0].final_z || traces[k].cost_evals != traces[0].cost_evals)
          throw ExactnessError("strategies disagree on " + instance.name + " heuristic " +
                               std::string(to_string(h)) + " seed " + std::to_string(seed) + ": " +
                               std::string(to_string(strategies[0])) + " Z=" + std::to_string(traces[0].final_z) +
                               " evals=" + std::to_string(traces[0].cost_evals) + ", " +
                               std::string(to_string(strategies[k])) + " Z=" + std::to_string(traces[k].final_z) +
                               " evals=" + std::to_string(traces[k].cost_evals));
      }
      const double ref_ns = static_cast<double>(eval_time_ns(traces[ref]));
      for (std::size_t k = 0; k < strategies.size(); ++k) {
        BenchRow r = row_of(instance, h, std::string(to_string(strategies[k])), "-", seed, traces[k]);
        const auto ns = eval_time_ns(traces[k]);
        r.speedup = ns > 0 ? ref_ns / ns : 0.0;
        report.rows.push_back(std::move(r));
        if (runs)
          runs->push_back({std::string(to_string(h)) + "-" + std::string(to_string(strategies[k])), seed, traces[k]});
      }
    }
  }
  report.notes.push_back("speedup reference: " + std::string(to_string(strategies[ref])));
  return report;
}

FilteredSummary bench_filtered_vs_standard(const ProblemInstance& instance,
                                           std::shared_ptr<const CandidateScorer> scorer,
                                           const std::vector<std::uint64_t>& seeds, FilterSize filter_size,
                                           const FilteredOptions& options) {
  if (!scorer) throw std::invalid_argument("filtered bench needs a classifier");
  if (seeds.empty()) throw std::invalid_argument("bench needs at least one seed");
  scorer->check_compatible(instance);

  for (int w = 0; w < options.bench.warmup_runs; ++w) {
    SolverConfig cfg = base_config(options.bench, options.heuristic, seeds.front());
    solve(instance, greedy_initial(instance, seeds.front()), cfg);
  }

  FilteredSummary out;
  const std::string label = std::string(to_string(options.heuristic));
  std::int64_t standard_ns = 0, filtered_ns = 0;
  double standard_z = 0, filtered_z = 0;
  for (std::uint64_t seed : seeds) {
    const Roster initial = greedy_initial(instance, seed);
    SolverConfig cfg = base_config(options.bench, options.heuristic, seed);
    cfg.strategy = EvaluationStrategy::DeltaEC;
    const SolverTrace standard = solve(instance, initial, cfg).trace;
    cfg.filter = scorer;
    cfg.filter_size = filter_size;
    cfg.audit = options.audit;
    const SolverTrace filtered = solve(instance, initial, cfg).trace;

    BenchRow sr = row_of(instance, options.heuristic, "dec", "-", seed, standard);
    BenchRow fr = row_of(instance, options.heuristic, "filtered", filter_size.to_string(), seed, filtered);
    fr.quality_diff = static_cast<double>(filtered.final_z - standard.final_z);
    fr.speedup = eval_time_ns(filtered) > 0 ? static_cast<double>(eval_time_ns(standard)) / eval_time_ns(filtered) : 0;
    out.report.rows.push_back(sr);
    out.report.rows.push_back(fr);
    out.runs.push_back({label + "-dec", seed, standard});
    out.runs.push_back({label + "-filtered", seed, filtered});

    standard_ns += eval_time_ns(standard);
    filtered_ns += eval_time_ns(filtered);
    standard_z += static_cast<double>(standard.final_z);
    filtered_z += static_cast<double>(filtered.final_z);
    out.misclass += filtered.misclass;
  }
  const double k = static_cast<double>(seeds.size());
  out.mean_standard_z = standard_z / k;
  out.mean_filtered_z = filtered_z / k;
  out.quality_diff = out.mean_filtered_z - out.mean_standard_z;
  out.speedup = filtered_ns > 0 ? static_cast<double>(standard_ns) / filtered_ns : 0.0;
  out.report.notes.push_back("filter size " + filter_size.to_string() +
                             (filter_size.fraction ? " (fraction of the live neighborhood)" : " (absolute count)"));
  if (!options.audit) out.report.notes.push_back("audit off: misclassification rates are not measured");
  return out;
}

std::string merged_trace_csv(const std::vector<RunRecord>& runs) {
  struct Item {
    double t;
    std::size_t run;
    std::size_t point;
  };
  std::vector<Item> items;
  for (std::size_t r = 0; r < runs.size(); ++r)
    for (std::size_t p = 0; p < runs[r].trace.points.size(); ++p) items.push_back({runs[r].trace.points[p].elapsed_us, r, p});
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return std::tie(a.t, a.run, a.point) < std::tie(b.t, b.run, b.point); });
  std::ostringstream out;
  out << "elapsed_us,run,seed,best_Z,cost_evals,classifier_calls\n";
  for (const auto& it : items) {
    const auto& p = runs[it.run].trace.points[it.point];
    out << fmt(p.elapsed_us) << ',' << runs[it.run].label << ',' << runs[it.run].seed << ',' << p.best_z << ','
        << p.cost_evals << ',' << p.classifier_calls << '\n';
  }
  return out.str();
}

std::vector<std::string> trace_export(const std::vector<RunRecord>& runs, const std::string& directory) {
  std::vector<std::string> written;
  if (runs.empty()) return written;
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const auto write = [&](const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
    written.push_back(path.string());
  };
  for (std::size_t r = 0; r < runs.size(); ++r)
    write(fs::path(directory) / (runs[r].label + "_" + std::to_string(runs[r].seed) + ".csv"), trace_to_csv(runs[r].trace));
  write(fs::path(directory) / "merged.csv", merged_trace_csv(runs));
  return written;
}

std::string event_log_jsonl(const std::vector<RunRecord>& runs) {
  std::ostringstream out;
  for (const auto& r : runs) {
    const auto& t = r.trace;
    nlohmann::ordered_json run = {
        {"event", "run"},
        {"run", r.label},
        {"seed", r.seed},
        {"iterations", t.iterations},
        {"cost_evals", t.cost_evals},
        {"classifier_calls", t.classifier_calls},
        {"eval_ns", t.eval_ns},
        {"classify_ns", t.classify_ns},
        {"work_units", t.work_units},
        {"tabu_skipped", t.tabu_skipped},
        {"rejected", t.misclass.rejected},
        {"incorrectly_rejected", t.misclass.incorrectly_rejected},
        {"accepted", t.misclass.accepted},
        {"incorrectly_accepted", t.misclass.incorrectly_accepted},
        {"initial_Z", t.initial_z},
        {"final_Z", t.final_z},
    };
    out << run.dump() << '\n';
    for (const auto& p : t.points) {
      nlohmann::ordered_json ev = {{"event", "best"},          {"run", r.label},
                                   {"seed", r.seed},           {"elapsed_us", p.elapsed_us},
                                   {"best_Z", p.best_z},       {"cost_evals", p.cost_evals},
                                   {"classifier_calls", p.classifier_calls}};
      out << ev.dump() << '\n';
    }
  }
  return out.str();
}

std::string Mutation::name() const {
  std::string base;
  switch (kind) {
    case MutationKind::AddConstraints: base = "sc+"; break;
    case MutationKind::RemoveConstraints: base = "sc-"; break;
    case MutationKind::AddEmployees: base = "e+"; break;
    case MutationKind::RemoveEmployees: base = "e-"; break;
  }
  return count == 1 ? base : std::to_string(count) + base;
}

Mutation Mutation::parse(const std::string& text) {
  for (const auto& m : all_mutations())
    if (m.name() == text) return m;
  throw std::invalid_argument("unknown mutation '" + text + "'");
}

std::vector<Mutation> all_mutations() {
  std::vector<Mutation> out;
  for (int count : {1, 3})
    for (auto kind : {MutationKind::AddConstraints, MutationKind::RemoveConstraints, MutationKind::AddEmployees,
                      MutationKind::RemoveEmployees})
      out.push_back({kind, count});
  return out;
}

namespace {

SoftConstraintSpec template_constraint(const ProblemInstance& inst, std::mt19937_64& rng, int index) {
  using T = PatternToken;
  const T off{T::Kind::DayOff, kDayOff};
  const T any{T::Kind::AnyShift, kDayOff};
  std::uniform_int_distribution<int> pick_shift(1, inst.s);
  const auto exact = [&](int k) { return T{T::Kind::Exact, static_cast<Shift>(k)}; };

  PatternParams p;
  p.window_from = 0;
  p.window_to = inst.d - 1;
  switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
    case 0:  // isolated working day
      p.tokens = {off, any, off};
      p.max_matches = 0;
      break;
    case 1: {  // three equal shifts in a row
      const auto k = exact(pick_shift(rng));
      p.tokens = {k, k, k};
      p.max_matches = 0;
      break;
    }
    case 2: {  // forbidden succession
      const int a = pick_shift(rng);
      const int b = inst.s > 1 ? 1 + (a % inst.s) : a;
      p.tokens = {exact(a), exact(b)};
      p.max_matches = 0;
      break;
    }
    case 3:  // a free weekend
      p.tokens = {off, off};
      p.window_from = std::min(5, std::max(0, inst.d - 2));
      p.step = 7;
      p.min_matches = 1;
      break;
    default:  // six working days in a row
      p.tokens = {any, any, any, any, any, any};
      p.max_matches = 0;
      break;
  }
  if (static_cast<int>(p.tokens.size()) > p.window_to - p.window_from + 1) p.tokens.resize(1);
  SoftConstraintSpec sc;
  sc.name = "mut" + std::to_string(index);
  sc.weight = std::uniform_int_distribution<Cost>(1, default_tau(inst))(rng);
  sc.params = p;
  return sc;
}

void rescale(ProblemInstance& inst, int old_n) {
  for (int day = 0; day < inst.d; ++day) {
    int total = 0;
    for (int k = 0; k < inst.s; ++k) {
      auto& req = inst.coverage[static_cast<std::size_t>(day) * inst.s + k];
      req = static_cast<int>(std::lround(static_cast<double>(req) * inst.n / old_n));
      total += req;
    }
    // Never demand more shifts than there are employees.
    for (int k = inst.s - 1; k >= 0 && total > inst.n; --k) {
      auto& req = inst.coverage[static_cast<std::size_t>(day) * inst.s + k];
      const int cut = std::min(req, total - inst.n);
      req -= cut;
      total -= cut;
    }
  }
}

}  // namespace

ProblemInstance mutate(const ProblemInstance& base, const Mutation& mutation, std::uint64_t seed, bool rescale_coverage) {
  if (mutation.count < 1) throw std::invalid_argument("mutation count must be positive");
  ProblemInstance inst = base;
  inst.name = base.name + "." + mutation.name();
  std::mt19937_64 rng(seed * 7919 + static_cast<std::uint64_t>(mutation.kind) * 31 + mutation.count);
  switch (mutation.kind) {
    case MutationKind::AddConstraints:
      for (int i = 0; i < mutation.count; ++i)
        inst.soft_constraints.push_back(template_constraint(base, rng, static_cast<int>(inst.soft_constraints.size()) + 1));
      break;
    case MutationKind::RemoveConstraints:
      if (static_cast<int>(inst.soft_constraints.size()) < mutation.count)
        throw std::invalid_argument("instance has fewer than " + std::to_string(mutation.count) + " soft constraints");
      for (int i = 0; i < mutation.count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, inst.soft_constraints.size() - 1);
        inst.soft_constraints.erase(inst.soft_constraints.begin() + static_cast<std::ptrdiff_t>(pick(rng)));
      }
      break;
    case MutationKind::AddEmployees:
      for (int i = 0; i < mutation.count; ++i) {
        std::uniform_int_distribution<int> pick(0, inst.n - 1);
        const int src = pick(rng);
        Employee e = inst.employees[src];
        e.id = inst.n + 1;
        e.fixed_assignments.clear();
        inst.employees.push_back(e);
        for (auto& sc : inst.soft_constraints)
          if (!sc.scope.empty() && std::find(sc.scope.begin(), sc.scope.end(), src) != sc.scope.end())
            sc.scope.push_back(inst.n);
        ++inst.n;
      }
      break;
    case MutationKind::RemoveEmployees:
      if (inst.n <= mutation.count) throw std::invalid_argument("cannot remove every employee");
      for (int i = 0; i < mutation.count; ++i) {
        std::uniform_int_distribution<int> pick(0, inst.n - 1);
        const int gone = pick(rng);
        inst.employees.erase(inst.employees.begin() + gone);
        for (int k = gone; k < inst.n - 1; ++k) inst.employees[k].id = k + 1;
        std::vector<SoftConstraintSpec> kept;
        for (auto& sc : inst.soft_constraints) {
          if (!sc.scope.empty()) {
            std::vector<int> scope;
            for (int e : sc.scope)
              if (e != gone) scope.push_back(e > gone ? e - 1 : e);
            if (scope.empty()) continue;  // an empty scope would mean everybody
            sc.scope = std::move(scope);
          }
          kept.push_back(std::move(sc));
        }
        inst.soft_constraints = std::move(kept);
        --inst.n;
      }
      break;
  }
  if (rescale_coverage && inst.n != base.n) rescale(inst, base.n);
  inst.validate();
  return inst;
}

RobustnessReport robustness_suite(const ProblemInstance& base, const ScorerFactory& scorer,
                                  const std::vector<Mutation>& mutations, const std::vector<std::uint64_t>& seeds,
                                  FilterSize filter_size, const FilteredOptions& options) {
  RobustnessReport report;
  const std::int64_t calls_before = training_calls();
  for (std::size_t m = 0; m < mutations.size(); ++m) {
    RobustnessEntry entry;
    entry.mutation = mutations[m].name();
    try {
      const ProblemInstance inst = mutate(base, mutations[m], m + 1);
      entry.n = inst.n;
      entry.constraints = static_cast<int>(inst.soft_constraints.size());
      greedy_initial(inst, seeds.empty() ? 1 : seeds.front());
      entry.result = bench_filtered_vs_standard(inst, scorer(inst), seeds, filter_size, options);
      for (auto row : entry.result.report.rows) {
        row.instance = inst.name;
        report.combined.rows.push_back(std::move(row));
      }
    } catch (const InfeasibleRoster& e) {
      entry.skipped = true;
      entry.reason = std::string("infeasible: ") + e.what();
    } catch (const SemanticError& e) {
      entry.skipped = true;
      entry.reason = std::string("invalid: ") + e.what();
    } catch (const std::invalid_argument& e) {
      entry.skipped = true;
      entry.reason = e.what();
    }
    if (entry.skipped) report.combined.notes.push_back(entry.mutation + " skipped: " + entry.reason);
    report.entries.push_back(std::move(entry));
  }
  report.training_calls = training_calls() - calls_before;
  if (report.training_calls != 0) throw std::logic_error("robustness suite retrained a classifier");
  return report;
}

CallCosts measure_call_costs(const ProblemInstance& instance, const CandidateScorer& scorer, std::int64_t calls,
                             std::uint64_t seed) {
  scorer.check_compatible(instance);
  std::mt19937_64 rng(seed);
  std::vector<CandidateMove> moves;
  CallCosts out;
  std::int64_t eval_ns = 0, classify_ns = 0;
  volatile double sink = 0;  // keeps the timed loops from being optimised away
  std::uint64_t round = 0;
  while (out.calls < calls) {
    const Roster roster = greedy_initial(instance, seed * 1000 + round++);
    const Evaluator ev(instance, roster);
    for (int attempt = 0; attempt < instance.n && out.calls < calls; ++attempt) {
      const int e = std::uniform_int_distribution<int>(0, instance.n - 1)(rng);
      neighborhood(instance, roster, e, moves);
      if (moves.empty()) continue;

      auto t0 = Clock::now();
      for (const auto& mv : moves) sink = sink + static_cast<double>(ev.probe(roster, mv, EvaluationStrategy::DeltaEC).delta_z);
      eval_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();

      t0 = Clock::now();
      for (const auto& mv : moves) {
        CellChange ch[2];
        const int count = cell_changes(roster, mv, ch);
        for (int k = 0; k < count; ++k) sink = sink + scorer.score(ch[k].employee, ch[k].day, roster.row(ch[k].employee), ch[k].after);
      }
      classify_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
      out.calls += static_cast<std::int64_t>(moves.size());
    }
    if (round > 1000 && out.calls == 0) throw std::runtime_error("instance has no neighborhood to measure");
  }
  out.eval_ns = static_cast<double>(eval_ns) / out.calls;
  out.classify_ns = static_cast<double>(classify_ns) / out.calls;
  out.ratio = out.classify_ns > 0 ? out.eval_ns / out.classify_ns : 0.0;
  return out;
}

}  // namespace nrc
