// nrc: solve, harvest, train, bench, classify and inspect from the command line.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nrc/classifier.hpp"
#include "nrc/constraints.hpp"
#include "nrc/harness.hpp"
#include "nrc/heuristics.hpp"
#include "nrc/instance.hpp"
#include "nrc/pipeline.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace nrc;

namespace {

constexpr const char* kVersion = "nrc 1.0";

enum Exit { kOk = 0, kParse = 1, kInfeasible = 2, kMismatch = 3 };

struct Common {
  std::string instance;
  std::uint64_t seed = 1;
  std::string out = "out";
  int verbose = 0;
};

struct SolveArgs {
  std::string strategy = "dec";
  std::string heuristic = "ts";
  std::string filter;
  std::string filter_size = "0.1";
  int stop = 200;
  std::int64_t max_iterations = 1'000'000;
  int tabu = 10;
  bool audit = false;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_manifest(const fs::path& dir, const std::string& command, json config, const std::vector<std::string>& outputs) {
  json m;
  m["tool"] = kVersion;
  m["command"] = command;
  m["config"] = std::move(config);
  m["dataset_version"] = Dataset::kVersion;
  m["classifier_version"] = ClassifierBank::kVersion;
  m["outputs"] = outputs;
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

json solver_json(const SolveArgs& a) {
  return {{"strategy", a.strategy}, {"heuristic", a.heuristic},   {"filter", a.filter},
          {"filter_size", a.filter_size}, {"stop", a.stop}, {"max_iterations", a.max_iterations},
          {"tabu_capacity", a.tabu}, {"audit", a.audit}};
}

SolverConfig solver_config(const SolveArgs& a, std::uint64_t seed) {
  SolverConfig cfg;
  cfg.heuristic = parse_heuristic(a.heuristic);
  cfg.strategy = parse_strategy(a.strategy);
  cfg.stop = a.stop;
  cfg.max_iterations = a.max_iterations;
  cfg.tabu_capacity = a.tabu;
  cfg.seed = seed;
  cfg.filter_size = FilterSize::parse(a.filter_size);
  cfg.audit = a.audit;
  return cfg;
}

std::shared_ptr<const CandidateScorer> load_scorer(const std::string& path, const ProblemInstance& instance) {
  auto bank = std::make_shared<const ClassifierBank>(ClassifierBank::load(path));
  return std::make_shared<BankScorer>(bank, instance);
}

void add_solver_flags(CLI::App* app, SolveArgs& a) {
  app->add_option("--strategy", a.strategy, "eval, dc, de, dec or da")->check(CLI::IsMember({"eval", "dc", "de", "dec", "da"}));
  app->add_option("--heuristic", a.heuristic, "ts, hc or sa")->check(CLI::IsMember({"ts", "hc", "sa"}));
  app->add_option("--filter-size", a.filter_size, "retained candidates: count or fraction");
  app->add_option("--stop", a.stop, "iterations without improvement")->check(CLI::PositiveNumber);
  app->add_option("--max-iterations", a.max_iterations)->check(CLI::PositiveNumber);
  app->add_option("--tabu", a.tabu, "tabu list capacity")->check(CLI::NonNegativeNumber);
}

void add_common(CLI::App* app, Common& c, bool need_instance = true) {
  auto* opt = app->add_option("--instance", c.instance, "instance file")->check(CLI::ExistingFile);
  if (need_instance) opt->required();
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--out", c.out, "output directory");
}

std::string summary_line(const SolveResult& r) {
  std::ostringstream s;
  s << "final_Z=" << r.best_z << " initial_Z=" << r.trace.initial_z << " evals=" << r.trace.cost_evals
    << " classifier_calls=" << r.trace.classifier_calls << " iterations=" << r.trace.iterations
    << " elapsed_ms=" << r.trace.wall_us / 1000.0;
  return s.str();
}

int cmd_solve(const Common& c, const SolveArgs& a) {
  const ProblemInstance inst = load_instance(c.instance);
  SolverConfig cfg = solver_config(a, c.seed);
  if (!a.filter.empty()) cfg.filter = load_scorer(a.filter, inst);
  const Roster initial = greedy_initial(inst, c.seed);
  const SolveResult r = solve(inst, initial, cfg);
  fs::create_directories(c.out);
  const fs::path dir(c.out);
  write_file(dir / "roster.txt", serialize_roster(inst, r.best));
  write_file(dir / "trace.csv", trace_to_csv(r.trace));
  json config = solver_json(a);
  config["instance"] = c.instance;
  config["seed"] = c.seed;
  write_manifest(dir, "solve", config, {"roster.txt", "trace.csv"});
  std::cout << summary_line(r) << '\n';
  return kOk;
}

int cmd_harvest(const Common& c, const SolveArgs& a, int runs, std::size_t samples, Cost tau) {
  const ProblemInstance inst = load_instance(c.instance);
  HarvestOptions o;
  o.runs = runs;
  o.target_size = samples;
  o.seed = c.seed;
  o.tau = tau;
  o.solver = solver_config(a, c.seed);
  HarvestReport rep;
  const Dataset ds = collect_samples(inst, o, &rep);
  fs::create_directories(c.out);
  const fs::path dir(c.out);
  ds.save((dir / "dataset.bin").string());
  json config = solver_json(a);
  config["instance"] = c.instance;
  config["seed"] = c.seed;
  config["runs"] = runs;
  config["samples"] = samples;
  config["tau"] = ds.tau;
  write_manifest(dir, "harvest", config, {"dataset.bin"});
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
  const auto counts = ds.class_counts();
  std::cout << "samples=" << ds.samples.size() << " candidates=" << rep.candidates << " unique=" << rep.unique
            << " per_class=" << counts[0] << '/' << counts[1] << '/' << counts[2] << '/' << counts[3] << '/' << counts[4]
            << '\n';
  return kOk;
}

int cmd_train(const Common& c, const std::string& dataset_path, const std::string& mode, int rounds, int epochs,
              std::string encoding, double lr) {
  const Dataset ds = Dataset::load(dataset_path);
  BankTrainOptions o;
  o.mode = parse_classifier_kind(mode);
  o.split_seed = c.seed;
  o.simple.encoding = EncodingSpec::parse_tag(encoding);
  o.simple.train.epochs = epochs;
  o.simple.train.learning_rate = lr;
  o.simple.train.seed = c.seed;
  o.boosted.rounds = rounds;
  o.boosted.seed = c.seed;
  std::vector<GroupReport> reports;
  const ClassifierBank bank = train_bank(ds, o, &reports);
  fs::create_directories(c.out);
  const fs::path dir(c.out);
  bank.save((dir / "classifier.txt").string());

  json rep = json::array();
  for (const auto& g : reports) {
    json j = {{"group", g.group}};
    if (o.mode == ClassifierKind::Simple) {
      j["rate"] = g.simple.rate;
      j["binary_rate"] = g.simple.binary_rate;
      j["train_size"] = g.simple.train_size;
      j["test_size"] = g.simple.test_size;
      j["overfitting_epoch"] = g.simple.overfitting_epoch;
      j["warnings"] = g.simple.warnings;
      std::cout << "group " << g.group << " rate=" << g.simple.rate << " binary_rate=" << g.simple.binary_rate << '\n';
    } else {
      j["train_rate"] = g.boosted.train_rate;
      j["test_rate"] = g.boosted.test_rate;
      j["members"] = g.boosted.boost.chosen;
      j["member_test_rates"] = g.boosted.member_test_rates;
      j["mean_stages"] = g.boosted.mean_stages;
      j["agreement"] = g.boosted.agreement;
      j["degenerate_cascade"] = g.boosted.calibration.degenerate;
      std::cout << "group " << g.group << " test_rate=" << g.boosted.test_rate << " members=" << g.boosted.boost.chosen.size()
                << '\n';
    }
    rep.push_back(j);
  }
  write_file(dir / "train_report.json", rep.dump(2) + "\n");
  write_manifest(dir, "train",
                 {{"dataset", dataset_path}, {"seed", c.seed}, {"mode", mode}, {"T", rounds}, {"epochs", epochs},
                  {"encoding", encoding}, {"learning_rate", lr}},
                 {"classifier.txt", "train_report.json"});
  return kOk;
}

std::vector<std::uint64_t> seed_list(std::uint64_t first, int count) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < count; ++i) seeds.push_back(first + static_cast<std::uint64_t>(i));
  return seeds;
}

int cmd_bench(const Common& c, const SolveArgs& a, const std::string& modes, const std::string& heuristics, int seeds,
              bool robustness) {
  const ProblemInstance inst = load_instance(c.instance);
  fs::create_directories(c.out);
  const fs::path dir(c.out);
  BenchOptions bo;
  bo.stop = a.stop;
  bo.max_iterations = a.max_iterations;
  bo.tabu_capacity = a.tabu;
  const auto seed_set = seed_list(c.seed, seeds);
  std::vector<std::string> outputs;
  BenchReport report;
  std::vector<RunRecord> runs;

  if (a.filter.empty()) {
    std::vector<EvaluationStrategy> strategies;
    if (modes == "all") {
      strategies.assign(kAllStrategies.begin(), kAllStrategies.end());
    } else {
      std::stringstream ss(modes);
      for (std::string m; std::getline(ss, m, ',');) strategies.push_back(parse_strategy(m));
    }
    std::vector<Heuristic> hs;
    std::stringstream ss(heuristics);
    for (std::string h; std::getline(ss, h, ',');) hs.push_back(parse_heuristic(h));
    report = bench_evaluation_modes(inst, hs, strategies, seed_set, bo, &runs);
  } else {
    auto bank = std::make_shared<const ClassifierBank>(ClassifierBank::load(a.filter));
    FilteredOptions fo;
    fo.heuristic = parse_heuristic(a.heuristic);
    fo.bench = bo;
    const FilterSize size = FilterSize::parse(a.filter_size);
    const auto scorer = std::make_shared<BankScorer>(bank, inst);
    FilteredSummary sum = bench_filtered_vs_standard(inst, scorer, seed_set, size, fo);
    report = sum.report;
    runs = sum.runs;
    std::cout << "speedup=" << sum.speedup << " quality_diff=" << sum.quality_diff
              << " reject_pct=" << sum.misclass.reject_rate() << " accept_pct=" << sum.misclass.accept_rate() << '\n';
    if (robustness) {
      const RobustnessReport rob = robustness_suite(
          inst, [&](const ProblemInstance& m) { return std::make_shared<BankScorer>(bank, m); }, all_mutations(), seed_set,
          size, fo);
      write_file(dir / "robustness.csv", rob.combined.to_csv());
      outputs.push_back("robustness.csv");
      for (const auto& e : rob.entries)
        std::cout << e.mutation << (e.skipped ? " skipped: " + e.reason
                                               : " quality_diff=" + std::to_string(e.result.quality_diff) +
                                                     " speedup=" + std::to_string(e.result.speedup))
                  << '\n';
    }
  }
  write_file(dir / "bench.csv", report.to_csv());
  write_file(dir / "events.jsonl", event_log_jsonl(runs));
  outputs.push_back("bench.csv");
  outputs.push_back("events.jsonl");
  for (const auto& p : trace_export(runs, (dir / "traces").string())) outputs.push_back(fs::relative(p, dir).string());
  for (const auto& n : report.notes) std::cout << "note: " << n << '\n';
  json config = solver_json(a);
  config["instance"] = c.instance;
  config["seed"] = c.seed;
  config["seeds"] = seeds;
  config["modes"] = modes;
  config["heuristics"] = heuristics;
  config["robustness"] = robustness;
  write_manifest(dir, "bench", config, outputs);
  std::cout << "rows=" << report.rows.size() << '\n';
  return kOk;
}

// Pattern file: one change per line, "<employee-id> <before cells> / <after cells>".
int cmd_classify(const Common& c, const std::string& classifier, const std::string& patterns) {
  const ProblemInstance inst = load_instance(c.instance);
  const auto bank = std::make_shared<const ClassifierBank>(ClassifierBank::load(classifier));
  const BankScorer scorer(bank, inst);
  std::ifstream in(patterns);
  if (!in) throw std::runtime_error("cannot read " + patterns);
  std::string line;
  int lineno = 0;
  std::cout << "line,employee,day,score,decision,class\n";
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    int id = 0;
    if (!(ls >> id)) continue;
    if (id < 1 || id > inst.n) throw ParseError(lineno, "unknown employee " + std::to_string(id));
    std::vector<Shift> before, after;
    bool second = false;
    for (std::string tok; ls >> tok;) {
      if (tok == "/") {
        second = true;
        continue;
      }
      std::optional<Shift> k = tok == "O" ? std::optional<Shift>(kDayOff) : inst.shift_by_label(tok);
      if (!k) throw ParseError(lineno, "unknown cell '" + tok + "'");
      (second ? after : before).push_back(*k);
    }
    if (static_cast<int>(before.size()) != inst.d || static_cast<int>(after.size()) != inst.d)
      throw ParseError(lineno, "rows must have " + std::to_string(inst.d) + " cells on both sides of '/'");
    int day = -1, diffs = 0;
    for (int j = 0; j < inst.d; ++j)
      if (before[j] != after[j]) {
        day = j;
        ++diffs;
      }
    if (diffs != 1) throw ParseError(lineno, "rows must differ in exactly one day");
    const double score = scorer.score(id - 1, day, before, after[day]);
    const Classifier& cl = bank->for_group(inst.employees[id - 1].group);
    std::cout << lineno << ',' << id << ',' << day + 1 << ',' << score << ',' << cl.decide({before, after, day}, inst.s)
              << ',' << to_string(nearest_class(score)) << '\n';
  }
  return kOk;
}

int cmd_inspect(const Common& c, const std::string& roster, const std::string& dataset, const std::string& classifier) {
  if (!c.instance.empty()) {
    const ProblemInstance inst = load_instance(c.instance);
    std::cout << "instance " << inst.name << " n=" << inst.n << " d=" << inst.d << " s=" << inst.s
              << " soft_constraints=" << inst.soft_constraints.size() << " tau=" << default_tau(inst) << '\n';
    for (const auto& g : inst.groups()) std::cout << "group " << g << '\n';
    if (!roster.empty()) {
      std::ifstream in(roster);
      if (!in) throw std::runtime_error("cannot read " + roster);
      std::stringstream buf;
      buf << in.rdbuf();
      const Roster r = parse_roster(inst, buf.str());
      const auto eval = evaluate_full(inst, r);
      std::cout << "Z=" << eval.total_z << '\n';
      for (const auto& [name, z] : eval.per_constraint) std::cout << "  " << name << ' ' << z << '\n';
      const auto hard = check_hard(inst, r);
      std::cout << "hard_violations=" << hard.size() << '\n';
      for (const auto& v : hard) std::cout << "  " << to_string(v.kind) << ": " << v.detail << '\n';
    }
  }
  if (!dataset.empty()) {
    const Dataset ds = Dataset::load(dataset);
    std::cout << "dataset " << ds.instance_name << " d=" << ds.d << " s=" << ds.s << " tau=" << ds.tau
              << " samples=" << ds.samples.size() << " runs=" << ds.seeds.size() << '\n';
    for (int g = 0; g < static_cast<int>(ds.groups.size()); ++g) {
      const auto counts = ds.class_counts(g);
      std::cout << "group " << ds.groups[g];
      for (int k = 0; k < kClassCount; ++k) std::cout << ' ' << to_string(static_cast<PseudoClass>(k)) << '=' << counts[k];
      std::cout << '\n';
    }
  }
  if (!classifier.empty()) {
    const ClassifierBank bank = ClassifierBank::load(classifier);
    std::cout << "classifier " << bank.instance_name << " d=" << bank.d << " s=" << bank.s << " tau=" << bank.tau << '\n';
    for (std::size_t g = 0; g < bank.groups.size(); ++g) {
      const auto& cl = bank.classifiers[g];
      std::cout << "group " << bank.groups[g] << ' ' << to_string(cl.kind);
      if (cl.kind == ClassifierKind::Simple)
        std::cout << " encoding=" << cl.spec.tag() << " params=" << cl.net.param_count();
      else
        std::cout << " members=" << cl.committee.members.size() << " stages=" << cl.committee.stages.size();
      std::cout << '\n';
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nurse rostering with classifier-filtered local search"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common common;
  SolveArgs sargs;

  auto* solve = app.add_subcommand("solve", "improve a greedy roster with a local search heuristic");
  add_common(solve, common);
  add_solver_flags(solve, sargs);
  solve->add_option("--filter", sargs.filter, "classifier file")->check(CLI::ExistingFile);
  solve->add_flag("--audit", sargs.audit, "count misclassifications of the filter");

  int runs = 20;
  std::size_t samples = 2000;
  Cost tau = 0;
  auto* harvest = app.add_subcommand("harvest", "collect labelled changes from unfiltered tabu search runs");
  add_common(harvest, common);
  add_solver_flags(harvest, sargs);
  harvest->add_option("--runs", runs, "solver runs")->check(CLI::PositiveNumber);
  harvest->add_option("--samples", samples, "target dataset size")->check(CLI::PositiveNumber);
  harvest->add_option("--tau", tau, "pseudo-class threshold (default: largest weight)");

  std::string dataset, mode = "simple", encoding = "real";
  int rounds = 10, epochs = 100;
  double lr = 0.3;
  auto* train = app.add_subcommand("train", "train one classifier per contract group");
  add_common(train, common, false);
  train->add_option("--dataset", dataset, "dataset file")->required()->check(CLI::ExistingFile);
  train->add_option("--mode", mode, "simple, adaboost or waldboost")->check(CLI::IsMember({"simple", "adaboost", "waldboost"}));
  train->add_option("--T", rounds, "boosting rounds")->check(CLI::PositiveNumber);
  train->add_option("--epochs", epochs, "epochs of the simple network")->check(CLI::PositiveNumber);
  train->add_option("--encoding", encoding, "encoding tag of the simple network");
  train->add_option("--lr", lr, "learning rate of the simple network")->check(CLI::PositiveNumber);

  std::string modes = "all", heuristics = "ts";
  int seeds = 5;
  bool robustness = false;
  auto* bench = app.add_subcommand("bench", "compare evaluation strategies, or filtered against standard search");
  add_common(bench, common);
  add_solver_flags(bench, sargs);
  bench->add_option("--modes", modes, "'all' or a comma list of strategies");
  bench->add_option("--heuristics", heuristics, "comma list of ts, hc, sa");
  bench->add_option("--seeds", seeds, "number of consecutive seeds")->check(CLI::PositiveNumber);
  bench->add_option("--filter", sargs.filter, "classifier file: filtered vs standard")->check(CLI::ExistingFile);
  bench->add_flag("--robustness", robustness, "also run the mutation suite (needs --filter)");

  std::string classifier, patterns;
  auto* classify = app.add_subcommand("classify", "score the changes of a pattern file");
  add_common(classify, common);
  classify->add_option("--classifier", classifier, "classifier file")->required()->check(CLI::ExistingFile);
  classify->add_option("--patterns", patterns, "pattern file")->required()->check(CLI::ExistingFile);

  std::string roster;
  auto* inspect = app.add_subcommand("inspect", "summarise an instance, roster, dataset or classifier");
  add_common(inspect, common, false);
  inspect->add_option("--roster", roster, "roster file (needs --instance)")->check(CLI::ExistingFile);
  inspect->add_option("--dataset", dataset, "dataset file")->check(CLI::ExistingFile);
  inspect->add_option("--classifier", classifier, "classifier file")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (*solve) return cmd_solve(common, sargs);
    if (*harvest) return cmd_harvest(common, sargs, runs, samples, tau);
    if (*train) return cmd_train(common, dataset, mode, rounds, epochs, encoding, lr);
    if (*bench) {
      if (robustness && sargs.filter.empty()) throw std::invalid_argument("--robustness needs --filter");
      return cmd_bench(common, sargs, modes, heuristics, seeds, robustness);
    }
    if (*classify) return cmd_classify(common, classifier, patterns);
    if (*inspect) return cmd_inspect(common, roster, dataset, classifier);
  } catch (const InfeasibleRoster& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const DimensionMismatch& e) {
    std::cerr << "classifier mismatch: " << e.what() << '\n';
    return kMismatch;
  } catch (const VersionError& e) {
    std::cerr << "classifier mismatch: " << e.what() << '\n';
    return kMismatch;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const SemanticError& e) {
    std::cerr << "invalid instance: " << e.what() << '\n';
    return kParse;
  } catch (const FormatError& e) {
    std::cerr << "bad file: " << e.what() << '\n';
    return kParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  }
  return kOk;
}
