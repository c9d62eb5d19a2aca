#include <gtest/gtest.h>

#include <cstdio>
#include <map>
#include <random>
#include <set>

#include "nrc/constraints.hpp"
#include "nrc/pipeline.hpp"
#include "test_util.hpp"

using namespace nrc;

namespace {

const ProblemInstance& millar() {
  static const ProblemInstance p = load_instance(tu::data_path("millar.inst"));
  return p;
}

const Dataset& harvest(HarvestReport* report = nullptr) {
  static HarvestReport rep;
  static const Dataset ds = [] {
    HarvestOptions ho;
    ho.runs = 4;
    ho.target_size = 500;
    return collect_samples(millar(), ho, &rep);
  }();
  if (report) *report = rep;
  return ds;
}

// Synthetic dataset with a chosen number of records per class.
Dataset synthetic(const std::array<int, kClassCount>& per_class, int d = 6) {
  Dataset ds;
  ds.instance_name = "syn";
  ds.d = d;
  ds.s = 2;
  ds.tau = 10;
  ds.groups = {"default"};
  ds.seeds = {1, 2};
  std::mt19937_64 rng(1);
  for (int c = 0; c < kClassCount; ++c)
    for (int k = 0; k < per_class[c]; ++k) {
      TrainingRecord r;
      r.day = rng() % d;
      r.before.resize(d);
      for (auto& x : r.before) x = rng() % 3;
      r.after = r.before;
      r.after[r.day] = static_cast<Shift>((r.before[r.day] + 1) % 3);
      r.label = static_cast<PseudoClass>(c);
      r.raw_delta = c * 5 - 10;
      ds.samples.push_back(r);
    }
  return ds;
}

}  // namespace

TEST(Harvest, StoppedSearchYieldsNothing) {
  HarvestOptions ho;
  ho.runs = 1;
  ho.solver.stop = 0;
  HarvestReport rep;
  const Dataset ds = collect_samples(millar(), ho, &rep);
  EXPECT_TRUE(ds.samples.empty());
  EXPECT_EQ(rep.candidates, 0);
  EXPECT_EQ(ds.seeds.size(), 1u);
}

TEST(Harvest, LabelsMatchTheCostOracle) {
  const Dataset& ds = harvest();
  ASSERT_FALSE(ds.samples.empty());
  for (const auto& r : ds.samples) {
    const Cost zb = evaluate_row(millar(), r.employee, r.before);
    const Cost za = evaluate_row(millar(), r.employee, r.after);
    EXPECT_EQ(r.raw_delta, zb - za);
    EXPECT_EQ(r.label, label_sample(zb - za, ds.tau));
    int diff = 0;
    for (int j = 0; j < ds.d; ++j) diff += r.before[j] != r.after[j];
    EXPECT_EQ(diff, 1);
    EXPECT_NE(r.before[r.day], r.after[r.day]);
  }
}

TEST(Harvest, ClassesAreBalancedAndDistinct) {
  HarvestReport rep;
  const Dataset& ds = harvest(&rep);
  const auto counts = ds.class_counts();
  std::size_t lo = SIZE_MAX, hi = 0;
  for (auto c : counts)
    if (c) lo = std::min(lo, c), hi = std::max(hi, c);
  EXPECT_LE(hi - lo, 1u);
  EXPECT_EQ(hi, rep.quota);
  std::set<std::uint64_t> seen;
  for (const auto& r : ds.samples) EXPECT_TRUE(seen.insert(record_fingerprint(r, ds.s)).second);
  EXPECT_GE(rep.unique, static_cast<std::int64_t>(ds.samples.size()));
  EXPECT_GE(rep.candidates, rep.unique);
}

TEST(Harvest, SeededRunsAreReproducible) {
  HarvestOptions ho;
  ho.runs = 2;
  ho.target_size = 100;
  ho.seed = 5;
  EXPECT_EQ(collect_samples(millar(), ho), collect_samples(millar(), ho));
}

TEST(Split, SevenThreeAndStratified) {
  const Dataset ten = synthetic({2, 2, 2, 2, 2});
  const auto sp = split(ten, 3);
  EXPECT_EQ(sp.train.samples.size(), 7u);
  EXPECT_EQ(sp.test.samples.size(), 3u);
  const Dataset ds = synthetic({40, 13, 27, 9, 31});
  const auto s2 = split(ds, 4);
  EXPECT_EQ(s2.train.samples.size() + s2.test.samples.size(), ds.samples.size());
  const auto all = ds.class_counts(), tr = s2.train.class_counts();
  for (int c = 0; c < kClassCount; ++c) EXPECT_NEAR(static_cast<double>(tr[c]), 0.7 * all[c], 1.0);
  EXPECT_EQ(split(ds, 4).train, s2.train);
  EXPECT_NE(split(ds, 5).train.samples, s2.train.samples);
  EXPECT_THROW(split(Dataset{}, 1), std::invalid_argument);
}

TEST(DatasetFile, BytesRoundTrip) {
  const Dataset& ds = harvest();
  const std::string bytes = ds.to_bytes();
  const Dataset back = Dataset::from_bytes(bytes);
  EXPECT_EQ(back, ds);
  EXPECT_EQ(back.to_bytes(), bytes);
}

TEST(DatasetFile, VersionAndTruncation) {
  const std::string bytes = synthetic({1, 1, 1, 1, 1}).to_bytes();
  std::string bumped = bytes;
  bumped[4] = static_cast<char>(bumped[4] + 1);  // version word follows the magic
  EXPECT_THROW(Dataset::from_bytes(bumped), VersionError);
  EXPECT_THROW(Dataset::from_bytes(bytes.substr(0, bytes.size() - 3)), FormatError);
  EXPECT_THROW(Dataset::from_bytes("junk"), FormatError);
  EXPECT_THROW(Dataset::from_bytes(bytes + "x"), FormatError);
}

TEST(SimpleTraining, SingleClassIsTriviallyPerfect) {
  const auto sp = split(synthetic({0, 0, 20, 0, 0}), 1);
  SimpleTrainOptions opt;
  opt.encoding = EncodingSpec::parse_tag("binary");
  opt.train.epochs = 200;
  SimpleReport rep;
  train_simple(sp, opt, &rep);
  EXPECT_DOUBLE_EQ(rep.rate, 1.0);
  ASSERT_FALSE(rep.warnings.empty());
  EXPECT_NE(rep.warnings[0].find("single"), std::string::npos);
}

TEST(SimpleTraining, ReportedRateIsARecount) {
  const auto sp = split(harvest(), 2);
  SimpleTrainOptions opt;
  opt.encoding = EncodingSpec::parse_tag("binary.w7.f");
  opt.train.epochs = 30;
  SimpleReport rep;
  const Classifier c = train_simple(sp, opt, &rep);
  ASSERT_EQ(rep.test_outputs.size(), sp.test.samples.size());
  int hits = 0;
  for (std::size_t i = 0; i < sp.test.samples.size(); ++i) {
    const auto& r = sp.test.samples[i];
    EXPECT_DOUBLE_EQ(rep.test_outputs[i], c.score(r.change(), sp.test.s));
    hits += nearest_class(rep.test_outputs[i]) == r.label;
  }
  EXPECT_DOUBLE_EQ(rep.rate, static_cast<double>(hits) / sp.test.samples.size());
  EXPECT_EQ(rep.curve.train_loss.size(), 30u);
}

TEST(SimpleTraining, OverfittingOnset) {
  TrainCurve curve;
  for (int e = 0; e < 30; ++e) {
    curve.train_loss.push_back(1.0 / (e + 1));
    curve.test_loss.push_back(e < 12 ? 1.0 - e * 0.01 : 0.9 + e * 0.01);
  }
  EXPECT_EQ(overfitting_onset(curve), 12);
  EXPECT_EQ(overfitting_onset(curve, 20), -1);
  curve.test_loss.assign(30, 0.5);
  EXPECT_EQ(overfitting_onset(curve), -1);
}

TEST(BoostedTraining, SingleRoundMatchesItsMember) {
  const auto sp = split(harvest(), 2);
  BoostedTrainOptions opt;
  opt.rounds = 1;
  for (auto& w : opt.pool) w.epochs = 10;
  BoostedReport rep;
  train_boosted(sp, opt, &rep);
  ASSERT_EQ(rep.member_test_rates.size(), 1u);
  EXPECT_DOUBLE_EQ(rep.test_rate, rep.member_test_rates[0]);
  EXPECT_THROW(train_boosted(sp, BoostedTrainOptions{ClassifierKind::Simple}), std::invalid_argument);
}

TEST(BoostedTraining, CascadeAgreementWithinTargets) {
  const auto sp = split(harvest(), 2);
  BoostedTrainOptions opt;
  opt.mode = ClassifierKind::WaldBoost;
  opt.rounds = 5;
  for (auto& w : opt.pool) w.epochs = 10;
  BoostedReport rep;
  const Classifier c = train_boosted(sp, opt, &rep);
  EXPECT_EQ(c.kind, ClassifierKind::WaldBoost);
  EXPECT_LE(rep.mean_stages, static_cast<double>(c.committee.members.size()));
  // Held-out agreement; the slack covers the generalisation gap of the calibration.
  EXPECT_GE(rep.agreement, 1.0 - (opt.beta + opt.alpha_rate) - 0.05);
}

TEST(BankTraining, OneClassifierPerGroup) {
  const auto p = tu::random_instance(2, 8, 10, 2);
  HarvestOptions ho;
  ho.runs = 2;
  ho.target_size = 200;
  const Dataset ds = collect_samples(p, ho);
  BankTrainOptions opt;
  opt.simple.encoding = EncodingSpec::parse_tag("real");
  opt.simple.train.epochs = 5;
  std::vector<GroupReport> reps;
  const ClassifierBank bank = train_bank(ds, opt, &reps);
  EXPECT_EQ(bank.groups, p.groups());
  EXPECT_EQ(reps.size(), bank.groups.size());
  EXPECT_NO_THROW(bank.check_compatible(p));
}

TEST(Split, TrainAndTestPatternsAreDisjoint) {
  const auto sp = split(harvest(), 7);
  std::set<std::uint64_t> train;
  for (const auto& r : sp.train.samples) train.insert(record_fingerprint(r, sp.train.s));
  for (const auto& r : sp.test.samples) EXPECT_FALSE(train.count(record_fingerprint(r, sp.test.s)));
}

TEST(Labels, MonotoneInTheCostChange) {
  for (Cost tau : {1, 7, 30})
    for (Cost a = -80; a <= 80; ++a)
      for (Cost b = a + 1; b <= 80; b += 3) EXPECT_LE(label_sample(a, tau), label_sample(b, tau));
}

TEST(Labels, RealEncodingIsInjective) {
  std::mt19937_64 rng(12);
  std::map<std::vector<double>, std::pair<std::vector<Shift>, std::vector<Shift>>> seen;
  ProblemInstance shape;
  shape.n = 1;
  shape.d = 6;
  shape.s = 3;
  for (int t = 0; t < 3000; ++t) {
    std::vector<Shift> a(6), b(6);
    for (auto& c : a) c = rng() % 4;
    for (auto& c : b) c = rng() % 4;
    const auto v = encode_real(shape, a, b);
    const auto [it, fresh] = seen.emplace(v, std::make_pair(a, b));
    if (!fresh) EXPECT_EQ(it->second, std::make_pair(a, b));
  }
}

// Directional check on the shipped fixture: fresh tabu search runs, started like the
// harvest runs, rarely revisit a pattern of the training data.
TEST(ShippedFixture, FreshRunsRarelyRevisitTrainingPatterns) {
  HarvestOptions ho;
  ho.runs = 20;
  ho.seed = 1;
  const Dataset ds = collect_samples(millar(), ho);
  std::set<std::uint64_t> fresh;
  TrainingRecord rec;
  SolverConfig cfg;
  cfg.observer = [&](const Roster& roster, const CandidateMove& move, const DeltaResult&) {
    CellChange ch[2];
    const int k = cell_changes(roster, move, ch);
    for (int c = 0; c < k; ++c) {
      const auto row = roster.row(ch[c].employee);
      rec.before.assign(row.begin(), row.end());
      rec.after = rec.before;
      rec.after[ch[c].day] = ch[c].after;
      rec.day = ch[c].day;
      rec.group = millar().group_index(ch[c].employee);
      fresh.insert(record_fingerprint(rec, ds.s));
    }
  };
  const auto replay = [&](std::uint64_t first, int count) {
    fresh.clear();
    for (std::uint64_t seed = first; seed < first + count; ++seed) {
      cfg.seed = seed;
      tabu_search(millar(), greedy_initial(millar(), seed, 200, false), cfg);
    }
    std::size_t hits = 0;
    for (const auto& r : ds.samples) hits += fresh.count(record_fingerprint(r, ds.s));
    return hits;
  };
  const std::size_t revisited = replay(500, 20);
  std::printf("training patterns revisited by 20 fresh runs: %zu of %zu\n", revisited, ds.samples.size());
  EXPECT_LT(static_cast<double>(revisited), 0.05 * ds.samples.size());
  // The source seeds themselves regenerate every training pattern.
  EXPECT_EQ(replay(1000, 20), ds.samples.size());
}
