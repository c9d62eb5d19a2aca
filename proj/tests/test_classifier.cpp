#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "nrc/classifier.hpp"
#include "test_util.hpp"

using namespace nrc;

namespace {

ClassifierBank sample_bank() {
  ClassifierBank bank;
  bank.instance_name = "toy";
  bank.d = 10;
  bank.s = 2;
  bank.tau = 15;
  bank.groups = {"part", "default"};
  bank.classifiers.push_back(make_simple(EncodingSpec::parse_tag("binary.w5.f"), 10, 2, {6}, 3));
  Classifier boosted;
  boosted.kind = ClassifierKind::WaldBoost;
  boosted.committee.d = 10;
  boosted.committee.s = 2;
  for (int t = 0; t < 3; ++t) {
    const auto spec = EncodingSpec::parse_tag(t == 0 ? "real" : t == 1 ? "literal.w3" : "real.w5.f");
    WeakClassifier w{spec, Mlp({spec.size(10, 2), 4, 1})};
    w.net.randomize(10 + t, 1.0);
    boosted.committee.members.push_back(w);
    boosted.committee.alpha.push_back(0.1 + 1.0 / 3 * t);
  }
  boosted.committee.stages = {{-0.3, 0.9}, {}, {}};
  bank.classifiers.push_back(boosted);
  return bank;
}

std::vector<Shift> random_row(std::mt19937_64& rng, int d, int s) {
  std::vector<Shift> r(d);
  for (auto& c : r) c = rng() % (s + 1);
  return r;
}

}  // namespace

TEST(Classifier, ZeroWeightsScoreOneHalf) {
  Classifier c = make_simple(EncodingSpec::parse_tag("real"), 7, 2, {3}, 1);
  for (double& p : c.net.params()) p = 0;
  const std::vector<Shift> a = {1, 1, 0, 2, 2, 0, 0}, b = {1, 1, 1, 2, 2, 0, 0};
  EXPECT_DOUBLE_EQ(c.score({a, b, 2}, 2), 0.5);
  EXPECT_EQ(c.decide({a, b, 2}, 2), -1);
}

TEST(Classifier, KindNames) {
  for (auto k : {ClassifierKind::Simple, ClassifierKind::AdaBoost, ClassifierKind::WaldBoost})
    EXPECT_EQ(parse_classifier_kind(to_string(k)), k);
  EXPECT_ANY_THROW(parse_classifier_kind("forest"));
}

TEST(Bank, SerializationRoundTrips) {
  const ClassifierBank bank = sample_bank();
  const std::string text = bank.serialize();
  const ClassifierBank back = ClassifierBank::parse(text);
  EXPECT_EQ(back, bank);
  EXPECT_EQ(back.serialize(), text);
  const auto path = (std::filesystem::temp_directory_path() / "nrc_bank_roundtrip.ncl").string();
  bank.save(path);
  EXPECT_EQ(ClassifierBank::load(path).serialize(), text);
  std::filesystem::remove(path);
}

TEST(Bank, VersionAndFormatErrors) {
  std::string text = sample_bank().serialize();
  std::string bumped = text;
  bumped.replace(bumped.find(" 1\n"), 3, " 2\n");
  EXPECT_THROW(ClassifierBank::parse(bumped), VersionError);
  EXPECT_THROW(ClassifierBank::parse("not a classifier"), FormatError);
  EXPECT_THROW(ClassifierBank::parse(text.substr(0, text.size() / 2)), FormatError);
}

TEST(Bank, GroupLookupAndCompatibility) {
  const ClassifierBank bank = sample_bank();
  EXPECT_EQ(&bank.for_group("default"), &bank.classifiers[1]);
  EXPECT_THROW(bank.for_group("night"), DimensionMismatch);
  const auto millar = load_instance(tu::data_path("millar.inst"));
  EXPECT_THROW(bank.check_compatible(millar), DimensionMismatch);  // d=14
  EXPECT_THROW(BankScorer(std::make_shared<ClassifierBank>(bank), millar), DimensionMismatch);
}

TEST(Incremental, MatchesDirectScoring) {
  std::mt19937_64 rng(5);
  for (const char* tag : {"real", "binary", "literal", "real.w3", "binary.w5", "binary.w7.f", "real.f", "literal.w5.f"}) {
    for (int d : {5, 14}) {
      const Classifier c = make_simple(EncodingSpec::parse_tag(tag), d, 3, {7}, rng());
      IncrementalNet inc(c, d, 3);
      auto before = random_row(rng, d, 3);
      for (int t = 0; t < 300; ++t) {
        if (t % 40 == 0) before = random_row(rng, d, 3);  // the row changes between calls
        const int day = rng() % d;
        auto after = before;
        after[day] = static_cast<Shift>((before[day] + 1 + rng() % 3) % 4);
        EXPECT_NEAR(inc.score(before, day, after[day]), c.score({before, after, day}, 3), 1e-12) << tag;
      }
    }
  }
}

TEST(Scorer, DispatchesByContractGroup) {
  const auto p = tu::random_instance(7, 6, 10, 2);
  auto bank = std::make_shared<ClassifierBank>(sample_bank());
  bank->instance_name = p.name;
  BankScorer scorer(bank, p);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const int e = rng() % p.n;
    const auto before = random_row(rng, 10, 2);
    const int day = rng() % 10;
    auto after = before;
    after[day] = static_cast<Shift>((before[day] + 1) % 3);
    const auto& c = bank->for_group(p.employees[e].group);
    EXPECT_NEAR(scorer.score(e, day, before, after[day]), c.score({before, after, day}, 2), 1e-12);
  }
}

TEST(Classifier, LearnsASeparableToyRule) {
  // Improving iff the changed cell becomes a day off.
  std::mt19937_64 rng(8);
  LabeledSet train, test;
  const EncodingSpec spec = EncodingSpec::parse_tag("binary.w3");
  train.dim = test.dim = spec.size(8, 2);
  std::vector<double> x(train.dim);
  for (int i = 0; i < 600; ++i) {
    const auto before = random_row(rng, 8, 2);
    const int day = rng() % 8;
    auto after = before;
    after[day] = static_cast<Shift>((before[day] + 1 + rng() % 2) % 3);
    encode(spec, 2, before, after, day, x);
    (i < 400 ? train : test).add(x, after[day] == 0 ? 1.0 : 0.0);
  }
  Classifier c = make_simple(spec, 8, 2, {10}, 4);
  train_mlp(c.net, train, {0.3, 100, 2});
  int correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) correct += (c.net.forward(test.row(i)) > 0.5) == (test.target[i] > 0.5);
  EXPECT_GE(correct, 190);
}
