#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "nrc/boosting.hpp"
#include "nrc/pipeline.hpp"
#include "test_util.hpp"

using namespace nrc;

namespace {

// Fixed hypothesis vectors standing in for fitted weak models.
auto fixed_pool(const std::vector<std::vector<int>>& H) {
  return [H](std::span<const double>, int) {
    std::vector<WeakFit<int>> fits;
    for (std::size_t j = 0; j < H.size(); ++j) fits.push_back({static_cast<int>(j), H[j]});
    return fits;
  };
}

Committee random_committee(int members, std::uint64_t seed, int d = 14, int s = 2) {
  std::mt19937_64 rng(seed);
  Committee c;
  c.d = d;
  c.s = s;
  const auto pool = default_weak_pool();
  for (int t = 0; t < members; ++t) {
    const auto& spec = pool[t % pool.size()];
    WeakClassifier w{spec.encoding, Mlp({spec.encoding.size(d, s), 4, 1})};
    w.net.randomize(rng(), 2.0);
    c.members.push_back(w);
    c.alpha.push_back(std::uniform_real_distribution<double>(-0.5, 2.0)(rng));
  }
  return c;
}

struct Pattern {
  std::vector<Shift> before, after;
  int day;
  Change change() const { return {before, after, day}; }
};

Pattern random_pattern(std::mt19937_64& rng, int d = 14, int s = 2) {
  Pattern p{std::vector<Shift>(d), {}, static_cast<int>(rng() % d)};
  for (auto& c : p.before) c = rng() % (s + 1);
  p.after = p.before;
  p.after[p.day] = static_cast<Shift>((p.before[p.day] + 1 + rng() % s) % (s + 1));
  return p;
}

const BoostSamples& harvested() {
  static const BoostSamples samples = [] {
    const auto inst = load_instance(tu::data_path("millar.inst"));
    HarvestOptions ho;
    ho.runs = 4;
    ho.target_size = 300;
    return to_boost_samples(collect_samples(inst, ho));
  }();
  return samples;
}

}  // namespace

TEST(Alpha, ZeroCorrelationGivesZeroWeight) { EXPECT_EQ(alpha_of(0.0), 0.0); }

TEST(Alpha, PerfectCorrelationIsClamped) {
  const double a = alpha_of(1.0);
  EXPECT_NEAR(a, 0.5 * std::log((2.0 - 1e-9) / 1e-9), 1e-6);
  EXPECT_NEAR(a, 10.708, 1e-3);
  EXPECT_EQ(alpha_of(-1.0), -a);
}

TEST(AdaBoost, TwoPointPerfectMember) {
  const std::vector<int> labels = {1, -1};
  const auto res = adaboost<int>(labels, 1, fixed_pool({{1, -1}}));
  ASSERT_EQ(res.rounds.size(), 1u);
  EXPECT_DOUBLE_EQ(res.rounds[0].r, 1.0);
  EXPECT_NEAR(res.rounds[0].alpha, 10.708, 1e-3);
  EXPECT_NEAR(res.rounds[0].distribution[0], 0.5, 1e-15);
  EXPECT_NEAR(res.rounds[0].distribution[1], 0.5, 1e-15);
}

TEST(AdaBoost, MatchesHandFormulasOverRounds) {
  std::mt19937_64 rng(11);
  const int m = 20;
  std::vector<int> o(m);
  for (int& v : o) v = rng() % 2 ? 1 : -1;
  std::vector<std::vector<int>> H(5, std::vector<int>(m));
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < m; ++i) H[j][i] = static_cast<int>(rng() % 10) < 2 + j ? -o[i] : o[i];
  const auto res = adaboost<int>(o, 10, fixed_pool(H));
  std::vector<double> D(m, 1.0 / m);
  for (const auto& round : res.rounds) {
    ASSERT_FALSE(round.skipped);
    // r_t = sum_i D_t(i) o_i h_t(p_i), member with the largest |r| wins
    double best_abs = -1;
    int best = -1;
    for (int j = 0; j < 5; ++j) {
      double r = 0;
      for (int i = 0; i < m; ++i) r += D[i] * o[i] * H[j][i];
      EXPECT_NEAR(round.member_r[j], r, 1e-12);
      if (std::abs(r) > best_abs) best_abs = std::abs(r), best = j;
    }
    EXPECT_EQ(round.chosen, best);
    const double r = round.r;
    EXPECT_NEAR(round.alpha, 0.5 * std::log((1 + r) / (1 - r)), 1e-12);
    double Z = 0;
    for (int i = 0; i < m; ++i) Z += D[i] * std::exp(-round.alpha * o[i] * H[best][i]);
    for (int i = 0; i < m; ++i) D[i] = D[i] * std::exp(-round.alpha * o[i] * H[best][i]) / Z;
    for (int i = 0; i < m; ++i) EXPECT_NEAR(round.distribution[i], D[i], 1e-12);
    EXPECT_NEAR(std::accumulate(round.distribution.begin(), round.distribution.end(), 0.0), 1.0, 1e-12);
  }
  // The committee is at least as accurate on the training data as any single member.
  int committee_errors = 0;
  for (int i = 0; i < m; ++i) {
    double raw = 0;
    for (std::size_t t = 0; t < res.models.size(); ++t) raw += res.alphas[t] * H[res.models[t]][i];
    committee_errors += (raw > 0 ? 1 : -1) != o[i];
  }
  for (int j = 0; j < 5; ++j) {
    int errors = 0;
    for (int i = 0; i < m; ++i) errors += H[j][i] != o[i];
    EXPECT_LE(committee_errors, errors);
  }
}

TEST(AdaBoost, UselessPoolSkipsTheRound) {
  const std::vector<int> labels = {1, -1, 1, -1};
  const auto res = adaboost<int>(labels, 2, fixed_pool({{1, 1, 1, 1}}));
  ASSERT_EQ(res.rounds.size(), 2u);
  EXPECT_TRUE(res.rounds[0].skipped);
  EXPECT_TRUE(res.models.empty());
  EXPECT_THROW(adaboost<int>(std::vector<int>{}, 1, fixed_pool({})), std::invalid_argument);
}

TEST(Committee, SingleMemberDecidesAlone) {
  Committee c = random_committee(1, 3);
  c.alpha[0] = 0.7;
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_pattern(rng);
    EXPECT_EQ(committee_classify(c, p.change()).decision, c.members[0].decide(p.change(), 2));
  }
}

TEST(Committee, ScoreIsTheWeightedSum) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const Committee c = random_committee(1 + k % 7, 10 + k);
    for (int t = 0; t < 20; ++t) {
      const auto p = random_pattern(rng);
      double raw = 0, mass = 0;
      for (std::size_t m = 0; m < c.members.size(); ++m) {
        raw += c.alpha[m] * (c.members[m].net.forward(std::vector<double>([&] {
                               std::vector<double> x(c.members[m].spec.size(14, 2));
                               encode(c.members[m].spec, 2, p.before, p.after, p.day, x);
                               return x;
                             }())) > 0.5
                                 ? 1
                                 : -1);
        mass += std::abs(c.alpha[m]);
      }
      const auto out = committee_classify(c, p.change());
      EXPECT_NEAR(out.raw, raw, 1e-12);
      EXPECT_NEAR(out.score, (raw / mass + 1) / 2, 1e-12);
      EXPECT_EQ(out.decision, raw > 0 ? 1 : -1);
    }
  }
}

TEST(Committee, UnanimousPositiveScoresTheAlphaMass) {
  Committee c = random_committee(3, 4);
  for (auto& w : c.members) {
    auto p = w.net.params();
    std::fill(p.begin(), p.end(), 0.0);
    p[p.size() - 1] = 5.0;  // output threshold pushes every member to +1
  }
  c.alpha = {0.5, 1.0, 0.25};
  std::mt19937_64 rng(5);
  const auto out = committee_classify(c, random_pattern(rng).change());
  EXPECT_DOUBLE_EQ(out.raw, 1.75);
  EXPECT_EQ(out.decision, 1);
  EXPECT_DOUBLE_EQ(out.score, 1.0);
  // An accept threshold below the first weight exits after one member.
  c.stages = {{-1.0, 0.4}, {-1.0, 10.0}, {}};
  const auto cas = cascade_classify(c, random_pattern(rng).change());
  EXPECT_EQ(cas.stages_used, 1);
  EXPECT_EQ(cas.decision, 1);
}

TEST(Committee, NormalisedScoreRanksLikeTheRawSum) {
  const Committee c = random_committee(5, 21);
  std::mt19937_64 rng(22);
  std::vector<std::pair<double, double>> out;
  for (int t = 0; t < 300; ++t) {
    const auto p = random_pattern(rng);
    const auto o = committee_classify(c, p.change());
    out.emplace_back(o.raw, o.score);
  }
  std::vector<int> by_raw(out.size()), by_score(out.size());
  std::iota(by_raw.begin(), by_raw.end(), 0);
  std::iota(by_score.begin(), by_score.end(), 0);
  std::stable_sort(by_raw.begin(), by_raw.end(), [&](int a, int b) { return out[a].first > out[b].first; });
  std::stable_sort(by_score.begin(), by_score.end(), [&](int a, int b) { return out[a].second > out[b].second; });
  EXPECT_EQ(by_raw, by_score);
}

TEST(Cascade, DisabledExitsReproduceTheCommittee) {
  Committee c = random_committee(6, 8);
  c.stages.assign(6, CascadeStage{});
  std::mt19937_64 rng(6);
  for (int t = 0; t < 2000; ++t) {
    const auto p = random_pattern(rng);
    const auto cas = cascade_classify(c, p.change());
    EXPECT_EQ(cas.stages_used, 6);
    EXPECT_EQ(cas.decision, committee_classify(c, p.change()).decision);
  }
}

TEST(BoostTraining, SingleRoundCommitteeEqualsItsMember) {
  const auto& samples = harvested();
  BoostOptions opt;
  opt.rounds = 1;
  BoostReport rep;
  const Committee c = adaboost_train(samples, default_weak_pool(), opt, &rep);
  ASSERT_EQ(c.members.size(), 1u);
  ASSERT_EQ(rep.chosen.size(), 1u);
  for (std::size_t i = 0; i < samples.size(); ++i)
    EXPECT_EQ(committee_classify(c, samples.change(i)).decision, c.members[0].decide(samples.change(i), c.s));
}

TEST(BoostTraining, CalibrationWithZeroTargetsIsExact) {
  const auto& samples = harvested();
  BoostOptions opt;
  opt.rounds = 4;
  std::vector<WeakSpec> pool = default_weak_pool();
  for (auto& w : pool) w.epochs = 10;
  Committee c = adaboost_train(samples, pool, opt);
  Committee strict = c;
  waldboost_calibrate(strict, samples, 0.0, 0.0);
  double stages = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto cas = cascade_classify(strict, samples.change(i));
    EXPECT_EQ(cas.decision, committee_classify(c, samples.change(i)).decision);
    stages += cas.stages_used;
  }
  EXPECT_LE(stages / samples.size(), static_cast<double>(c.members.size()));
  // Looser targets allow more exits but keep the disagreement within the target.
  Committee loose = c;
  const auto rep = waldboost_calibrate(loose, samples, 0.05, 0.05);
  int disagree = 0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    disagree += cascade_classify(loose, samples.change(i)).decision != committee_classify(c, samples.change(i)).decision;
  EXPECT_LE(disagree, static_cast<int>(0.1 * samples.size()) + 1);
  EXPECT_GE(rep.exits, 0);
}

TEST(BoostTraining, RejectsInconsistentSamples) {
  BoostSamples s;
  s.d = 3;
  s.s = 2;
  const std::vector<Shift> a = {1, 2, 0}, b = {1, 2};
  EXPECT_THROW(s.add(a, b, 0, 1), DimensionMismatch);
}
