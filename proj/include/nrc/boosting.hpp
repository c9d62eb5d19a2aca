#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrc/encoding.hpp"
#include "nrc/mlp.hpp"

namespace nrc {

// ---------------------------------------------------------------------------
// AdaBoost core, independent of the weak model.
// ---------------------------------------------------------------------------

inline constexpr double kMaxCorrelation = 1.0 - 1e-9;

struct BoostRound {
  int chosen = -1;           // pool index, -1 when skipped
  double r = 0.0;            // sum_i D_t(i) o_i h_t(p_i) of the chosen member (unclamped)
  double alpha = 0.0;
  bool skipped = false;      // every member had r = 0
  std::vector<double> member_r;
  std::vector<double> distribution;  // D_{t+1}
};

template <class Model>
struct WeakFit {
  Model model;
  std::vector<int> h;  // +1 / -1 on every training sample
};

template <class Model>
struct BoostResult {
  std::vector<double> initial;  // D_0
  std::vector<BoostRound> rounds;
  std::vector<Model> models;    // chosen members of the non-skipped rounds
  std::vector<double> alphas;
};

inline double alpha_of(double r) {
  const double c = std::clamp(r, -kMaxCorrelation, kMaxCorrelation);
  return 0.5 * std::log((1.0 + c) / (1.0 - c));
}

// fit_pool(D, round) -> std::vector<WeakFit<Model>>: members fitted to the weighted data.
template <class Model, class PoolFit>
BoostResult<Model> adaboost(std::span<const int> labels, int rounds, PoolFit&& fit_pool) {
  const std::size_t n = labels.size();
  if (n == 0) throw std::invalid_argument("boosting needs at least one sample");
  if (rounds < 1) throw std::invalid_argument("boosting needs at least one round");
  BoostResult<Model> out;
  std::vector<double> D(n, 1.0 / static_cast<double>(n));
  out.initial = D;
  for (int t = 0; t < rounds; ++t) {
    std::vector<WeakFit<Model>> pool = fit_pool(std::span<const double>(D), t);
    BoostRound round;
    round.member_r.resize(pool.size());
    for (std::size_t m = 0; m < pool.size(); ++m) {
      double r = 0.0;
      for (std::size_t i = 0; i < n; ++i) r += D[i] * labels[i] * pool[m].h[i];
      round.member_r[m] = r;
      if (round.chosen < 0 || std::abs(r) > std::abs(round.r)) {
        round.chosen = static_cast<int>(m);
        round.r = r;
      }
    }
    if (round.chosen < 0 || round.r == 0.0) {
      round.skipped = true;
      round.chosen = -1;
      round.r = 0.0;
      round.distribution = D;
      out.rounds.push_back(std::move(round));
      continue;
    }
    round.alpha = alpha_of(round.r);
    const auto& h = pool[round.chosen].h;
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      D[i] *= std::exp(-round.alpha * labels[i] * h[i]);
      norm += D[i];
    }
    for (double& w : D) w /= norm;
    round.distribution = D;
    out.models.push_back(std::move(pool[round.chosen].model));
    out.alphas.push_back(round.alpha);
    out.rounds.push_back(std::move(round));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Committees of small networks
// ---------------------------------------------------------------------------

// One employee's row change as seen by a classifier.
struct Change {
  std::span<const Shift> before;
  std::span<const Shift> after;
  int day = 0;
};

struct WeakSpec {
  std::string name;
  EncodingSpec encoding;
  std::vector<int> hidden = {10};
  int epochs = 30;
  double learning_rate = 0.3;

  bool operator==(const WeakSpec&) const = default;
};

// {real, binary} x {full period, 5-day window} x {plain, derived features}, plus a 3-day
// real window and a literal binary window with features.
std::vector<WeakSpec> default_weak_pool();

struct WeakClassifier {
  EncodingSpec spec;
  Mlp net;

  double output(const Change& change, int s) const;  // network output in (0,1)
  int decide(const Change& change, int s) const { return output(change, s) > 0.5 ? 1 : -1; }
  bool operator==(const WeakClassifier&) const = default;
};

struct CascadeStage {
  double reject = -std::numeric_limits<double>::infinity();
  double accept = std::numeric_limits<double>::infinity();
  bool operator==(const CascadeStage&) const = default;
};

struct Committee {
  int d = 0;
  int s = 0;
  std::vector<WeakClassifier> members;
  std::vector<double> alpha;
  std::vector<CascadeStage> stages;  // empty: plain AdaBoost

  double alpha_mass() const;  // sum |alpha|
  bool operator==(const Committee&) const = default;
};

struct CommitteeOutput {
  double raw = 0;      // sum alpha_t h_t
  double score = 0.5;  // (raw / sum |alpha_t| + 1) / 2
  int decision = -1;   // sign(raw), 0 -> -1
};

struct CascadeOutput {
  int decision = -1;
  int stages_used = 0;
  double partial = 0;  // partial score at exit
  double score = 0.5;  // partial normalised by the |alpha| mass of the evaluated prefix
};

CommitteeOutput committee_classify(const Committee& committee, const Change& change);
CascadeOutput cascade_classify(const Committee& committee, const Change& change);

// Binary-labelled changes stored by value.
struct BoostSamples {
  int d = 0;
  int s = 0;
  std::vector<Shift> before;  // size() * d
  std::vector<Shift> after;
  std::vector<int> day;
  std::vector<int> label;  // +1 improving, -1 otherwise

  std::size_t size() const noexcept { return label.size(); }
  Change change(std::size_t i) const {
    return {{before.data() + i * d, static_cast<std::size_t>(d)}, {after.data() + i * d, static_cast<std::size_t>(d)},
            day[i]};
  }
  void add(std::span<const Shift> b, std::span<const Shift> a, int changed_day, int y);
};

struct BoostOptions {
  int rounds = 10;
  std::uint64_t seed = 1;
};

struct BoostReport {
  std::vector<BoostRound> rounds;
  std::vector<std::string> chosen;  // spec names of the committee members
};

Committee adaboost_train(const BoostSamples& samples, std::span<const WeakSpec> pool, const BoostOptions& options,
                         BoostReport* report = nullptr);

struct CalibrationReport {
  bool degenerate = false;  // no stage allows an exit: the cascade is the full committee
  int exits = 0;            // calibration samples that exit before the last member
};

// Post-hoc early-exit thresholds: at every prefix the accept (reject) threshold is the
// loosest one whose exiting samples disagree with the full committee at most at rate
// alpha_rate (beta). Stages whose thresholds cross are disabled.
CalibrationReport waldboost_calibrate(Committee& committee, const BoostSamples& samples, double beta,
                                      double alpha_rate);

}  // namespace nrc
