#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nrc/boosting.hpp"
#include "nrc/classifier.hpp"
#include "nrc/encoding.hpp"
#include "nrc/heuristics.hpp"
#include "nrc/instance.hpp"

namespace nrc {

struct TrainingRecord {
  int employee = 0;
  int day = 0;
  int group = 0;
  Cost raw_delta = 0;  // Z_i(before) - Z_i(after)
  PseudoClass label = PseudoClass::Equal;
  std::vector<Shift> before;
  std::vector<Shift> after;

  Change change() const { return {before, after, day}; }
  bool operator==(const TrainingRecord&) const = default;
};

struct Dataset {
  static constexpr std::uint32_t kVersion = 1;

  std::string instance_name;
  int d = 0;
  int s = 0;
  Cost tau = 1;
  std::vector<std::string> groups;
  std::vector<std::uint64_t> seeds;  // one per source run
  std::vector<TrainingRecord> samples;

  std::array<std::size_t, kClassCount> class_counts(int group = -1) const;
  Dataset only_group(int group) const;

  std::string to_bytes() const;
  static Dataset from_bytes(std::string_view bytes);  // FormatError, VersionError
  void save(const std::string& path) const;
  static Dataset load(const std::string& path);
  bool operator==(const Dataset&) const = default;
};

// Fingerprint of the real-encoded pattern of a record (contract group mixed in).
std::uint64_t record_fingerprint(const TrainingRecord& record, int s);

struct HarvestOptions {
  int runs = 20;
  std::size_t target_size = 2000;
  std::uint64_t seed = 1;
  Cost tau = 0;  // 0: largest constraint weight
  bool balanced_initial = false;  // workload-balanced greedy starts instead of uniform ones
  SolverConfig solver;  // unfiltered; observer is set internally
};

struct HarvestReport {
  std::int64_t candidates = 0;  // per-employee changes seen
  std::int64_t unique = 0;
  std::array<std::int64_t, kClassCount> unique_per_class{};
  std::size_t quota = 0;  // per class and group
  std::vector<std::string> warnings;
};

// Runs unfiltered tabu search from `runs` seeded greedy initial rosters, keeps every
// distinct per-employee change and balances the classes per contract group.
Dataset collect_samples(const ProblemInstance& instance, const HarvestOptions& options, HarvestReport* report = nullptr);

struct SplitDataset {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
};

// Seeded, stratified by class (largest remainder), 70/30 by default.
SplitDataset split(const Dataset& dataset, std::uint64_t seed, double train_share = 0.7);

struct SimpleTrainOptions {
  EncodingSpec encoding;
  std::vector<int> hidden = {10};
  TrainOptions train;  // lr 0.3, 100 epochs
};

struct SimpleReport {
  double rate = 0;         // nearest pseudo-class matches on the test split
  double binary_rate = 0;  // good/bad decision matches on the test split
  std::vector<double> test_outputs;
  TrainCurve curve;
  bool overfitting = false;
  int overfitting_epoch = -1;  // first epoch of the rising-test / falling-train run
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::vector<std::string> warnings;
};

// Epoch where a run of >= `span` epochs starts with test loss rising and train loss
// falling, or -1.
int overfitting_onset(const TrainCurve& curve, int span = 10);

Classifier train_simple(const SplitDataset& split, const SimpleTrainOptions& options, SimpleReport* report = nullptr);

struct BoostedTrainOptions {
  ClassifierKind mode = ClassifierKind::AdaBoost;
  int rounds = 10;
  std::uint64_t seed = 1;
  std::vector<WeakSpec> pool = default_weak_pool();
  double beta = 0.05;
  double alpha_rate = 0.05;
};

struct BoostedReport {
  BoostReport boost;
  double train_rate = 0;
  double test_rate = 0;  // binary decisions on the test split
  std::vector<double> member_test_rates;
  double mean_stages = 0;     // cascade members evaluated per test sample
  double agreement = 1;       // cascade vs full committee on the test split
  CalibrationReport calibration;
};

BoostSamples to_boost_samples(const Dataset& dataset);

Classifier train_boosted(const SplitDataset& split, const BoostedTrainOptions& options,
                         BoostedReport* report = nullptr);

struct BankTrainOptions {
  ClassifierKind mode = ClassifierKind::Simple;
  SimpleTrainOptions simple;
  BoostedTrainOptions boosted;
  std::uint64_t split_seed = 1;
};

struct GroupReport {
  std::string group;
  SimpleReport simple;
  BoostedReport boosted;
};

// One classifier per contract group present in the dataset.
ClassifierBank train_bank(const Dataset& dataset, const BankTrainOptions& options,
                          std::vector<GroupReport>* reports = nullptr);

}  // namespace nrc
