#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nrc/boosting.hpp"
#include "nrc/encoding.hpp"
#include "nrc/heuristics.hpp"
#include "nrc/instance.hpp"
#include "nrc/mlp.hpp"

namespace nrc {

enum class ClassifierKind { Simple, AdaBoost, WaldBoost };
std::string_view to_string(ClassifierKind kind);  // "simple", "adaboost", "waldboost"
ClassifierKind parse_classifier_kind(std::string_view text);

// Either one network over one encoding, or a boosted committee (with cascade thresholds
// for WaldBoost).
struct Classifier {
  ClassifierKind kind = ClassifierKind::Simple;
  EncodingSpec spec;
  Mlp net;
  Committee committee;

  // Ranking score in [0,1]; the raw network output for a simple classifier.
  double score(const Change& change, int s) const;
  // +1 when the change is classified as improving.
  int decide(const Change& change, int s) const;
  int input_size(int d, int s) const;
  bool operator==(const Classifier&) const = default;
};

// Simple network classifier with random weights.
Classifier make_simple(const EncodingSpec& spec, int d, int s, std::vector<int> hidden, std::uint64_t seed);

// One classifier per contract group, persisted as a versioned text file.
struct ClassifierBank {
  static constexpr int kVersion = 1;

  std::string instance_name;
  int d = 0;
  int s = 0;
  Cost tau = 1;
  std::vector<std::string> groups;
  std::vector<Classifier> classifiers;

  const Classifier& for_group(std::string_view group) const;  // throws DimensionMismatch
  void check_compatible(const ProblemInstance& instance) const;

  std::string serialize() const;
  static ClassifierBank parse(std::string_view text);  // FormatError, VersionError
  void save(const std::string& path) const;
  static ClassifierBank load(const std::string& path);
  bool operator==(const ClassifierBank&) const = default;
};

// Scores single-cell changes of one row with a simple classifier. The first-layer sums of
// the unchanged parts are kept per row (and per window position), so a call only adds
// the changed cell and the after-row features. Equal to Classifier::score up to rounding.
class IncrementalNet {
 public:
  IncrementalNet(const Classifier& classifier, int d, int s);
  double score(std::span<const Shift> row_before, int day, Shift after);

 private:
  void prepare(std::span<const Shift> row);
  double cell_value(Shift c) const;

  const Classifier* c_;
  int d_, s_, width_, length_, hidden_, inputs_;
  int after_cells_;     // first input of the after half
  int after_features_;  // -1 without features
  std::vector<Shift> row_;
  bool ready_ = false;
  std::vector<double> pre_;  // [position][hidden]
  std::vector<double> sum_;
  std::vector<Shift> after_row_;
};

// Dispatches each employee to the classifier of their contract group. Keeps per-employee
// state for the incremental path, so one instance must not be shared by concurrent
// solver runs.
class BankScorer final : public CandidateScorer {
 public:
  BankScorer(std::shared_ptr<const ClassifierBank> bank, const ProblemInstance& instance);
  double score(int employee, int day, std::span<const Shift> row_before, Shift after) const override;
  void check_compatible(const ProblemInstance& instance) const override;

 private:
  std::shared_ptr<const ClassifierBank> bank_;
  std::vector<const Classifier*> by_employee_;
  mutable std::vector<std::unique_ptr<IncrementalNet>> incremental_;  // simple classifiers only
  int d_;
};

}  // namespace nrc
