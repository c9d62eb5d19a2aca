#include "nrc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

namespace nrc {

namespace {

constexpr char kMagic[4] = {'N', 'R', 'C', 'D'};

class ByteWriter {
 public:
  template <class T>
  void put(T v) {
    for (std::size_t b = 0; b < sizeof(T); ++b) out_.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * b)) & 0xff));
  }
  void str(std::string_view s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view in) : in_(in) {}
  template <class T>
  T get() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + b])) << (8 * b);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  std::string str() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void raw(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw FormatError("dataset file is truncated");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

LabeledSet labeled(const Dataset& ds, const EncodingSpec& spec) {
  LabeledSet set;
  set.dim = spec.size(ds.d, ds.s);
  std::vector<double> buf(set.dim);
  for (const auto& r : ds.samples) {
    encode(spec, ds.s, r.before, r.after, r.day, buf);
    set.add(buf, target_of(r.label));
  }
  return set;
}

}  // namespace

std::array<std::size_t, kClassCount> Dataset::class_counts(int group) const {
  std::array<std::size_t, kClassCount> counts{};
  for (const auto& r : samples)
    if (group < 0 || r.group == group) ++counts[static_cast<int>(r.label)];
  return counts;
}

Dataset Dataset::only_group(int group) const {
  Dataset out = *this;
  out.samples.clear();
  for (const auto& r : samples)
    if (r.group == group) out.samples.push_back(r);
  return out;
}

std::string Dataset::to_bytes() const {
  ByteWriter w;
  w.raw(kMagic, 4);
  w.put<std::uint32_t>(kVersion);
  w.str(instance_name);
  w.put<std::int32_t>(d);
  w.put<std::int32_t>(s);
  w.put<std::int64_t>(tau);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(groups.size()));
  for (const auto& g : groups) w.str(g);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(seeds.size()));
  for (auto seed : seeds) w.put<std::uint64_t>(seed);
  w.put<std::uint64_t>(samples.size());
  for (const auto& r : samples) {
    w.put<std::int32_t>(r.employee);
    w.put<std::int32_t>(r.day);
    w.put<std::int32_t>(r.group);
    w.put<std::int64_t>(r.raw_delta);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(r.label));
    w.raw(r.before.data(), r.before.size());
    w.raw(r.after.data(), r.after.size());
  }
  return w.take();
}

Dataset Dataset::from_bytes(std::string_view bytes) {
  ByteReader r(bytes);
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("not a dataset file");
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion)
    throw VersionError("dataset version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kVersion) + ")");
  Dataset ds;
  ds.instance_name = r.str();
  ds.d = r.get<std::int32_t>();
  ds.s = r.get<std::int32_t>();
  ds.tau = r.get<std::int64_t>();
  if (ds.d < 1 || ds.s < 1) throw FormatError("bad dataset dimensions");
  ds.groups.resize(r.get<std::uint32_t>());
  for (auto& g : ds.groups) g = r.str();
  ds.seeds.resize(r.get<std::uint32_t>());
  for (auto& seed : ds.seeds) seed = r.get<std::uint64_t>();
  const auto count = r.get<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    TrainingRecord rec;
    rec.employee = r.get<std::int32_t>();
    rec.day = r.get<std::int32_t>();
    rec.group = r.get<std::int32_t>();
    rec.raw_delta = r.get<std::int64_t>();
    const auto label = r.get<std::uint8_t>();
    if (label >= kClassCount) throw FormatError("bad label in dataset");
    rec.label = static_cast<PseudoClass>(label);
    rec.before.resize(ds.d);
    rec.after.resize(ds.d);
    r.raw(rec.before.data(), ds.d);
    r.raw(rec.after.data(), ds.d);
    ds.samples.push_back(std::move(rec));
  }
  if (!r.done()) throw FormatError("trailing bytes after dataset records");
  return ds;
}

void Dataset::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  const auto bytes = to_bytes();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path);
}

Dataset Dataset::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_bytes(buf.str());
}

std::uint64_t record_fingerprint(const TrainingRecord& record, int s) {
  thread_local std::vector<double> buf;
  const EncodingSpec spec;
  buf.resize(spec.size(static_cast<int>(record.before.size()), s));
  encode(spec, s, record.before, record.after, record.day, buf);
  return fingerprint(buf, 0xcbf29ce484222325ULL ^ (static_cast<std::uint64_t>(record.group) * 0x9E3779B97F4A7C15ULL));
}

Dataset collect_samples(const ProblemInstance& instance, const HarvestOptions& options, HarvestReport* report) {
  if (options.runs < 1) throw std::invalid_argument("harvest needs at least one run");
  HarvestReport local;
  HarvestReport& rep = report ? *report : local;
  rep = {};

  Dataset ds;
  ds.instance_name = instance.name;
  ds.d = instance.d;
  ds.s = instance.s;
  ds.tau = options.tau > 0 ? options.tau : default_tau(instance);
  ds.groups = instance.groups();
  const int groups = static_cast<int>(ds.groups.size());
  std::vector<int> group_of(instance.n);
  for (int i = 0; i < instance.n; ++i)
    group_of[i] = static_cast<int>(std::find(ds.groups.begin(), ds.groups.end(), instance.employees[i].group) -
                                   ds.groups.begin());

  const std::size_t per_group = (options.target_size + groups - 1) / groups;
  const std::size_t capacity = (per_group + kClassCount - 1) / kClassCount;
  std::vector<std::vector<TrainingRecord>> reservoir(static_cast<std::size_t>(groups) * kClassCount);
  std::vector<std::int64_t> seen(reservoir.size(), 0);
  std::unordered_set<std::uint64_t> fingerprints;
  std::mt19937_64 rng(options.seed ^ 0x5DEECE66DULL);

  TrainingRecord rec;
  rec.before.resize(instance.d);
  rec.after.resize(instance.d);
  const auto observe = [&](const Roster& roster, const CandidateMove& move, const DeltaResult& delta) {
    CellChange changes[2];
    const int count = cell_changes(roster, move, changes);
    for (int k = 0; k < count; ++k) {
      const auto& ch = changes[k];
      const auto row = roster.row(ch.employee);
      std::copy(row.begin(), row.end(), rec.before.begin());
      std::copy(row.begin(), row.end(), rec.after.begin());
      rec.after[ch.day] = ch.after;
      rec.employee = ch.employee;
      rec.day = ch.day;
      rec.group = group_of[ch.employee];
      const EmployeeDelta& e = delta.employees[delta.employees[0].employee == ch.employee ? 0 : 1];
      rec.raw_delta = e.before - e.after;
      rec.label = label_sample(rec.raw_delta, ds.tau);
      ++rep.candidates;
      if (!fingerprints.insert(record_fingerprint(rec, instance.s)).second) continue;
      ++rep.unique;
      ++rep.unique_per_class[static_cast<int>(rec.label)];
      const std::size_t slot = static_cast<std::size_t>(rec.group) * kClassCount + static_cast<int>(rec.label);
      auto& bucket = reservoir[slot];
      const std::int64_t n_seen = ++seen[slot];
      if (bucket.size() < capacity) {
        bucket.push_back(rec);
      } else {
        std::uniform_int_distribution<std::int64_t> pick(0, n_seen - 1);
        const auto j = pick(rng);
        if (j < static_cast<std::int64_t>(capacity)) bucket[j] = rec;
      }
    }
  };

  for (int run = 0; run < options.runs; ++run) {
    const std::uint64_t seed = options.seed * 1000 + static_cast<std::uint64_t>(run);
    ds.seeds.push_back(seed);
    SolverConfig cfg = options.solver;
    cfg.filter = nullptr;
    cfg.seed = seed;
    cfg.observer = observe;
    const Roster initial = greedy_initial(instance, seed, 200, options.balanced_initial);
    tabu_search(instance, initial, cfg);
  }

  for (int g = 0; g < groups; ++g) {
    std::size_t quota = capacity;
    bool missing = false;
    for (int c = 0; c < kClassCount; ++c) {
      const auto size = reservoir[static_cast<std::size_t>(g) * kClassCount + c].size();
      if (size == 0) {
        missing = true;
        continue;
      }
      quota = std::min(quota, size);
    }
    if (missing)
      rep.warnings.push_back("group " + ds.groups[g] + ": some pseudo-classes never occurred; they are left empty");
    if (quota < capacity)
      rep.warnings.push_back("group " + ds.groups[g] + ": only " + std::to_string(quota) +
                             " distinct samples per class available (wanted " + std::to_string(capacity) + ")");
    if (g == 0 || quota < rep.quota) rep.quota = quota;
    for (int c = 0; c < kClassCount; ++c) {
      auto& bucket = reservoir[static_cast<std::size_t>(g) * kClassCount + c];
      const std::size_t take = std::min(quota, bucket.size());
      for (std::size_t i = 0; i < take; ++i) ds.samples.push_back(std::move(bucket[i]));
    }
  }
  return ds;
}

SplitDataset split(const Dataset& dataset, std::uint64_t seed, double train_share) {
  if (dataset.samples.empty()) throw std::invalid_argument("cannot split an empty dataset");
  SplitDataset out;
  out.seed = seed;
  out.train = dataset;
  out.test = dataset;
  out.train.samples.clear();
  out.test.samples.clear();

  std::vector<std::vector<std::size_t>> by_class(kClassCount);
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) by_class[static_cast<int>(dataset.samples[i].label)].push_back(i);

  // Largest remainder: the class quotas sum to round(share * N).
  const std::size_t total = dataset.samples.size();
  const auto want = static_cast<std::size_t>(std::llround(train_share * static_cast<double>(total)));
  std::vector<std::size_t> quota(kClassCount);
  std::vector<std::pair<double, int>> remainder;
  std::size_t assigned = 0;
  for (int c = 0; c < kClassCount; ++c) {
    const double exact = train_share * static_cast<double>(by_class[c].size());
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[c];
    remainder.emplace_back(-(exact - std::floor(exact)), c);
  }
  std::sort(remainder.begin(), remainder.end());
  for (std::size_t k = 0; assigned < want && k < remainder.size(); ++k) {
    const int c = remainder[k].second;
    if (quota[c] < by_class[c].size()) {
      ++quota[c];
      ++assigned;
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> train_idx, test_idx;
  for (int c = 0; c < kClassCount; ++c) {
    auto& idx = by_class[c];
    std::shuffle(idx.begin(), idx.end(), rng);
    train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + quota[c]);
    test_idx.insert(test_idx.end(), idx.begin() + quota[c], idx.end());
  }
  std::shuffle(train_idx.begin(), train_idx.end(), rng);
  std::shuffle(test_idx.begin(), test_idx.end(), rng);
  for (auto i : train_idx) out.train.samples.push_back(dataset.samples[i]);
  for (auto i : test_idx) out.test.samples.push_back(dataset.samples[i]);
  return out;
}

int overfitting_onset(const TrainCurve& curve, int span) {
  const std::size_t n = std::min(curve.train_loss.size(), curve.test_loss.size());
  int run = 0;
  for (std::size_t e = 1; e < n; ++e) {
    const bool diverging = curve.test_loss[e] > curve.test_loss[e - 1] && curve.train_loss[e] < curve.train_loss[e - 1];
    run = diverging ? run + 1 : 0;
    if (run >= span) return static_cast<int>(e) - span + 1;
  }
  return -1;
}

Classifier train_simple(const SplitDataset& sp, const SimpleTrainOptions& options, SimpleReport* report) {
  if (sp.train.samples.empty()) throw std::invalid_argument("training split is empty");
  Classifier c = make_simple(options.encoding, sp.train.d, sp.train.s, options.hidden, options.train.seed);
  const LabeledSet train = labeled(sp.train, options.encoding);
  const LabeledSet test = labeled(sp.test, options.encoding);
  const TrainCurve curve = train_mlp(c.net, train, options.train, test.size() ? &test : nullptr);
  if (report) {
    *report = {};
    report->curve = curve;
    report->train_size = train.size();
    report->test_size = test.size();
    std::size_t hits = 0, binary_hits = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      const double y = c.net.forward(test.row(i));
      report->test_outputs.push_back(y);
      const PseudoClass label = sp.test.samples[i].label;
      hits += nearest_class(y) == label;
      binary_hits += (y > 0.5 ? 1 : -1) == binary_label(label);
    }
    if (test.size()) {
      report->rate = static_cast<double>(hits) / test.size();
      report->binary_rate = static_cast<double>(binary_hits) / test.size();
    }
    report->overfitting_epoch = overfitting_onset(curve);
    report->overfitting = report->overfitting_epoch >= 0;
    const auto counts = sp.train.class_counts();
    if (std::count_if(counts.begin(), counts.end(), [](std::size_t k) { return k > 0; }) < 2)
      report->warnings.push_back("training data holds a single pseudo-class; the rate is trivial");
    if (report->overfitting)
      report->warnings.push_back("overfitting: test loss rises while train loss falls from epoch " +
                                 std::to_string(report->overfitting_epoch + 1));
  }
  return c;
}

BoostSamples to_boost_samples(const Dataset& ds) {
  BoostSamples out;
  out.d = ds.d;
  out.s = ds.s;
  for (const auto& r : ds.samples) out.add(r.before, r.after, r.day, binary_label(r.label));
  return out;
}

Classifier train_boosted(const SplitDataset& sp, const BoostedTrainOptions& options, BoostedReport* report) {
  if (options.mode == ClassifierKind::Simple) throw std::invalid_argument("train_boosted needs adaboost or waldboost");
  const BoostSamples train = to_boost_samples(sp.train);
  const BoostSamples test = to_boost_samples(sp.test);
  BoostedReport local;
  BoostedReport& rep = report ? *report : local;
  rep = {};
  BoostOptions bo;
  bo.rounds = options.rounds;
  bo.seed = options.seed;
  Classifier c;
  c.kind = options.mode;
  c.committee = adaboost_train(train, options.pool, bo, &rep.boost);
  if (options.mode == ClassifierKind::WaldBoost)
    rep.calibration = waldboost_calibrate(c.committee, train, options.beta, options.alpha_rate);

  const auto rate = [&](const BoostSamples& set) {
    if (set.size() == 0) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < set.size(); ++i) hits += c.decide(set.change(i), set.s) == set.label[i];
    return static_cast<double>(hits) / set.size();
  };
  rep.train_rate = rate(train);
  rep.test_rate = rate(test);
  for (const auto& m : c.committee.members) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < test.size(); ++i) hits += m.decide(test.change(i), test.s) == test.label[i];
    rep.member_test_rates.push_back(test.size() ? static_cast<double>(hits) / test.size() : 0.0);
  }
  if (test.size()) {
    std::size_t stages = 0, agree = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      const auto cas = cascade_classify(c.committee, test.change(i));
      stages += cas.stages_used;
      agree += cas.decision == committee_classify(c.committee, test.change(i)).decision;
    }
    rep.mean_stages = static_cast<double>(stages) / test.size();
    rep.agreement = static_cast<double>(agree) / test.size();
  }
  return c;
}

ClassifierBank train_bank(const Dataset& dataset, const BankTrainOptions& options, std::vector<GroupReport>* reports) {
  ClassifierBank bank;
  bank.instance_name = dataset.instance_name;
  bank.d = dataset.d;
  bank.s = dataset.s;
  bank.tau = dataset.tau;
  if (reports) reports->clear();
  for (int g = 0; g < static_cast<int>(dataset.groups.size()); ++g) {
    const Dataset part = dataset.only_group(g);
    if (part.samples.empty()) throw std::invalid_argument("no samples for contract group " + dataset.groups[g]);
    const SplitDataset sp = split(part, options.split_seed);
    GroupReport gr;
    gr.group = dataset.groups[g];
    Classifier c = options.mode == ClassifierKind::Simple ? train_simple(sp, options.simple, &gr.simple)
                                                          : [&] {
                                                              BoostedTrainOptions bo = options.boosted;
                                                              bo.mode = options.mode;
                                                              return train_boosted(sp, bo, &gr.boosted);
                                                            }();
    bank.groups.push_back(dataset.groups[g]);
    bank.classifiers.push_back(std::move(c));
    if (reports) reports->push_back(std::move(gr));
  }
  return bank;
}

}  // namespace nrc
