#include "nrc/boosting.hpp"

#include <algorithm>
#include <stdexcept>

namespace nrc {

std::vector<WeakSpec> default_weak_pool() {
  const auto spec = [](ShiftEncoding e, int window, bool features) {
    EncodingSpec s;
    s.shifts = e;
    s.window = window;
    s.features = features;
    return s;
  };
  std::vector<WeakSpec> pool;
  for (bool features : {false, true})
    for (int window : {0, 5})
      for (ShiftEncoding e : {ShiftEncoding::Real, ShiftEncoding::Binary}) {
        WeakSpec w;
        w.encoding = spec(e, window, features);
        w.name = w.encoding.tag();
        pool.push_back(w);
      }
  for (const auto& extra : {spec(ShiftEncoding::Real, 3, true), spec(ShiftEncoding::BinaryLiteral, 5, true)}) {
    WeakSpec w;
    w.encoding = extra;
    w.name = extra.tag();
    pool.push_back(w);
  }
  return pool;
}

double WeakClassifier::output(const Change& change, int s) const {
  thread_local std::vector<double> buffer;
  buffer.resize(spec.size(static_cast<int>(change.before.size()), s));
  encode(spec, s, change.before, change.after, change.day, buffer);
  return net.forward(buffer);
}

double Committee::alpha_mass() const {
  double m = 0;
  for (double a : alpha) m += std::abs(a);
  return m;
}

CommitteeOutput committee_classify(const Committee& c, const Change& change) {
  CommitteeOutput out;
  for (std::size_t t = 0; t < c.members.size(); ++t) out.raw += c.alpha[t] * c.members[t].decide(change, c.s);
  out.decision = out.raw > 0 ? 1 : -1;
  const double mass = c.alpha_mass();
  out.score = mass > 0 ? (out.raw / mass + 1.0) / 2.0 : 0.5;
  return out;
}

CascadeOutput cascade_classify(const Committee& c, const Change& change) {
  CascadeOutput out;
  double mass = 0;
  const std::size_t T = c.members.size();
  for (std::size_t t = 0; t < T; ++t) {
    out.partial += c.alpha[t] * c.members[t].decide(change, c.s);
    mass += std::abs(c.alpha[t]);
    out.stages_used = static_cast<int>(t + 1);
    if (t < c.stages.size() && t + 1 < T) {
      if (out.partial >= c.stages[t].accept) {
        out.decision = 1;
        break;
      }
      if (out.partial <= c.stages[t].reject) {
        out.decision = -1;
        break;
      }
    }
    if (t + 1 == T) out.decision = out.partial > 0 ? 1 : -1;
  }
  out.score = mass > 0 ? (out.partial / mass + 1.0) / 2.0 : 0.5;
  return out;
}

void BoostSamples::add(std::span<const Shift> b, std::span<const Shift> a, int changed_day, int y) {
  if (static_cast<int>(b.size()) != d || static_cast<int>(a.size()) != d)
    throw DimensionMismatch("sample rows do not match the dataset length");
  before.insert(before.end(), b.begin(), b.end());
  after.insert(after.end(), a.begin(), a.end());
  day.push_back(changed_day);
  label.push_back(y);
}

Committee adaboost_train(const BoostSamples& samples, std::span<const WeakSpec> pool, const BoostOptions& options,
                         BoostReport* report) {
  if (samples.size() == 0) throw std::invalid_argument("boosting needs a non-empty dataset");
  if (pool.empty()) throw std::invalid_argument("boosting needs at least one weak learner spec");
  const bool has_pos = std::count(samples.label.begin(), samples.label.end(), 1) > 0;
  const bool has_neg = std::count(samples.label.begin(), samples.label.end(), -1) > 0;
  if (!has_pos || !has_neg) throw std::invalid_argument("boosting needs both labels in the dataset");

  // Encode every sample once per spec.
  std::vector<LabeledSet> encoded(pool.size());
  for (std::size_t m = 0; m < pool.size(); ++m) {
    auto& set = encoded[m];
    set.dim = pool[m].encoding.size(samples.d, samples.s);
    std::vector<double> buf(set.dim);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Change c = samples.change(i);
      encode(pool[m].encoding, samples.s, c.before, c.after, c.day, buf);
      set.add(buf, samples.label[i] > 0 ? 1.0 : 0.0);
    }
  }

  const auto fit_pool = [&](std::span<const double> D, int round) {
    std::vector<WeakFit<WeakClassifier>> fits;
    for (std::size_t m = 0; m < pool.size(); ++m) {
      std::vector<int> layers = {encoded[m].dim};
      layers.insert(layers.end(), pool[m].hidden.begin(), pool[m].hidden.end());
      layers.push_back(1);
      WeakFit<WeakClassifier> fit;
      fit.model.spec = pool[m].encoding;
      fit.model.net = Mlp(layers);
      const std::uint64_t seed = options.seed * 1000003ULL + static_cast<std::uint64_t>(round) * 101ULL + m;
      fit.model.net.randomize(seed);
      TrainOptions opt;
      opt.learning_rate = pool[m].learning_rate;
      opt.epochs = pool[m].epochs;
      opt.seed = seed;
      train_mlp(fit.model.net, encoded[m], opt, nullptr, D);
      fit.h.resize(samples.size());
      for (std::size_t i = 0; i < samples.size(); ++i)
        fit.h[i] = fit.model.net.forward(encoded[m].row(i)) > 0.5 ? 1 : -1;
      fits.push_back(std::move(fit));
    }
    return fits;
  };

  auto result = adaboost<WeakClassifier>(samples.label, options.rounds, fit_pool);
  if (result.models.empty()) throw std::runtime_error("every boosting round was degenerate (r = 0)");
  Committee c;
  c.d = samples.d;
  c.s = samples.s;
  c.members = std::move(result.models);
  c.alpha = std::move(result.alphas);
  if (report) {
    report->rounds = result.rounds;
    for (const auto& r : result.rounds)
      if (!r.skipped) report->chosen.push_back(pool[r.chosen].name);
  }
  return c;
}

namespace {

// Loosest threshold over `order` (sorted by partial score, best-exiting first) such that the
// exiting prefix has error rate <= rate. Cuts are placed only between distinct scores.
// Returns the number of exiting samples and the threshold score.
std::pair<std::size_t, double> loosest_cut(const std::vector<std::pair<double, int>>& order, double rate) {
  std::size_t best_count = 0;
  double best_score = 0;
  std::size_t errors = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    errors += order[k].second;
    const bool boundary = k + 1 == order.size() || order[k + 1].first != order[k].first;
    if (!boundary) continue;
    const std::size_t count = k + 1;
    if (static_cast<double>(errors) <= rate * static_cast<double>(count)) {
      best_count = count;
      best_score = order[k].first;
    }
  }
  return {best_count, best_score};
}

}  // namespace

CalibrationReport waldboost_calibrate(Committee& c, const BoostSamples& samples, double beta, double alpha_rate) {
  const std::size_t T = c.members.size();
  const std::size_t n = samples.size();
  std::vector<std::vector<int>> h(T, std::vector<int>(n));
  std::vector<int> reference(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Change ch = samples.change(i);
    double raw = 0;
    for (std::size_t t = 0; t < T; ++t) {
      h[t][i] = c.members[t].decide(ch, c.s);
      raw += c.alpha[t] * h[t][i];
    }
    reference[i] = raw > 0 ? 1 : -1;
  }

  CalibrationReport report;
  c.stages.assign(T > 0 ? T - 1 : 0, CascadeStage{});
  std::vector<double> partial(n, 0.0);
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), 0);
  for (std::size_t t = 0; t + 1 < T && !active.empty(); ++t) {
    for (std::size_t i : active) partial[i] += c.alpha[t] * h[t][i];
    std::vector<std::pair<double, int>> acc, rej;
    for (std::size_t i : active) {
      acc.emplace_back(-partial[i], reference[i] != 1);
      rej.emplace_back(partial[i], reference[i] != -1);
    }
    std::sort(acc.begin(), acc.end());
    std::sort(rej.begin(), rej.end());
    const auto [n_acc, neg_accept] = loosest_cut(acc, alpha_rate);
    const auto [n_rej, reject] = loosest_cut(rej, beta);
    CascadeStage stage;
    if (n_acc > 0) stage.accept = -neg_accept;
    if (n_rej > 0) stage.reject = reject;
    if (stage.reject >= stage.accept) stage = CascadeStage{};
    c.stages[t] = stage;
    std::vector<std::size_t> keep;
    for (std::size_t i : active) {
      if (partial[i] >= stage.accept || partial[i] <= stage.reject) {
        ++report.exits;
        continue;
      }
      keep.push_back(i);
    }
    active.swap(keep);
  }
  report.degenerate = report.exits == 0;
  return report;
}

}  // namespace nrc
