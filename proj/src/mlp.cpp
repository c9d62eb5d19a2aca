#include "nrc/mlp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "nrc/types.hpp"

namespace nrc {

namespace {

std::atomic<std::int64_t> g_training_calls{0};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Four independent partial sums break the add latency chain.
inline double dot(const double* w, const double* x, int n) {
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  int u = 0;
  for (; u + 4 <= n; u += 4) {
    a0 += w[u] * x[u];
    a1 += w[u + 1] * x[u + 1];
    a2 += w[u + 2] * x[u + 2];
    a3 += w[u + 3] * x[u + 3];
  }
  for (; u < n; ++u) a0 += w[u] * x[u];
  return (a0 + a1) + (a2 + a3);
}

}  // namespace

Mlp::Mlp(std::vector<int> layer_sizes) : layers_(std::move(layer_sizes)) {
  if (layers_.size() < 2) throw std::invalid_argument("network needs an input and an output layer");
  for (int size : layers_)
    if (size < 1) throw std::invalid_argument("layer sizes must be positive");
  std::size_t total = 0;
  for (std::size_t l = 1; l < layers_.size(); ++l) {
    offsets_.push_back(total);
    total += static_cast<std::size_t>(layers_[l]) * (layers_[l - 1] + 1);
    activations_ += layers_[l];
  }
  params_.assign(total, 0.0);
}

void Mlp::randomize(std::uint64_t seed, double range) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-range, range);
  for (double& p : params_) p = u(rng);
}

double Mlp::forward(std::span<const double> input, std::span<double> scratch) const {
  if (static_cast<int>(input.size()) != inputs())
    throw DimensionMismatch("pattern has " + std::to_string(input.size()) + " values, network expects " +
                            std::to_string(inputs()));
  const double* in = input.data();
  double* out = scratch.data();
  for (std::size_t l = 1; l < layers_.size(); ++l) {
    const int n_in = layers_[l - 1], n_out = layers_[l];
    const double* w = params_.data() + offsets_[l - 1];
    const double* theta = w + static_cast<std::size_t>(n_out) * n_in;
    for (int v = 0; v < n_out; ++v) {
      const double* wv = w + static_cast<std::size_t>(v) * n_in;
      out[v] = sigmoid(theta[v] + dot(wv, in, n_in));
    }
    in = out;
    out += n_out;
  }
  return in[0];
}

double Mlp::forward(std::span<const double> input) const {
  thread_local std::vector<double> scratch;
  if (scratch.size() < activations_) scratch.resize(activations_);
  return forward(input, scratch);
}

double Mlp::forward_from_first(std::span<const double> pre) const {
  thread_local std::vector<double> scratch;
  if (scratch.size() < activations_) scratch.resize(activations_);
  double* out = scratch.data();
  for (int v = 0; v < layers_[1]; ++v) out[v] = sigmoid(pre[v]);
  const double* in = out;
  out += layers_[1];
  for (std::size_t l = 2; l < layers_.size(); ++l) {
    const int n_in = layers_[l - 1], n_out = layers_[l];
    const double* w = params_.data() + offsets_[l - 1];
    const double* theta = w + static_cast<std::size_t>(n_out) * n_in;
    for (int v = 0; v < n_out; ++v) out[v] = sigmoid(theta[v] + dot(w + static_cast<std::size_t>(v) * n_in, in, n_in));
    in = out;
    out += n_out;
  }
  return in[0];
}

double Mlp::loss(std::span<const double> input, double target) const {
  const double y = forward(input);
  return 0.5 * (y - target) * (y - target);
}

void Mlp::backward(std::span<const double> input, double target, std::vector<double>& act,
                   std::vector<double>& delta, std::span<double> grad) const {
  act.resize(activations_);
  delta.resize(activations_);
  forward(input, act);
  // Output layer error, then propagate toward the input.
  std::size_t layer_start = activations_ - layers_.back();
  {
    const double y = act[layer_start];
    for (int v = 0; v < layers_.back(); ++v) delta[layer_start + v] = 0.0;
    delta[layer_start] = (y - target) * y * (1.0 - y);
  }
  for (std::size_t l = layers_.size() - 1; l >= 1; --l) {
    const int n_in = layers_[l - 1], n_out = layers_[l];
    const std::size_t in_start = l >= 2 ? layer_start - n_in : 0;
    const double* in = l >= 2 ? act.data() + in_start : input.data();
    const double* w = params_.data() + offsets_[l - 1];
    double* gw = grad.data() + offsets_[l - 1];
    double* gtheta = gw + static_cast<std::size_t>(n_out) * n_in;
    for (int v = 0; v < n_out; ++v) {
      const double dv = delta[layer_start + v];
      double* row = gw + static_cast<std::size_t>(v) * n_in;
      for (int u = 0; u < n_in; ++u) row[u] = dv * in[u];
      gtheta[v] = dv;
    }
    if (l >= 2) {
      for (int u = 0; u < n_in; ++u) {
        double sum = 0.0;
        for (int v = 0; v < n_out; ++v) sum += w[static_cast<std::size_t>(v) * n_in + u] * delta[layer_start + v];
        const double y = act[in_start + u];
        delta[in_start + u] = sum * y * (1.0 - y);
      }
      layer_start = in_start;
    }
    if (l == 1) break;
  }
}

void Mlp::gradient(std::span<const double> input, double target, std::span<double> grad) const {
  if (grad.size() != params_.size()) throw DimensionMismatch("gradient buffer has the wrong size");
  std::vector<double> act, delta;
  backward(input, target, act, delta, grad);
}

double Mlp::sgd_step(std::span<const double> input, double target, double learning_rate) {
  grad_.resize(params_.size());
  backward(input, target, act_, delta_, grad_);
  const double y = act_[activations_ - layers_.back()];
  for (std::size_t p = 0; p < params_.size(); ++p) params_[p] -= learning_rate * grad_[p];
  return 0.5 * (y - target) * (y - target);
}

void LabeledSet::add(std::span<const double> values, double t) {
  if (dim == 0 && x.empty()) dim = static_cast<int>(values.size());
  if (static_cast<int>(values.size()) != dim) throw DimensionMismatch("sample length differs from the set");
  x.insert(x.end(), values.begin(), values.end());
  target.push_back(t);
}

double mean_loss(const Mlp& net, const LabeledSet& set) {
  if (set.size() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) sum += net.loss(set.row(i), set.target[i]);
  return sum / static_cast<double>(set.size());
}

TrainCurve train_mlp(Mlp& net, const LabeledSet& set, const TrainOptions& options, const LabeledSet* test,
                     std::span<const double> distribution) {
  if (set.size() == 0) throw std::invalid_argument("training set is empty");
  if (set.dim != net.inputs()) throw DimensionMismatch("training samples do not match the network input");
  if (!distribution.empty() && distribution.size() != set.size())
    throw DimensionMismatch("distribution size differs from the training set");
  ++g_training_calls;

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> cumulative;
  if (!distribution.empty()) {
    cumulative.resize(distribution.size());
    std::partial_sum(distribution.begin(), distribution.end(), cumulative.begin());
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  TrainCurve curve;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    if (cumulative.empty()) {
      std::shuffle(order.begin(), order.end(), rng);
    } else {
      const double total = cumulative.back();
      for (auto& o : order) {
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), unit(rng) * total);
        o = std::min<std::size_t>(it - cumulative.begin(), set.size() - 1);
      }
    }
    for (std::size_t i : order) net.sgd_step(set.row(i), set.target[i], options.learning_rate);
    const double train_loss = mean_loss(net, set);
    if (!std::isfinite(train_loss))
      throw std::runtime_error("training diverged at epoch " + std::to_string(epoch + 1) + " (loss " +
                               std::to_string(train_loss) + ", learning rate " + std::to_string(options.learning_rate) +
                               ")");
    curve.train_loss.push_back(train_loss);
    if (test) curve.test_loss.push_back(mean_loss(net, *test));
  }
  return curve;
}

std::int64_t training_calls() { return g_training_calls.load(); }

}  // namespace nrc
