#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace nrc {

// Fully connected sigmoid network: y_v = sigmoid(sum_u w_uv * y_u + theta_v) per layer.
// Parameters are stored layer by layer as a row-major [out][in] weight block followed by
// the out thresholds.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> layer_sizes);  // {inputs, hidden..., outputs}

  // Uniform weights and thresholds in [-range, range].
  void randomize(std::uint64_t seed, double range = 0.5);

  int inputs() const { return layers_.empty() ? 0 : layers_.front(); }
  const std::vector<int>& layers() const noexcept { return layers_; }
  std::size_t param_count() const noexcept { return params_.size(); }
  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }

  // First output. `scratch` needs scratch_size() values; the overload without it uses a
  // thread-local buffer.
  double forward(std::span<const double> input, std::span<double> scratch) const;
  double forward(std::span<const double> input) const;
  std::size_t scratch_size() const noexcept { return activations_; }
  // Output for given first-layer pre-activations (weighted sums plus thresholds).
  double forward_from_first(std::span<const double> pre) const;

  double loss(std::span<const double> input, double target) const;  // 0.5 (y - t)^2
  // d loss / d params, same layout as params().
  void gradient(std::span<const double> input, double target, std::span<double> grad) const;
  // One stochastic gradient step; returns the loss before the step.
  double sgd_step(std::span<const double> input, double target, double learning_rate);

  bool operator==(const Mlp& o) const { return layers_ == o.layers_ && params_ == o.params_; }

 private:
  void backward(std::span<const double> input, double target, std::vector<double>& act, std::vector<double>& delta,
                std::span<double> grad) const;

  std::vector<int> layers_;
  std::vector<double> params_;
  std::vector<std::size_t> offsets_;  // start of each layer's block in params_
  std::size_t activations_ = 0;       // total neurons after the input layer
  std::vector<double> act_, delta_, grad_;
};

// Row-major design matrix with scalar targets.
struct LabeledSet {
  int dim = 0;
  std::vector<double> x;
  std::vector<double> target;

  std::size_t size() const noexcept { return target.size(); }
  std::span<const double> row(std::size_t i) const { return {x.data() + i * dim, static_cast<std::size_t>(dim)}; }
  void add(std::span<const double> values, double t);
};

struct TrainOptions {
  double learning_rate = 0.3;
  int epochs = 100;
  std::uint64_t seed = 1;
};

struct TrainCurve {
  std::vector<double> train_loss;  // mean loss on the training set after each epoch
  std::vector<double> test_loss;   // same on the held-out set when given
};

// Stochastic back-propagation over the samples in a seeded order per epoch. With a
// distribution, every epoch draws |set| samples with replacement according to it.
// Throws std::invalid_argument on an empty set and std::runtime_error if the loss
// becomes NaN.
TrainCurve train_mlp(Mlp& net, const LabeledSet& set, const TrainOptions& options, const LabeledSet* test = nullptr,
                     std::span<const double> distribution = {});

// Number of train_mlp calls in this process.
std::int64_t training_calls();

double mean_loss(const Mlp& net, const LabeledSet& set);

}  // namespace nrc
