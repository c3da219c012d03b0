#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "casp/sample.hpp"

namespace casp {

/// Parameters of a one-hidden-layer ReLU classifier:
///   logits = W2 * relu(W1 * x + b1) + b2
/// Matrices are row-major: w1 is hidden x input, w2 is classes x hidden.
struct ModelParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t num_classes = 0;
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  std::vector<double> b2;

  static ModelParams zeros(std::size_t input_dim, std::size_t hidden_dim,
                           std::size_t num_classes);

  /// Glorot-uniform weights in [-a, a], a = sqrt(6 / (fan_in + fan_out));
  /// zero biases.
  static ModelParams glorot(std::size_t input_dim, std::size_t hidden_dim,
                            std::size_t num_classes, std::uint64_t seed);

  std::size_t parameter_count() const noexcept {
    return w1.size() + b1.size() + w2.size() + b2.size();
  }

  /// Throws InputError when shapes disagree, class count < 2 or an entry is
  /// not finite.
  void validate() const;

  /// Flat views in the order w1, b1, w2, b2.
  std::vector<double> flatten() const;
  void assign_flat(std::span<const double> flat);

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct SgdConfig {
  double learning_rate = 0.1;
  double momentum = 0.0;
  double weight_decay = 0.0;
  int epochs = 1;
  /// Cosine annealing of the learning rate across `epochs` (per epoch).
  bool cosine_annealing = false;

  void validate() const;
};

std::vector<double> forward_logits(const ModelParams& params,
                                   std::span<const double> features);

/// Max-subtracted softmax. Throws InputError on non-finite logits.
std::vector<double> softmax(std::span<const double> logits);

/// Softmax probability the model assigns to the sample's own label.
double target_confidence(const ModelParams& params, const Sample& sample);

/// Index of the largest logit; ties go to the lowest class index.
std::size_t predict(const ModelParams& params, std::span<const double> features);

/// Mean softmax cross-entropy over `batch` and its gradient with respect to
/// every parameter (same layout as the parameters themselves).
double loss_and_gradient(const ModelParams& params,
                         std::span<const Sample* const> batch,
                         ModelParams& gradient);

double mean_loss(const ModelParams& params, std::span<const Sample* const> batch);

/// SGD with heavy-ball momentum and L2 weight decay (decay folded into the
/// gradient before the momentum update).
class SgdOptimizer {
 public:
  SgdOptimizer(const ModelParams& shape, double learning_rate, double momentum,
               double weight_decay);

  void set_learning_rate(double lr) noexcept { learning_rate_ = lr; }
  double learning_rate() const noexcept { return learning_rate_; }

  /// Computes the batch gradient and applies one update. Returns the loss
  /// before the update.
  double step(ModelParams& params, std::span<const Sample* const> batch);

 private:
  double learning_rate_;
  double momentum_;
  double weight_decay_;
  ModelParams velocity_;
  ModelParams gradient_;
};

/// Multi-epoch minibatch trainer over a fixed dataset. Epoch order is
/// reshuffled from `seed` each epoch; momentum state persists across epochs.
class Trainer {
 public:
  Trainer(ModelParams params, const SgdConfig& cfg, std::size_t batch_size,
          std::uint64_t seed);

  /// One shuffled pass over `data`. Returns the mean minibatch loss.
  double run_epoch(std::span<const Sample> data);

  const ModelParams& params() const noexcept { return params_; }
  ModelParams& params() noexcept { return params_; }
  int epochs_done() const noexcept { return epoch_; }

 private:
  ModelParams params_;
  SgdConfig cfg_;
  std::size_t batch_size_;
  std::uint64_t seed_;
  SgdOptimizer optimizer_;
  int epoch_ = 0;
};

/// One full shuffled pass of minibatch SGD starting from zero momentum.
ModelParams train_epoch(const ModelParams& params, std::span<const Sample> data,
                        const SgdConfig& cfg, std::size_t batch_size,
                        std::uint64_t seed);

/// Fraction of samples whose predicted class equals the label.
double evaluate_accuracy(const ModelParams& params, std::span<const Sample> data);

}  // namespace casp
