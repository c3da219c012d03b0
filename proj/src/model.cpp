#include "casp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "casp/common.hpp"
#include "casp/kernels.hpp"

namespace casp {

namespace {

void check_features(const ModelParams& p, std::span<const double> x) {
  if (x.size() != p.input_dim) {
    throw InputError("feature length " + std::to_string(x.size()) +
                     " does not match input dimension " + std::to_string(p.input_dim));
  }
}

// Writes pre-activations and logits for one input.
void forward_into(const ModelParams& p, std::span<const double> x,
                  std::span<double> pre, std::span<double> logits) {
  const std::size_t in = p.input_dim;
  const std::size_t hid = p.hidden_dim;
  for (std::size_t h = 0; h < hid; ++h) {
    const double* row = p.w1.data() + h * in;
    double acc = p.b1[h];
    for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
    pre[h] = acc;
  }
  for (std::size_t c = 0; c < p.num_classes; ++c) {
    const double* row = p.w2.data() + c * hid;
    double acc = p.b2[c];
    for (std::size_t h = 0; h < hid; ++h) acc += row[h] * std::max(pre[h], 0.0);
    logits[c] = acc;
  }
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

template <typename F>
void for_each_block(ModelParams& a, const ModelParams& b, F&& f) {
  f(a.w1, b.w1);
  f(a.b1, b.b1);
  f(a.w2, b.w2);
  f(a.b2, b.b2);
}

}  // namespace

ModelParams ModelParams::zeros(std::size_t input_dim, std::size_t hidden_dim,
                               std::size_t num_classes) {
  ModelParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.num_classes = num_classes;
  p.w1.assign(hidden_dim * input_dim, 0.0);
  p.b1.assign(hidden_dim, 0.0);
  p.w2.assign(num_classes * hidden_dim, 0.0);
  p.b2.assign(num_classes, 0.0);
  return p;
}

ModelParams ModelParams::glorot(std::size_t input_dim, std::size_t hidden_dim,
                                std::size_t num_classes, std::uint64_t seed) {
  ModelParams p = zeros(input_dim, hidden_dim, num_classes);
  p.validate();
  Rng rng(seed);
  auto fill = [&rng](std::vector<double>& w, std::size_t fan_in, std::size_t fan_out) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-a, a);
    for (double& v : w) v = dist(rng);
  };
  fill(p.w1, input_dim, hidden_dim);
  fill(p.w2, hidden_dim, num_classes);
  return p;
}

void ModelParams::validate() const {
  if (input_dim == 0 || hidden_dim == 0) throw InputError("model dimensions must be positive");
  if (num_classes < 2) throw InputError("model needs at least 2 classes");
  if (w1.size() != hidden_dim * input_dim || b1.size() != hidden_dim ||
      w2.size() != num_classes * hidden_dim || b2.size() != num_classes) {
    throw InputError("model parameter shapes are inconsistent");
  }
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(w1) || !finite(b1) || !finite(w2) || !finite(b2)) {
    throw InputError("model parameters contain non-finite entries");
  }
}

std::vector<double> ModelParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto* block : {&w1, &b1, &w2, &b2}) {
    flat.insert(flat.end(), block->begin(), block->end());
  }
  return flat;
}

void ModelParams::assign_flat(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw InputError("flat parameter length mismatch");
  auto it = flat.begin();
  for (auto* block : {&w1, &b1, &w2, &b2}) {
    std::copy_n(it, block->size(), block->begin());
    it += static_cast<std::ptrdiff_t>(block->size());
  }
}

void SgdConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InputError("learning rate must be a finite nonnegative number");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InputError("momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) throw InputError("weight decay must be nonnegative");
  if (epochs < 1) throw InputError("epochs must be at least 1");
}

std::vector<double> forward_logits(const ModelParams& params,
                                   std::span<const double> features) {
  check_features(params, features);
  std::vector<double> pre(params.hidden_dim);
  std::vector<double> logits(params.num_classes);
  forward_into(params, features, pre, logits);
  return logits;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw InputError("softmax of an empty vector");
  if (!std::all_of(logits.begin(), logits.end(), [](double x) { return std::isfinite(x); })) {
    throw InputError("softmax input is not finite");
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double target_confidence(const ModelParams& params, const Sample& sample) {
  if (sample.label < 0 || static_cast<std::size_t>(sample.label) >= params.num_classes) {
    throw InputError("label " + std::to_string(sample.label) + " out of range");
  }
  return softmax(forward_logits(params, sample.features))[static_cast<std::size_t>(sample.label)];
}

std::size_t predict(const ModelParams& params, std::span<const double> features) {
  const auto logits = forward_logits(params, features);
  // max_element returns the first maximum, i.e. the lowest index on ties.
  return static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

double loss_and_gradient(const ModelParams& params, std::span<const Sample* const> batch,
                         ModelParams& gradient) {
  if (batch.empty()) throw InputError("empty batch");
  if (gradient.w1.size() != params.w1.size() || gradient.w2.size() != params.w2.size()) {
    gradient = ModelParams::zeros(params.input_dim, params.hidden_dim, params.num_classes);
  } else {
    for (auto* block : {&gradient.w1, &gradient.b1, &gradient.w2, &gradient.b2}) {
      std::fill(block->begin(), block->end(), 0.0);
    }
  }

  const std::size_t in = params.input_dim;
  const std::size_t hid = params.hidden_dim;
  const std::size_t k = params.num_classes;
  const double scale = 1.0 / static_cast<double>(batch.size());

  std::vector<double> pre(hid), logits(k), dlogits(k), dpre(hid);
  double loss = 0.0;
  for (const Sample* s : batch) {
    check_features(params, s->features);
    if (s->label < 0 || static_cast<std::size_t>(s->label) >= k) {
      throw InputError("label " + std::to_string(s->label) + " out of range");
    }
    const auto y = static_cast<std::size_t>(s->label);
    forward_into(params, s->features, pre, logits);

    const double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (std::size_t c = 0; c < k; ++c) z += std::exp(logits[c] - mx);
    loss += (mx + std::log(z)) - logits[y];

    for (std::size_t c = 0; c < k; ++c) dlogits[c] = std::exp(logits[c] - mx) / z * scale;
    dlogits[y] -= scale;

    std::fill(dpre.begin(), dpre.end(), 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      const double g = dlogits[c];
      gradient.b2[c] += g;
      double* grow = gradient.w2.data() + c * hid;
      const double* wrow = params.w2.data() + c * hid;
      for (std::size_t h = 0; h < hid; ++h) {
        grow[h] += g * std::max(pre[h], 0.0);
        dpre[h] += g * wrow[h];
      }
    }
    for (std::size_t h = 0; h < hid; ++h) {
      if (pre[h] <= 0.0) continue;
      const double g = dpre[h];
      gradient.b1[h] += g;
      double* grow = gradient.w1.data() + h * in;
      for (std::size_t i = 0; i < in; ++i) grow[i] += g * s->features[i];
    }
  }
  return loss * scale;
}

double mean_loss(const ModelParams& params, std::span<const Sample* const> batch) {
  if (batch.empty()) throw InputError("empty batch");
  double loss = 0.0;
  for (const Sample* s : batch) {
    const auto logits = forward_logits(params, s->features);
    const double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double l : logits) z += std::exp(l - mx);
    loss += (mx + std::log(z)) - logits.at(static_cast<std::size_t>(s->label));
  }
  return loss / static_cast<double>(batch.size());
}

SgdOptimizer::SgdOptimizer(const ModelParams& shape, double learning_rate, double momentum,
                           double weight_decay)
    : learning_rate_(learning_rate),
      momentum_(momentum),
      weight_decay_(weight_decay),
      velocity_(ModelParams::zeros(shape.input_dim, shape.hidden_dim, shape.num_classes)),
      gradient_(velocity_) {}

double SgdOptimizer::step(ModelParams& params, std::span<const Sample* const> batch) {
  const double loss = loss_and_gradient(params, batch, gradient_);
  if (weight_decay_ != 0.0) {
    for_each_block(gradient_, params,
                   [this](std::vector<double>& g, const std::vector<double>& p) {
                     axpy(weight_decay_, p, g);
                   });
  }
  auto update = [this](std::vector<double>& p, std::vector<double>& v,
                       const std::vector<double>& g) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      v[i] = momentum_ * v[i] + g[i];
      p[i] -= learning_rate_ * v[i];
    }
  };
  update(params.w1, velocity_.w1, gradient_.w1);
  update(params.b1, velocity_.b1, gradient_.b1);
  update(params.w2, velocity_.w2, gradient_.w2);
  update(params.b2, velocity_.b2, gradient_.b2);
  return loss;
}

Trainer::Trainer(ModelParams params, const SgdConfig& cfg, std::size_t batch_size,
                 std::uint64_t seed)
    : params_(std::move(params)),
      cfg_(cfg),
      batch_size_(batch_size),
      seed_(seed),
      optimizer_(params_, cfg.learning_rate, cfg.momentum, cfg.weight_decay) {
  cfg_.validate();
  params_.validate();
  if (batch_size_ == 0) throw InputError("batch size must be positive");
}

double Trainer::run_epoch(std::span<const Sample> data) {
  if (data.empty()) throw InputError("cannot train on an empty dataset");
  if (cfg_.cosine_annealing) {
    const double frac = static_cast<double>(epoch_) / static_cast<double>(cfg_.epochs);
    optimizer_.set_learning_rate(cfg_.learning_rate * 0.5 *
                                 (1.0 + std::cos(std::numbers::pi * frac)));
  }

  std::vector<const Sample*> order(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) order[i] = &data[i];
  Rng rng(derive_seed(seed_, "epoch", static_cast<std::uint64_t>(epoch_)));
  std::shuffle(order.begin(), order.end(), rng);

  double total = 0.0;
  std::size_t batches = 0;
  for (std::size_t start = 0; start < order.size(); start += batch_size_) {
    const std::size_t len = std::min(batch_size_, order.size() - start);
    total += optimizer_.step(params_, std::span<const Sample* const>(order.data() + start, len));
    ++batches;
  }
  ++epoch_;
  return total / static_cast<double>(batches);
}

ModelParams train_epoch(const ModelParams& params, std::span<const Sample> data,
                        const SgdConfig& cfg, std::size_t batch_size, std::uint64_t seed) {
  if (data.empty()) throw InputError("cannot train on an empty dataset");
  Trainer trainer(params, cfg, batch_size, seed);
  trainer.run_epoch(data);
  return trainer.params();
}

double evaluate_accuracy(const ModelParams& params, std::span<const Sample> data) {
  if (data.empty()) throw InputError("cannot evaluate on an empty dataset");
  for (const Sample& s : data) check_features(params, s.features);
  return static_cast<double>(kernels::count_correct(params, data)) /
         static_cast<double>(data.size());
}

}  // namespace casp
