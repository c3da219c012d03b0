#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "casp/model.hpp"
#include "casp/sample.hpp"

namespace casp::testing {

inline Sample make_sample(SampleId id, std::vector<double> features, ClassId label, int task = 0) {
  Sample s;
  s.id = id;
  s.features = std::move(features);
  s.label = label;
  s.task = task;
  return s;
}

/// Two tight, well separated 2-D clusters: class 0 around (-3, 0), class 1
/// around (3, 0).
inline std::vector<Sample> two_clusters(std::size_t per_class, std::uint64_t seed,
                                        double spread = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, spread);
  std::vector<Sample> out;
  for (std::size_t i = 0; i < per_class; ++i) {
    out.push_back(make_sample(out.size(), {-3.0 + n(rng), n(rng)}, 0));
    out.push_back(make_sample(out.size(), {3.0 + n(rng), n(rng)}, 1));
  }
  return out;
}

/// Reference forward pass and cross-entropy written independently of the
/// library (plain nested loops, explicit log-sum-exp).
inline double reference_loss(const ModelParams& p, const std::vector<Sample>& batch) {
  double total = 0.0;
  for (const auto& s : batch) {
    std::vector<double> h(p.hidden_dim);
    for (std::size_t j = 0; j < p.hidden_dim; ++j) {
      double a = p.b1[j];
      for (std::size_t i = 0; i < p.input_dim; ++i) a += p.w1[j * p.input_dim + i] * s.features[i];
      h[j] = a > 0.0 ? a : 0.0;
    }
    std::vector<double> z(p.num_classes);
    double mx = -INFINITY;
    for (std::size_t c = 0; c < p.num_classes; ++c) {
      double a = p.b2[c];
      for (std::size_t j = 0; j < p.hidden_dim; ++j) a += p.w2[c * p.hidden_dim + j] * h[j];
      z[c] = a;
      mx = std::max(mx, a);
    }
    double lse = 0.0;
    for (double v : z) lse += std::exp(v - mx);
    total += mx + std::log(lse) - z[static_cast<std::size_t>(s.label)];
  }
  return total / static_cast<double>(batch.size());
}

/// Central finite-difference gradient of reference_loss.
inline std::vector<double> finite_difference_gradient(const ModelParams& p,
                                                      const std::vector<Sample>& batch,
                                                      double step = 1e-5) {
  auto flat = p.flatten();
  std::vector<double> grad(flat.size());
  ModelParams probe = p;
  for (std::size_t k = 0; k < flat.size(); ++k) {
    const double orig = flat[k];
    flat[k] = orig + step;
    probe.assign_flat(flat);
    const double up = reference_loss(probe, batch);
    flat[k] = orig - step;
    probe.assign_flat(flat);
    const double down = reference_loss(probe, batch);
    flat[k] = orig;
    grad[k] = (up - down) / (2.0 * step);
  }
  return grad;
}

inline double relative_error(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / denom;
}

}  // namespace casp::testing
