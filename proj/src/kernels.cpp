#include "casp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "casp/common.hpp"

namespace casp::kernels {

namespace {

void check_batch(const ModelParams& p, std::span<const Sample> samples, bool need_labels) {
  for (const Sample& s : samples) {
    if (s.features.size() != p.input_dim) {
      throw InputError("sample " + std::to_string(s.id) + " has wrong feature length");
    }
    if (need_labels && (s.label < 0 || static_cast<std::size_t>(s.label) >= p.num_classes)) {
      throw InputError("sample " + std::to_string(s.id) + " label out of range");
    }
  }
}

// Per-thread scratch for one forward pass.
struct Workspace {
  std::vector<double> hidden;
  std::vector<double> logits;
  explicit Workspace(const ModelParams& p) : hidden(p.hidden_dim), logits(p.num_classes) {}
};

void logits_of(const ModelParams& p, const Sample& s, Workspace& ws) {
  const std::size_t in = p.input_dim;
  const std::size_t hid = p.hidden_dim;
  for (std::size_t h = 0; h < hid; ++h) {
    const double* row = p.w1.data() + h * in;
    double acc = p.b1[h];
    for (std::size_t i = 0; i < in; ++i) acc += row[i] * s.features[i];
    ws.hidden[h] = std::max(acc, 0.0);
  }
  for (std::size_t c = 0; c < p.num_classes; ++c) {
    const double* row = p.w2.data() + c * hid;
    double acc = p.b2[c];
    for (std::size_t h = 0; h < hid; ++h) acc += row[h] * ws.hidden[h];
    ws.logits[c] = acc;
  }
}

double confidence_of(const ModelParams& p, const Sample& s, Workspace& ws) {
  logits_of(p, s, ws);
  const double mx = *std::max_element(ws.logits.begin(), ws.logits.end());
  double z = 0.0;
  for (double l : ws.logits) z += std::exp(l - mx);
  return std::exp(ws.logits[static_cast<std::size_t>(s.label)] - mx) / z;
}

std::size_t prediction_of(const ModelParams& p, const Sample& s, Workspace& ws) {
  logits_of(p, s, ws);
  return static_cast<std::size_t>(std::max_element(ws.logits.begin(), ws.logits.end()) -
                                  ws.logits.begin());
}

}  // namespace

namespace serial {

void target_confidences(const ModelParams& params, std::span<const Sample> samples,
                        std::span<double> out) {
  check_batch(params, samples, true);
  if (out.size() != samples.size()) throw InputError("output span size mismatch");
  Workspace ws(params);
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = confidence_of(params, samples[i], ws);
}

void predictions(const ModelParams& params, std::span<const Sample> samples,
                 std::span<std::size_t> out) {
  check_batch(params, samples, false);
  if (out.size() != samples.size()) throw InputError("output span size mismatch");
  Workspace ws(params);
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = prediction_of(params, samples[i], ws);
}

std::size_t count_correct(const ModelParams& params, std::span<const Sample> samples) {
  check_batch(params, samples, false);
  Workspace ws(params);
  std::size_t correct = 0;
  for (const Sample& s : samples) {
    if (prediction_of(params, s, ws) == static_cast<std::size_t>(s.label)) ++correct;
  }
  return correct;
}

}  // namespace serial

namespace omp {

void target_confidences(const ModelParams& params, std::span<const Sample> samples,
                        std::span<double> out) {
  check_batch(params, samples, true);
  if (out.size() != samples.size()) throw InputError("output span size mismatch");
  const auto n = static_cast<std::int64_t>(samples.size());
#pragma omp parallel
  {
    Workspace ws(params);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out[i] = confidence_of(params, samples[i], ws);
  }
}

void predictions(const ModelParams& params, std::span<const Sample> samples,
                 std::span<std::size_t> out) {
  check_batch(params, samples, false);
  if (out.size() != samples.size()) throw InputError("output span size mismatch");
  const auto n = static_cast<std::int64_t>(samples.size());
#pragma omp parallel
  {
    Workspace ws(params);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out[i] = prediction_of(params, samples[i], ws);
  }
}

std::size_t count_correct(const ModelParams& params, std::span<const Sample> samples) {
  check_batch(params, samples, false);
  const auto n = static_cast<std::int64_t>(samples.size());
  std::int64_t correct = 0;
#pragma omp parallel reduction(+ : correct)
  {
    Workspace ws(params);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      if (prediction_of(params, samples[i], ws) == static_cast<std::size_t>(samples[i].label)) {
        ++correct;
      }
    }
  }
  return static_cast<std::size_t>(correct);
}

}  // namespace omp

}  // namespace casp::kernels
