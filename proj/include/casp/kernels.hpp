#pragma once

// Per-sample batch kernels. Each has a serial reference and an OpenMP
// version; both compute every sample independently, so results are
// bit-identical regardless of thread count.

#include <cstddef>
#include <span>
#include <vector>

#include "casp/model.hpp"

namespace casp::kernels {

namespace serial {

void target_confidences(const ModelParams& params, std::span<const Sample> samples,
                        std::span<double> out);
void predictions(const ModelParams& params, std::span<const Sample> samples,
                 std::span<std::size_t> out);
std::size_t count_correct(const ModelParams& params, std::span<const Sample> samples);

}  // namespace serial

namespace omp {

void target_confidences(const ModelParams& params, std::span<const Sample> samples,
                        std::span<double> out);
void predictions(const ModelParams& params, std::span<const Sample> samples,
                 std::span<std::size_t> out);
std::size_t count_correct(const ModelParams& params, std::span<const Sample> samples);

}  // namespace omp

// Library default.
inline std::vector<double> target_confidences(const ModelParams& params,
                                              std::span<const Sample> samples) {
  std::vector<double> out(samples.size());
  omp::target_confidences(params, samples, out);
  return out;
}

inline std::vector<std::size_t> predictions(const ModelParams& params,
                                            std::span<const Sample> samples) {
  std::vector<std::size_t> out(samples.size());
  omp::predictions(params, samples, out);
  return out;
}

inline std::size_t count_correct(const ModelParams& params,
                                 std::span<const Sample> samples) {
  return omp::count_correct(params, samples);
}

}  // namespace casp::kernels
