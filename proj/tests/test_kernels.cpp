#include <doctest.h>

#include <cstring>

#include "casp/common.hpp"
#include "casp/kernels.hpp"
#include "casp/stream.hpp"

using namespace casp;

namespace {

std::vector<Sample> sample_set(std::size_t dim, std::size_t classes, std::uint64_t seed) {
  StreamConfig cfg;
  cfg.tasks = 1;
  cfg.classes_per_task = static_cast<int>(classes);
  cfg.train_per_class = 97;
  cfg.test_per_class = 1;
  cfg.feature_dim = static_cast<int>(dim);
  cfg.seed = seed;
  return make_gaussian_stream(cfg).front().train;
}

}  // namespace

TEST_CASE("parallel kernels match the serial reference bit for bit") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto data = sample_set(16, 5, seed);
    const auto params = ModelParams::glorot(16, 32, 5, seed * 7);

    std::vector<double> c_serial(data.size()), c_omp(data.size());
    kernels::serial::target_confidences(params, data, c_serial);
    kernels::omp::target_confidences(params, data, c_omp);
    CHECK(std::memcmp(c_serial.data(), c_omp.data(), c_serial.size() * sizeof(double)) == 0);

    std::vector<std::size_t> p_serial(data.size()), p_omp(data.size());
    kernels::serial::predictions(params, data, p_serial);
    kernels::omp::predictions(params, data, p_omp);
    CHECK(p_serial == p_omp);

    CHECK(kernels::serial::count_correct(params, data) == kernels::omp::count_correct(params, data));
  }
}

TEST_CASE("kernels agree with the scalar model functions") {
  const auto data = sample_set(4, 3, 9);
  const auto params = ModelParams::glorot(4, 6, 3, 1);
  const auto conf = kernels::target_confidences(params, data);
  const auto pred = kernels::predictions(params, data);
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(conf[i] == target_confidence(params, data[i]));
    CHECK(pred[i] == predict(params, data[i].features));
  }
}

TEST_CASE("kernels reject malformed input before entering the parallel region") {
  auto data = sample_set(4, 3, 2);
  const auto params = ModelParams::glorot(4, 6, 3, 1);
  data[5].label = 7;
  CHECK_THROWS_AS(kernels::target_confidences(params, data), InputError);
  data[5].label = 0;
  data[6].features.pop_back();
  CHECK_THROWS_AS(kernels::count_correct(params, data), InputError);
}
