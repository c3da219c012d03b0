#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "casp/analytics.hpp"
#include "casp/common.hpp"
#include "casp/model.hpp"
#include "test_util.hpp"

using namespace casp;
using casp::testing::make_sample;

namespace {

ConfidenceTrace trace_from(const std::vector<ClassId>& labels,
                           const std::vector<std::vector<double>>& columns) {
  std::vector<SampleId> ids(labels.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  ConfidenceTrace t(ids, labels, columns.empty() ? 1 : columns.size());
  for (const auto& c : columns) t.append_column(c);
  return t;
}

// Oracle: mean and population std by the textbook formula.
std::pair<double, double> brute(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  const double m = s / static_cast<double>(v.size());
  double q = 0.0;
  for (double x : v) q += (x - m) * (x - m);
  return {m, std::sqrt(q / static_cast<double>(v.size()))};
}

ConfidenceTrace random_trace(Rng& rng, std::size_t n, std::size_t epochs, int classes) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ClassId> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<ClassId>(i % classes);
  std::vector<std::vector<double>> cols(epochs, std::vector<double>(n));
  for (auto& c : cols) {
    for (double& v : c) v = u(rng);
  }
  return trace_from(labels, cols);
}

}  // namespace

TEST_CASE("record_epoch") {
  const std::vector<Sample> samples{make_sample(4, {1.0, 2.0}, 0), make_sample(9, {-1.0, 0.5}, 1),
                                    make_sample(2, {0.0, 3.0}, 1)};
  auto trace = ConfidenceTrace::for_samples(samples, 2);

  SUBCASE("zero model gives a column of one half") {
    trace.record_epoch(ModelParams::zeros(2, 3, 2), samples);
    for (std::size_t r = 0; r < 3; ++r) CHECK(trace.at(r, 0) == 0.5);
  }
  SUBCASE("column equals per-sample target confidence") {
    const auto p = ModelParams::glorot(2, 5, 2, 3);
    trace.record_epoch(p, samples);
    for (std::size_t r = 0; r < 3; ++r) CHECK(trace.at(r, 0) == target_confidence(p, samples[r]));
  }
  SUBCASE("capacity is enforced") {
    const auto p = ModelParams::zeros(2, 3, 2);
    trace.record_epoch(p, samples);
    trace.record_epoch(p, samples);
    CHECK_THROWS_AS(trace.record_epoch(p, samples), InputError);
  }
  SUBCASE("row order is enforced") {
    auto swapped = samples;
    std::swap(swapped[0], swapped[1]);
    CHECK_THROWS_AS(trace.record_epoch(ModelParams::zeros(2, 3, 2), swapped), InputError);
  }
}

TEST_CASE("class_confidence") {
  const auto t = trace_from({0, 0, 1}, {{0.2, 0.4, 0.7}, {1.0, 1.0, 0.3}});
  CHECK(t.class_confidence(0, 0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(t.class_confidence(1, 0) == 0.7);
  CHECK(t.class_confidence(0, 1) == 1.0);
  CHECK_THROWS_AS(t.class_confidence(5, 0), InputError);
  CHECK_THROWS_AS(t.class_confidence(0, 2), InputError);
  CHECK(t.classes() == std::vector<ClassId>{0, 1});
}

TEST_CASE("class_scores and sample_scores") {
  SUBCASE("hand examples") {
    const auto constant = trace_from({0, 0}, {{0.4, 0.6}, {0.6, 0.4}, {0.5, 0.5}});
    const auto cs = class_scores(constant);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].mean_confidence == doctest::Approx(0.5));
    CHECK(cs[0].vulnerability == doctest::Approx(0.0));

    const auto single = trace_from({0, 1}, {{0.3, 0.9}});
    for (const auto& c : class_scores(single)) CHECK(c.vulnerability == 0.0);

    const auto ones = sample_scores(trace_from({0}, {{1.0}, {1.0}, {1.0}}));
    CHECK(ones[0].mean_confidence == 1.0);
    CHECK(ones[0].vulnerability == 0.0);

    const auto two = sample_scores(trace_from({0}, {{0.0}, {1.0}}));
    CHECK(two[0].mean_confidence == 0.5);
    CHECK(two[0].vulnerability == 0.5);
  }
  SUBCASE("empty trace") {
    const ConfidenceTrace t({0}, {0}, 3);
    CHECK_THROWS_AS(class_scores(t), InputError);
    CHECK_THROWS_AS(sample_scores(t), InputError);
  }
  SUBCASE("property: agree with a brute-force oracle") {
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 2 + trial % 19;
      const std::size_t epochs = 1 + trial % 10;
      const int k = 1 + trial % 4;
      const auto t = random_trace(rng, n, epochs, k);
      for (const auto& s : sample_scores(t)) {
        const auto row = t.row(s.sample_id);
        const auto [m, sd] = brute({row.begin(), row.end()});
        CHECK(std::abs(s.mean_confidence - m) <= 1e-12);
        CHECK(std::abs(s.vulnerability - sd) <= 1e-12);
        CHECK(s.vulnerability <= 0.5);
      }
      for (const auto& c : class_scores(t)) {
        std::vector<double> curve;
        for (std::size_t e = 0; e < epochs; ++e) {
          double sum = 0.0;
          int cnt = 0;
          for (std::size_t r = 0; r < n; ++r) {
            if (t.labels()[r] != c.class_id) continue;
            sum += t.at(r, e);
            ++cnt;
          }
          curve.push_back(sum / cnt);
        }
        const auto [m, sd] = brute(curve);
        CHECK(std::abs(c.mean_confidence - m) <= 1e-12);
        CHECK(std::abs(c.vulnerability - sd) <= 1e-12);
        CHECK(c.vulnerability >= 0.0);
        CHECK(c.vulnerability <= 0.5);
      }
    }
  }
  SUBCASE("property: shifting a class shifts its mean only") {
    Rng rng(8);
    std::uniform_real_distribution<double> u(0.0, 0.7);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::vector<double>> cols(6, std::vector<double>(8));
      for (auto& c : cols) {
        for (double& v : c) v = u(rng);
      }
      auto shifted = cols;
      for (auto& c : shifted) {
        for (std::size_t r = 0; r < 8; r += 2) c[r] += 0.25;  // class 0 rows
      }
      const std::vector<ClassId> labels{0, 1, 0, 1, 0, 1, 0, 1};
      const auto a = class_scores(trace_from(labels, cols));
      const auto b = class_scores(trace_from(labels, shifted));
      CHECK(std::abs(b[0].mean_confidence - a[0].mean_confidence - 0.25) <= 1e-12);
      CHECK(std::abs(b[0].vulnerability - a[0].vulnerability) <= 1e-12);
      CHECK(b[1].mean_confidence == a[1].mean_confidence);
    }
  }
  SUBCASE("property: row order within a class does not matter") {
    Rng rng(3);
    const auto t = random_trace(rng, 12, 7, 3);
    std::vector<std::size_t> order(12);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<SampleId> ids;
    std::vector<ClassId> labels;
    for (auto r : order) {
      ids.push_back(t.sample_ids()[r]);
      labels.push_back(t.labels()[r]);
    }
    ConfidenceTrace p(ids, labels, 7);
    for (std::size_t e = 0; e < 7; ++e) {
      std::vector<double> col;
      for (auto r : order) col.push_back(t.at(r, e));
      p.append_column(col);
    }
    const auto a = class_scores(t);
    const auto b = class_scores(p);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(a[i].mean_confidence - b[i].mean_confidence) <= 1e-12);
      CHECK(std::abs(a[i].vulnerability - b[i].vulnerability) <= 1e-12);
    }
  }
}

TEST_CASE("categorize_samples") {
  SUBCASE("one id per category") {
    const std::vector<SampleScore> scores{
        {.sample_id = 10, .label = 0, .mean_confidence = 0.9, .vulnerability = 0.01},
        {.sample_id = 11, .label = 0, .mean_confidence = 0.5, .vulnerability = 0.4},
        {.sample_id = 12, .label = 0, .mean_confidence = 0.1, .vulnerability = 0.05}};
    const auto cats = categorize_samples(scores, 0.3);
    CHECK(cats.simple == std::vector<SampleId>{10});
    CHECK(cats.hard == std::vector<SampleId>{12});
    CHECK(cats.challenging == std::vector<SampleId>{11});
  }
  SUBCASE("identical scores fall back to the lowest ids") {
    std::vector<SampleScore> scores;
    for (SampleId id : {7u, 3u, 5u, 1u}) scores.push_back({id, 0, 0.5, 0.1});
    const auto cats = categorize_samples(scores, 0.5);
    const std::vector<SampleId> expected{1, 3};
    CHECK(cats.simple == expected);
    CHECK(cats.hard == expected);
    CHECK(cats.challenging == expected);
  }
  SUBCASE("fraction bounds") {
    const std::vector<SampleScore> scores{{0, 0, 0.5, 0.1}};
    CHECK_THROWS_AS(categorize_samples(scores, 1.0), InputError);
    CHECK_THROWS_AS(categorize_samples(scores, 0.0), InputError);
    CHECK(categorize_samples(scores, 0.01).simple.size() == 1);
  }
}

TEST_CASE("trace dump") {
  const auto t = trace_from({1, 0}, {{0.25, 1.0}, {0.5, 0.0}});
  const auto path = std::filesystem::temp_directory_path() / "casp_test_trace.csv";
  t.dump(path);
  std::ifstream in(path);
  std::string l1, l2;
  std::getline(in, l1);
  std::getline(in, l2);
  CHECK(l1 == "0,1,0.250000,0.500000");
  CHECK(l2 == "1,0,1.000000,0.000000");
  std::filesystem::remove(path);
}
