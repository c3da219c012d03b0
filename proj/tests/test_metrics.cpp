#include <doctest.h>

#include <cmath>

#include "casp/common.hpp"
#include "casp/metrics.hpp"

using namespace casp;

namespace {

AccuracyMatrix two_task(double a00, double a10, double a11) {
  AccuracyMatrix m(2);
  m.set(0, 0, a00);
  m.set(1, 0, a10);
  m.set(1, 1, a11);
  return m;
}

}  // namespace

TEST_CASE("accuracy matrix bookkeeping") {
  AccuracyMatrix m(3);
  CHECK_FALSE(m.has(1, 0));
  m.set(1, 0, 0.5);
  CHECK(m.has(1, 0));
  CHECK(m.at(1, 0) == 0.5);
  CHECK_FALSE(m.row_complete(1));
  CHECK_THROWS_AS(m.set(0, 1, 0.5), InputError);
  CHECK_THROWS_AS(m.set(2, 0, 1.5), InputError);
  CHECK_THROWS_AS(m.at(2, 2), InputError);
  CHECK_THROWS_AS(average_end_accuracy(m), InputError);
}

TEST_CASE("average_end_accuracy") {
  CHECK(average_end_accuracy(two_task(0.9, 0.6, 0.8)) == doctest::Approx(0.7).epsilon(1e-15));
  AccuracyMatrix one(1);
  one.set(0, 0, 0.9);
  CHECK(average_end_accuracy(one) == 0.9);
  AccuracyMatrix flat(4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j <= i; ++j) flat.set(i, j, 0.25);
  }
  CHECK(average_end_accuracy(flat) == 0.25);
}

TEST_CASE("average_end_forgetting") {
  CHECK(average_end_forgetting(two_task(0.9, 0.6, 0.8)) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(average_end_forgetting(two_task(0.6, 0.9, 0.8)) == doctest::Approx(-0.3).epsilon(1e-15));
  CHECK(average_end_forgetting(two_task(0.7, 0.7, 0.1)) == 0.0);
  AccuracyMatrix one(1);
  one.set(0, 0, 0.9);
  CHECK_THROWS_AS(average_end_forgetting(one), InputError);

  SUBCASE("the best earlier row counts, not just the diagonal") {
    AccuracyMatrix m(3);
    m.set(0, 0, 0.5);
    m.set(1, 0, 0.9);
    m.set(1, 1, 0.8);
    m.set(2, 0, 0.4);
    m.set(2, 1, 0.8);
    m.set(2, 2, 0.7);
    // task 0: 0.9 - 0.4; task 1: 0.8 - 0.8
    CHECK(average_end_forgetting(m) == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("property: non-increasing columns never give negative forgetting") {
    Rng rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t t = 2 + trial % 6;
      AccuracyMatrix m(t);
      for (std::size_t j = 0; j < t; ++j) {
        double a = u(rng);
        for (std::size_t i = j; i < t; ++i) {
          m.set(i, j, a);
          a *= u(rng);
        }
      }
      CHECK(average_end_forgetting(m) >= 0.0);
    }
  }
}

TEST_CASE("per_class_forgetting") {
  const auto f = per_class_forgetting({{0, {1.0, 0.4}}, {1, {0.3, 0.3}}, {2, {0.2, 0.8, 0.5}}});
  CHECK(f.at(0) == doctest::Approx(0.6));
  CHECK(f.at(1) == 0.0);
  CHECK(f.at(2) == doctest::Approx(0.3));
  CHECK_THROWS_AS(per_class_forgetting({{0, {}}}), InputError);
}

TEST_CASE("pearson") {
  const std::vector<double> x{1, 2, 3};
  CHECK(pearson(x, std::vector<double>{3, 5, 7}) == doctest::Approx(1.0));
  CHECK(pearson(x, std::vector<double>{-1, -2, -3}) == doctest::Approx(-1.0));
  CHECK(pearson(x, std::vector<double>{1, 3, 2}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(pearson(x, std::vector<double>{2, 2, 2}), InputError);
  CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), InputError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), InputError);

  SUBCASE("property: affine images give the sign of the slope") {
    Rng rng(9);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> a(3 + trial % 10), b;
      for (double& v : a) v = u(rng);
      double slope = u(rng);
      if (std::abs(slope) < 0.1) slope = 0.5;
      const double shift = u(rng);
      for (double v : a) b.push_back(slope * v + shift);
      CHECK(std::abs(pearson(a, b) - (slope > 0 ? 1.0 : -1.0)) <= 1e-12);
    }
  }
}
