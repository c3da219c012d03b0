#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "casp/policy.hpp"
#include "casp/stream.hpp"
#include "test_util.hpp"

using namespace casp;

namespace {

TaskStream small_stream(std::size_t classes_per_task, std::uint64_t seed) {
  StreamConfig cfg;
  cfg.tasks = 2;
  cfg.classes_per_task = classes_per_task;
  cfg.train_per_class = 30;
  cfg.test_per_class = 5;
  cfg.feature_dim = 4;
  cfg.spread_min = 0.5;
  cfg.spread_max = 2.5;
  cfg.seed = seed;
  return make_gaussian_stream(cfg);
}

CaspConfig quick(ClassStrategy cs, SampleStrategy ss, std::uint64_t seed = 1) {
  CaspConfig cfg;
  cfg.surrogate_sgd.epochs = 4;
  cfg.surrogate_hidden = 8;
  cfg.class_strategy = cs;
  cfg.sample_strategy = ss;
  cfg.seed = seed;
  return cfg;
}

// Buffer holding both tasks of `stream` through reservoir sampling.
ReplayBuffer filled(const TaskStream& stream, std::size_t capacity, std::uint64_t seed) {
  ReplayBuffer b(capacity);
  Rng rng(seed);
  for (const auto& t : stream) b.reservoir_update(t.train, rng);
  return b;
}

// Oracle largest-remainder apportionment, written directly from the rule.
std::map<ClassId, std::size_t> oracle_quotas(const std::map<ClassId, double>& w, std::size_t m) {
  double sum = 0.0;
  for (const auto& [c, v] : w) sum += v;
  std::map<ClassId, std::size_t> q;
  std::vector<std::pair<double, ClassId>> rem;
  std::size_t used = 0;
  for (const auto& [c, v] : w) {
    const double share = v / sum * static_cast<double>(m);
    q[c] = static_cast<std::size_t>(std::floor(share));
    used += q[c];
    rem.emplace_back(share - std::floor(share), c);
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (std::size_t i = 0; used < m; ++i, ++used) ++q[rem[i].second];
  return q;
}

}  // namespace

TEST_CASE("class_weights") {
  const std::vector<ClassScore> scores{{0, 0.9, 0.2}, {1, 0.4, 0.1}};
  auto values = [](const std::vector<ClassWeight>& w) {
    std::vector<double> out;
    for (const auto& x : w) out.push_back(x.weight);
    return out;
  };
  CHECK(values(class_weights(scores, ClassStrategy::Challenging)) == std::vector<double>{0.2, 0.1});
  const auto hard = values(class_weights(scores, ClassStrategy::Hard));
  CHECK(hard[0] == doctest::Approx(0.1));
  CHECK(hard[1] == doctest::Approx(0.6));
  CHECK(values(class_weights(scores, ClassStrategy::Simple)) == std::vector<double>{0.9, 0.4});
  CHECK(values(class_weights(scores, ClassStrategy::Balanced)) == std::vector<double>{1.0, 1.0});
  CHECK_THROWS_AS(class_weights(scores, ClassStrategy::NoPolicy), InputError);
  CHECK(parse_class_strategy("balanced") == ClassStrategy::Balanced);
  CHECK_THROWS_AS(parse_class_strategy("most"), InputError);
}

TEST_CASE("trace_surrogate") {
  const auto stream = small_stream(2, 3);
  auto cfg = quick(ClassStrategy::Challenging, SampleStrategy::Challenging);
  const auto t = trace_surrogate(stream[0].train, 4, cfg);
  CHECK(t.epochs() == 4);
  CHECK(t.num_samples() == stream[0].train.size());
  CHECK(trace_surrogate(stream[0].train, 4, cfg).row(5)[3] == t.row(5)[3]);

  cfg.include_epoch0 = true;
  const auto t0 = trace_surrogate(stream[0].train, 4, cfg);
  CHECK(t0.epochs() == 5);
  // Untrained glorot net: confidences near 1/K but not exact.
  for (std::size_t r = 0; r < t0.num_samples(); ++r) CHECK(t0.at(r, 0) > 0.0);
}

TEST_CASE("run_casp") {
  SUBCASE("a single-class task keeps its whole share") {
    const auto stream = small_stream(1, 5);
    for (auto cs : {ClassStrategy::Challenging, ClassStrategy::Hard, ClassStrategy::Simple,
                    ClassStrategy::Balanced}) {
      auto buffer = filled(stream, 20, 1);
      const std::size_t share = buffer.task_share(0);
      const auto out = run_casp(stream[0], buffer, 2, quick(cs, SampleStrategy::Challenging));
      CHECK(out.plan.quotas.size() == 1);
      CHECK(out.plan.quotas.begin()->second == share);
      CHECK(buffer.task_share(0) == share);
    }
  }
  SUBCASE("no policy with random selection leaves the buffer alone") {
    const auto stream = small_stream(2, 6);
    auto buffer = filled(stream, 40, 2);
    const auto before = buffer.slots();
    const auto out =
        run_casp(stream[0], buffer, 4, quick(ClassStrategy::NoPolicy, SampleStrategy::Random));
    CHECK(buffer.slots() == before);
    CHECK_FALSE(out.trace.has_value());
  }
  SUBCASE("balanced over three classes") {
    const auto stream = small_stream(3, 7);
    ReplayBuffer buffer(100);
    Rng rng(1);
    buffer.reservoir_update(std::span<const Sample>(stream[0].train).first(10), rng);
    const auto out =
        run_casp(stream[0], buffer, 6, quick(ClassStrategy::Balanced, SampleStrategy::Hard));
    CHECK(out.plan.total == 10);
    std::vector<std::size_t> q;
    for (const auto& [c, n] : out.plan.quotas) q.push_back(n);
    CHECK(q == std::vector<std::size_t>{4, 3, 3});
    CHECK(buffer.task_class_counts(0) == out.plan.quotas);
  }
  SUBCASE("other tasks are never touched") {
    const auto stream = small_stream(2, 8);
    for (auto ss : {SampleStrategy::Challenging, SampleStrategy::Hard, SampleStrategy::Simple,
                    SampleStrategy::Random}) {
      auto buffer = filled(stream, 30, 3);
      const auto before = buffer.slots();
      run_casp(stream[1], buffer, 4, quick(ClassStrategy::Challenging, ss));
      REQUIRE(buffer.size() == before.size());
      for (std::size_t i = 0; i < before.size(); ++i) {
        if (before[i].task != 1) CHECK(buffer.slots()[i] == before[i]);
        CHECK(buffer.slots()[i].task == before[i].task);
      }
    }
  }
  SUBCASE("challenging/challenging equals the brute-force composition") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto stream = small_stream(3, 10 + seed);
      auto buffer = filled(stream, 30, seed);
      const std::size_t share = buffer.task_share(0);
      const auto cfg = quick(ClassStrategy::Challenging, SampleStrategy::Challenging, seed);
      run_casp(stream[0], buffer, 6, cfg);

      const auto trace = trace_surrogate(stream[0].train, 6, cfg);
      // Class V from the raw trace.
      std::map<ClassId, double> v;
      for (ClassId c : stream[0].classes) {
        std::vector<double> curve;
        for (std::size_t e = 0; e < trace.epochs(); ++e) {
          double s = 0.0;
          int n = 0;
          for (std::size_t r = 0; r < trace.num_samples(); ++r) {
            if (trace.labels()[r] == c) {
              s += trace.at(r, e);
              ++n;
            }
          }
          curve.push_back(s / n);
        }
        const double m = std::accumulate(curve.begin(), curve.end(), 0.0) / curve.size();
        double q = 0.0;
        for (double x : curve) q += (x - m) * (x - m);
        v[c] = std::sqrt(q / curve.size());
      }
      const auto quotas = oracle_quotas(v, share);

      std::multiset<SampleId> expected;
      for (const auto& [c, q] : quotas) {
        std::vector<std::pair<double, SampleId>> ranked;
        for (std::size_t r = 0; r < trace.num_samples(); ++r) {
          if (trace.labels()[r] != c) continue;
          const auto row = trace.row(r);
          const double m = std::accumulate(row.begin(), row.end(), 0.0) / row.size();
          double ss = 0.0;
          for (double x : row) ss += (x - m) * (x - m);
          ranked.emplace_back(-std::sqrt(ss / row.size()), trace.sample_ids()[r]);
        }
        std::sort(ranked.begin(), ranked.end());
        for (std::size_t i = 0; i < q; ++i) expected.insert(ranked[i].second);
      }
      std::multiset<SampleId> actual;
      for (const auto& s : buffer.slots()) {
        if (s.task == 0) actual.insert(s.id);
      }
      CHECK(actual == expected);
    }
  }
  SUBCASE("include_epoch0 keeps the structural invariants") {
    const auto stream = small_stream(2, 12);
    auto buffer = filled(stream, 30, 4);
    const auto before = buffer.slots();
    auto cfg = quick(ClassStrategy::Challenging, SampleStrategy::Challenging);
    cfg.include_epoch0 = true;
    const auto out = run_casp(stream[0], buffer, 4, cfg);
    CHECK(out.trace->epochs() == 5);
    CHECK(buffer.size() == before.size());
    std::size_t sum = 0;
    for (const auto& [c, q] : out.plan.quotas) sum += q;
    CHECK(sum == buffer.task_share(0));
    for (std::size_t i = 0; i < before.size(); ++i) {
      if (before[i].task != 0) CHECK(buffer.slots()[i] == before[i]);
    }
  }
}
