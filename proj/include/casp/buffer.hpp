#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "casp/analytics.hpp"
#include "casp/common.hpp"
#include "casp/sample.hpp"

namespace casp {

/// Fixed-capacity replay memory filled by reservoir sampling (Algorithm R).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return slots_.size(); }
  bool empty() const noexcept { return slots_.empty(); }
  std::uint64_t stream_count() const noexcept { return stream_count_; }
  const std::vector<Sample>& slots() const noexcept { return slots_; }

  /// Offers each sample in turn. While not full the sample is appended;
  /// afterwards the i-th item overall (1-based) lands in a uniformly chosen
  /// slot with probability capacity / i.
  void reservoir_update(std::span<const Sample> batch, Rng& rng);

  /// Up to `count` distinct slots chosen uniformly, in random order. Returns
  /// everything (shuffled) when `count >= size()`; empty when the buffer is.
  std::vector<Sample> random_retrieval(std::size_t count, Rng& rng) const;

  /// Number of slots holding samples of `task`.
  std::size_t task_share(int task) const;

  /// Per-class slot counts among `task`'s samples.
  std::map<ClassId, std::size_t> task_class_counts(int task) const;

  /// Replaces the slots of `task`, in slot order, with `chosen`. The size of
  /// `chosen` must equal task_share(task) and every sample must belong to
  /// `task`.
  void rewrite_task(int task, std::span<const Sample> chosen);

  /// One line per slot: `slot,sample_id,task,class` (with header).
  void dump(const std::filesystem::path& path) const;

 private:
  std::size_t capacity_;
  std::vector<Sample> slots_;
  std::uint64_t stream_count_ = 0;
};

struct ClassWeight {
  ClassId class_id = 0;
  double weight = 0.0;
};

/// Integer slot quotas per class for one task. Quotas sum to `total`.
struct AllocationPlan {
  int task = 0;
  std::map<ClassId, std::size_t> quotas;
  std::size_t total = 0;

  friend bool operator==(const AllocationPlan&, const AllocationPlan&) = default;
};

/// Splits `total` slots across classes proportionally to their weights using
/// largest-remainder rounding (ties to the lower class id). Quotas exceeding
/// a class's population are capped and the surplus re-split over the
/// remaining classes until stable. An all-zero weight vector splits evenly.
AllocationPlan allocate_quota(std::span<const ClassWeight> weights, std::size_t total,
                              const std::map<ClassId, std::size_t>& class_counts, int task = 0);

enum class SampleStrategy { Challenging, Hard, Simple, Random };

std::string_view to_string(SampleStrategy s);
SampleStrategy parse_sample_strategy(std::string_view name);

/// Picks, for each class in `plan`, quota-many samples of that class from
/// `task_samples` according to `strategy`. Output is grouped by ascending
/// class id, in rank order within a class. `scores` must cover every
/// candidate unless the strategy is Random.
std::vector<Sample> select_samples(std::span<const Sample> task_samples,
                                   std::span<const SampleScore> scores,
                                   const AllocationPlan& plan, SampleStrategy strategy, Rng& rng);

}  // namespace casp
