#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "casp/analytics.hpp"
#include "casp/buffer.hpp"
#include "casp/model.hpp"
#include "casp/stream.hpp"

namespace casp {

/// How the task's buffer share is split across its classes.
///   Challenging: proportional to class vulnerability
///   Hard:        proportional to 1 - mean confidence
///   Simple:      proportional to mean confidence
///   Balanced:    equal split
///   NoPolicy:    keep the per-class counts the reservoir produced
enum class ClassStrategy { Challenging, Hard, Simple, Balanced, NoPolicy };

std::string_view to_string(ClassStrategy s);
ClassStrategy parse_class_strategy(std::string_view name);

struct CaspConfig {
  SgdConfig surrogate_sgd{.learning_rate = 0.1, .momentum = 0.9, .weight_decay = 5e-4,
                          .epochs = 8, .cosine_annealing = false};
  std::size_t surrogate_hidden = 32;
  std::size_t surrogate_batch = 10;
  ClassStrategy class_strategy = ClassStrategy::Challenging;
  SampleStrategy sample_strategy = SampleStrategy::Challenging;
  /// Also record confidences of the untrained surrogate as an extra column.
  bool include_epoch0 = false;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Class weights in ascending class-id order. NoPolicy has no weights and
/// throws.
std::vector<ClassWeight> class_weights(std::span<const ClassScore> scores, ClassStrategy strategy);

/// Trains a fresh surrogate on `samples` for cfg.surrogate_sgd.epochs epochs,
/// recording target confidences after every epoch.
ConfidenceTrace trace_surrogate(std::span<const Sample> samples, std::size_t num_classes,
                                const CaspConfig& cfg);

struct CaspOutcome {
  AllocationPlan plan;
  std::vector<ClassScore> class_scores;
  std::optional<ConfidenceTrace> trace;  // absent when no surrogate ran
};

/// Rewrites the buffer slots of `task` according to the configured class
/// and sample strategies. Slots of other tasks are never touched.
/// `num_classes` is the output width of the surrogate (global class count).
CaspOutcome run_casp(const Task& task, ReplayBuffer& buffer, std::size_t num_classes,
                     const CaspConfig& cfg);

}  // namespace casp
