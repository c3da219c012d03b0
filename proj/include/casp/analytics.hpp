#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <vector>

#include "casp/model.hpp"
#include "casp/sample.hpp"

namespace casp {

/// Target-class confidences, one row per sample and one column per recorded
/// epoch. Capacity is fixed at construction.
class ConfidenceTrace {
 public:
  ConfidenceTrace(std::vector<SampleId> sample_ids, std::vector<ClassId> labels,
                  std::size_t max_epochs);

  /// Builds the row layout (ids and labels) from `samples`.
  static ConfidenceTrace for_samples(std::span<const Sample> samples, std::size_t max_epochs);

  /// Appends one column of target confidences under `params`. `samples` must
  /// be in row order.
  void record_epoch(const ModelParams& params, std::span<const Sample> samples);

  /// Appends an externally computed column (values must lie in [0, 1]).
  void append_column(std::span<const double> column);

  std::size_t num_samples() const noexcept { return ids_.size(); }
  std::size_t epochs() const noexcept { return epochs_; }
  std::size_t capacity() const noexcept { return capacity_; }
  const std::vector<SampleId>& sample_ids() const noexcept { return ids_; }
  const std::vector<ClassId>& labels() const noexcept { return labels_; }

  double at(std::size_t row, std::size_t epoch) const;
  std::span<const double> row(std::size_t r) const;

  /// Mean confidence of `class_id` samples at `epoch`.
  double class_confidence(ClassId class_id, std::size_t epoch) const;

  /// Sorted distinct labels.
  std::vector<ClassId> classes() const;

  /// One line per sample: `id,label,c_0,...,c_{E-1}`.
  void dump(const std::filesystem::path& path) const;

 private:
  std::vector<SampleId> ids_;
  std::vector<ClassId> labels_;
  std::size_t capacity_;
  std::size_t epochs_ = 0;
  std::vector<double> values_;  // row-major, stride capacity_
};

struct ClassScore {
  ClassId class_id = 0;
  double mean_confidence = 0.0;
  double vulnerability = 0.0;
};

struct SampleScore {
  SampleId sample_id = 0;
  ClassId label = 0;
  double mean_confidence = 0.0;
  double vulnerability = 0.0;
};

/// Per class: mean and population standard deviation (divide by E) over
/// epochs of the class confidence. Sorted by class id.
std::vector<ClassScore> class_scores(const ConfidenceTrace& trace);

/// Per sample: mean and population standard deviation of its row, in row order.
std::vector<SampleScore> sample_scores(const ConfidenceTrace& trace);

struct SampleCategories {
  std::vector<SampleId> simple;       // highest mean confidence
  std::vector<SampleId> hard;         // lowest mean confidence
  std::vector<SampleId> challenging;  // highest vulnerability
};

/// Each category holds ceil(fraction * n) ids; ties go to the lower id.
/// `fraction` must lie strictly inside (0, 1).
SampleCategories categorize_samples(std::span<const SampleScore> scores, double fraction);

/// Population mean and standard deviation.
std::array<double, 2> mean_and_std(std::span<const double> values);

}  // namespace casp
