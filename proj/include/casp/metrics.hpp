#pragma once

#include <map>
#include <span>
#include <vector>

#include "casp/sample.hpp"

namespace casp {

/// Lower-triangular task accuracy matrix: at(i, j) is the test accuracy on
/// task j after training through task i (0-based, j <= i).
class AccuracyMatrix {
 public:
  explicit AccuracyMatrix(std::size_t tasks);

  std::size_t tasks() const noexcept { return tasks_; }
  void set(std::size_t i, std::size_t j, double accuracy);
  double at(std::size_t i, std::size_t j) const;
  bool has(std::size_t i, std::size_t j) const;
  bool row_complete(std::size_t i) const;

  friend bool operator==(const AccuracyMatrix&, const AccuracyMatrix&) = default;

 private:
  std::size_t index(std::size_t i, std::size_t j) const;

  std::size_t tasks_;
  std::vector<double> values_;
  std::vector<bool> filled_;
};

/// Mean of the final row.
double average_end_accuracy(const AccuracyMatrix& m);

/// Mean over tasks j < T-1 of (best accuracy on j before the final task,
/// counted from when j was learned) minus final accuracy on j. Negative
/// values signal backward transfer.
double average_end_forgetting(const AccuracyMatrix& m);

/// Class -> (max over history) - (last entry).
std::map<ClassId, double> per_class_forgetting(
    const std::map<ClassId, std::vector<double>>& history);

/// Sample Pearson correlation. Throws InputError on length mismatch, fewer
/// than two points or zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace casp
