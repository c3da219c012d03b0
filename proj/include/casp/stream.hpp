#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "casp/sample.hpp"

namespace casp {

struct Task {
  int index = 0;
  std::vector<ClassId> classes;
  std::vector<Sample> train;
  std::vector<Sample> test;

  friend bool operator==(const Task&, const Task&) = default;
};

using TaskStream = std::vector<Task>;

/// Synthetic class-incremental stream of isotropic Gaussian clusters.
/// Class c lives in task c / classes_per_task before any reordering.
struct StreamConfig {
  int tasks = 5;
  int classes_per_task = 2;
  int train_per_class = 200;
  int test_per_class = 200;
  int feature_dim = 16;
  /// Centers are drawn uniformly on the sphere of this radius.
  double center_radius = 3.0;
  /// Per-class spread within [spread_min, spread_max]: drawn uniformly, or
  /// (graded) spaced linearly over the classes of each task.
  double spread_min = 0.5;
  double spread_max = 1.5;
  bool graded_spreads = false;
  /// Optional overrides; when non-empty they must have one entry per class.
  std::vector<double> class_spreads;
  std::vector<std::vector<double>> class_centers;
  std::uint64_t seed = 0;

  int num_classes() const noexcept { return tasks * classes_per_task; }
  void validate() const;
};

TaskStream make_gaussian_stream(const StreamConfig& cfg);

/// Permutation of class positions (in task order) drawn from `seed`.
std::vector<std::size_t> class_order_permutation(std::size_t num_classes, std::uint64_t seed);

std::vector<std::size_t> invert_permutation(std::span<const std::size_t> perm);

/// Reassigns classes to tasks: position p of the new task-ordered class
/// list holds the class previously at position perm[p]. Each task keeps
/// its class count; samples travel with their class and keep their ids.
TaskStream apply_class_order(const TaskStream& stream, std::span<const std::size_t> perm);

TaskStream shuffle_class_order(const TaskStream& stream, std::uint64_t seed);

/// Adds i.i.d. N(0, sigma^2) noise to every feature.
std::vector<Sample> corrupt_features(std::span<const Sample> samples, double sigma,
                                     std::uint64_t seed);

struct DatasetSchema {
  /// Row layout is `x1,...,xd,task,label` instead of `x1,...,xd,label`.
  bool task_column = false;
  /// Without a task column, sorted class ids are grouped into tasks of this
  /// many classes. 0 puts everything in one task.
  std::size_t classes_per_task = 0;
};

/// Reads one split into Task::train. Sample ids follow data-row order,
/// starting at `first_id`. Optional header: `# dim=<d> classes=<k>`.
TaskStream load_delimited_dataset(const std::filesystem::path& path,
                                  const DatasetSchema& schema, SampleId first_id = 0);

/// Loads a train file and a test file into one stream. Test samples are
/// routed to the task that owns their class in the train split.
TaskStream load_dataset_pair(const std::filesystem::path& train_path,
                             const std::filesystem::path& test_path,
                             const DatasetSchema& schema);

enum class Split { Train, Test };

void write_delimited_dataset(const std::filesystem::path& path, const TaskStream& stream,
                             Split split, bool task_column);

std::vector<Sample> all_samples(const TaskStream& stream, Split split);

/// Class id -> sample count.
std::map<ClassId, std::size_t> class_counts(std::span<const Sample> samples);

}  // namespace casp
