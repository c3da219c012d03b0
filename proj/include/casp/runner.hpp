#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "casp/buffer.hpp"
#include "casp/metrics.hpp"
#include "casp/model.hpp"
#include "casp/policy.hpp"
#include "casp/stream.hpp"

namespace casp {

enum class Method { Er, ErCasp, OfflineSubset };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// Which part of the scored training set an offline subset run keeps.
enum class SubsetCategory { Simple, Hard, Challenging, Random };

std::string_view to_string(SubsetCategory c);
SubsetCategory parse_subset_category(std::string_view name);

struct DatasetFiles {
  std::filesystem::path train;
  std::filesystem::path test;
  DatasetSchema schema;
};

struct ExperimentConfig {
  StreamConfig stream;
  std::optional<DatasetFiles> dataset;  // replaces the synthetic stream

  std::size_t buffer = 100;
  std::size_t batch = 10;         // incoming stream batch
  std::size_t replay_batch = 10;  // retrieved from the buffer per step
  int cl_epochs = 5;
  SgdConfig cl_sgd{.learning_rate = 0.1, .momentum = 0.0, .weight_decay = 0.0, .epochs = 1,
                   .cosine_annealing = false};
  std::size_t hidden = 32;

  CaspConfig casp;
  Method method = Method::Er;
  bool shuffle_classes = true;
  std::optional<double> ood_sigma;

  double subset_fraction = 0.1;
  SubsetCategory subset_category = SubsetCategory::Challenging;
  int offline_epochs = 20;

  /// When false, wall_ms is reported as 0 so output files are reproducible.
  bool record_wall_time = false;

  void validate() const;
};

/// Flat `key = value` text, `#` comments. Unknown keys are rejected.
ExperimentConfig parse_experiment_config(std::string_view text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ResultRow {
  std::string method;
  std::uint64_t seed = 0;
  std::size_t buffer = 0;
  std::size_t tasks = 0;
  double avg_end_accuracy = 0.0;
  double avg_end_forgetting = 0.0;
  std::optional<double> ood_accuracy;
  double wall_ms = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct RunResult {
  AccuracyMatrix matrix{1};
  ResultRow row;
  /// Per-class test accuracy after each task, starting at the task that
  /// introduced the class.
  std::map<ClassId, std::vector<double>> class_history;
};

/// Optional hooks for per-task dumps.
struct RunObserver {
  std::function<void(int task, const ConfidenceTrace&)> on_trace;
  std::function<void(int task, const ReplayBuffer&)> on_buffer;
};

/// Stream used by a run: synthetic (seeded from config and run seed) or
/// loaded, then class-order shuffled when configured.
TaskStream build_stream(const ExperimentConfig& cfg, std::uint64_t seed);

/// Experience replay with reservoir updates and random retrieval.
RunResult run_er(const ExperimentConfig& cfg, std::uint64_t seed,
                 const RunObserver& observer = {});

/// Experience replay with the buffer policy applied after every task.
RunResult run_er_casp(const ExperimentConfig& cfg, std::uint64_t seed,
                      const RunObserver& observer = {});

/// Offline study: score the whole training set with the surrogate, keep
/// `retain_fraction` of it from `category`, train a fresh model on that
/// subset and report its test accuracy in avg_end_accuracy.
ResultRow run_subset_study(const ExperimentConfig& cfg, double retain_fraction,
                           SubsetCategory category, std::uint64_t seed);

/// Dispatches on cfg.method.
ResultRow run_configured(const ExperimentConfig& cfg, std::uint64_t seed,
                         const RunObserver& observer = {});

/// Every (class strategy, sample strategy, seed) cell through run_er_casp.
/// Rows are sorted by (method, seed).
std::vector<ResultRow> run_grid(const ExperimentConfig& base,
                                std::span<const ClassStrategy> class_strategies,
                                std::span<const SampleStrategy> sample_strategies,
                                std::span<const std::uint64_t> seeds);

/// Runs `cfg` once per seed (in parallel); rows sorted by (method, seed).
std::vector<ResultRow> run_seeds(const ExperimentConfig& cfg, std::span<const std::uint64_t> seeds,
                                 const std::function<RunObserver(std::uint64_t)>& observer_for = {});

struct VulnerabilityForgetting {
  std::vector<ClassId> classes;
  std::vector<double> vulnerability;
  std::vector<double> forgetting;
  double correlation = 0.0;
};

/// Scores the classes of the first task with the surrogate, then runs plain
/// ER over the whole stream and correlates each first-task class's
/// vulnerability with its forgetting.
VulnerabilityForgetting vulnerability_forgetting_study(const ExperimentConfig& cfg,
                                                       std::uint64_t seed);

enum class ResultFormat { Csv, Json };

ResultFormat parse_result_format(std::string_view name);

inline constexpr std::string_view kCsvHeader =
    "method,seed,buffer,tasks,avg_end_acc,avg_end_forget,ood_acc,wall_ms";

std::string format_results(std::span<const ResultRow> rows, ResultFormat format);
void emit_results(std::span<const ResultRow> rows, const std::filesystem::path& path,
                  ResultFormat format);
std::vector<ResultRow> parse_results(std::string_view text, ResultFormat format);

/// "a..b" (inclusive), "a,b,c" or a single seed.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

}  // namespace casp
