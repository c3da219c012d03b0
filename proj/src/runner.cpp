#include "casp/runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "casp/kernels.hpp"

namespace casp {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Er: return "er";
    case Method::ErCasp: return "er+casp";
    case Method::OfflineSubset: return "offline-subset";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (auto m : {Method::Er, Method::ErCasp, Method::OfflineSubset}) {
    if (to_string(m) == name) return m;
  }
  throw InputError("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(SubsetCategory c) {
  switch (c) {
    case SubsetCategory::Simple: return "simple";
    case SubsetCategory::Hard: return "hard";
    case SubsetCategory::Challenging: return "challenging";
    case SubsetCategory::Random: return "random";
  }
  return "?";
}

SubsetCategory parse_subset_category(std::string_view name) {
  for (auto c : {SubsetCategory::Simple, SubsetCategory::Hard, SubsetCategory::Challenging,
                 SubsetCategory::Random}) {
    if (to_string(c) == name) return c;
  }
  throw InputError("unknown subset category '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (!dataset) stream.validate();
  if (buffer == 0) throw InputError("buffer capacity must be at least 1");
  if (batch == 0 || replay_batch == 0) throw InputError("batch sizes must be at least 1");
  if (cl_epochs < 1) throw InputError("cl_epochs must be at least 1");
  if (hidden == 0) throw InputError("hidden width must be at least 1");
  if (offline_epochs < 1) throw InputError("offline_epochs must be at least 1");
  if (ood_sigma && !(*ood_sigma >= 0.0)) throw InputError("ood_sigma must be nonnegative");
  cl_sgd.validate();
  casp.validate();
}

// ---------------------------------------------------------------------------
// Config file

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value, std::size_t line) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw FormatError("line " + std::to_string(line) + ": bad value '" + std::string(value) +
                          "' for " + std::string(key),
                      line);
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value, std::size_t line) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw FormatError("line " + std::to_string(line) + ": expected a boolean for " +
                        std::string(key),
                    line);
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text) {
  ExperimentConfig cfg;
  DatasetFiles files;
  bool have_train = false, have_test = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                           : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("line " + std::to_string(line_no) + ": expected key = value", line_no);
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto n = line_no;

    auto as_int = [&] { return parse_number<int>(key, value, n); };
    auto as_size = [&] { return parse_number<std::size_t>(key, value, n); };
    auto as_double = [&] { return parse_number<double>(key, value, n); };
    auto as_bool = [&] { return parse_bool(key, value, n); };

    try {
      if (key == "tasks") cfg.stream.tasks = as_int();
      else if (key == "classes_per_task") cfg.stream.classes_per_task = as_int();
      else if (key == "train_per_class") cfg.stream.train_per_class = as_int();
      else if (key == "test_per_class") cfg.stream.test_per_class = as_int();
      else if (key == "feature_dim") cfg.stream.feature_dim = as_int();
      else if (key == "center_radius") cfg.stream.center_radius = as_double();
      else if (key == "spread_min") cfg.stream.spread_min = as_double();
      else if (key == "spread_max") cfg.stream.spread_max = as_double();
      else if (key == "graded_spreads") cfg.stream.graded_spreads = as_bool();
      else if (key == "stream_seed") cfg.stream.seed = parse_number<std::uint64_t>(key, value, n);
      else if (key == "dataset_train") { files.train = std::string(value); have_train = true; }
      else if (key == "dataset_test") { files.test = std::string(value); have_test = true; }
      else if (key == "dataset_task_column") files.schema.task_column = as_bool();
      else if (key == "dataset_classes_per_task") files.schema.classes_per_task = as_size();
      else if (key == "buffer") cfg.buffer = as_size();
      else if (key == "batch") cfg.batch = as_size();
      else if (key == "replay_batch") cfg.replay_batch = as_size();
      else if (key == "cl_epochs") cfg.cl_epochs = as_int();
      else if (key == "cl_lr") cfg.cl_sgd.learning_rate = as_double();
      else if (key == "cl_momentum") cfg.cl_sgd.momentum = as_double();
      else if (key == "cl_weight_decay") cfg.cl_sgd.weight_decay = as_double();
      else if (key == "hidden") cfg.hidden = as_size();
      else if (key == "method") cfg.method = parse_method(value);
      else if (key == "class_strategy") cfg.casp.class_strategy = parse_class_strategy(value);
      else if (key == "sample_strategy") cfg.casp.sample_strategy = parse_sample_strategy(value);
      else if (key == "surrogate_epochs") cfg.casp.surrogate_sgd.epochs = as_int();
      else if (key == "surrogate_lr") cfg.casp.surrogate_sgd.learning_rate = as_double();
      else if (key == "surrogate_momentum") cfg.casp.surrogate_sgd.momentum = as_double();
      else if (key == "surrogate_weight_decay") cfg.casp.surrogate_sgd.weight_decay = as_double();
      else if (key == "surrogate_cosine") cfg.casp.surrogate_sgd.cosine_annealing = as_bool();
      else if (key == "surrogate_hidden") cfg.casp.surrogate_hidden = as_size();
      else if (key == "surrogate_batch") cfg.casp.surrogate_batch = as_size();
      else if (key == "include_epoch0") cfg.casp.include_epoch0 = as_bool();
      else if (key == "shuffle_classes") cfg.shuffle_classes = as_bool();
      else if (key == "ood_sigma") cfg.ood_sigma = as_double();
      else if (key == "subset_fraction") cfg.subset_fraction = as_double();
      else if (key == "subset_category") cfg.subset_category = parse_subset_category(value);
      else if (key == "offline_epochs") cfg.offline_epochs = as_int();
      else if (key == "record_wall_time") cfg.record_wall_time = as_bool();
      else {
        throw FormatError("line " + std::to_string(n) + ": unknown key '" + std::string(key) + "'",
                          n);
      }
    } catch (const InputError& e) {
      throw FormatError("line " + std::to_string(n) + ": " + e.what(), n);
    }
  }
  if (have_train != have_test) {
    throw InputError("dataset_train and dataset_test must be given together");
  }
  if (have_train) cfg.dataset = files;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

// ---------------------------------------------------------------------------
// Runs

TaskStream build_stream(const ExperimentConfig& cfg, std::uint64_t seed) {
  TaskStream stream;
  if (cfg.dataset) {
    stream = load_dataset_pair(cfg.dataset->train, cfg.dataset->test, cfg.dataset->schema);
  } else {
    StreamConfig sc = cfg.stream;
    sc.seed = derive_seed(cfg.stream.seed, "stream", seed);
    stream = make_gaussian_stream(sc);
  }
  if (cfg.shuffle_classes) stream = shuffle_class_order(stream, derive_seed(seed, "class-order"));
  return stream;
}

namespace {

std::size_t class_count_of(const TaskStream& stream) {
  ClassId mx = 0;
  for (const auto& t : stream) {
    for (ClassId c : t.classes) mx = std::max(mx, c);
  }
  return std::max<std::size_t>(2, static_cast<std::size_t>(mx) + 1);
}

std::size_t feature_dim_of(const TaskStream& stream) {
  for (const auto& t : stream) {
    if (!t.train.empty()) return t.train.front().features.size();
  }
  throw InputError("stream has no training data");
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string casp_tag(const CaspConfig& c) {
  return "ER+CASP:" + std::string(to_string(c.class_strategy)) + "/" +
         std::string(to_string(c.sample_strategy));
}

RunResult run_replay(const ExperimentConfig& cfg, std::uint64_t seed, bool with_casp,
                     const RunObserver& observer) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  const TaskStream stream = build_stream(cfg, seed);
  const std::size_t num_classes = class_count_of(stream);
  const std::size_t dim = feature_dim_of(stream);

  ModelParams params =
      ModelParams::glorot(dim, cfg.hidden, num_classes, derive_seed(seed, "init"));
  SgdOptimizer optimizer(params, cfg.cl_sgd.learning_rate, cfg.cl_sgd.momentum,
                         cfg.cl_sgd.weight_decay);
  ReplayBuffer buffer(cfg.buffer);
  Rng order_rng(derive_seed(seed, "order"));
  Rng reservoir_rng(derive_seed(seed, "reservoir"));
  Rng retrieval_rng(derive_seed(seed, "retrieval"));

  RunResult result;
  result.matrix = AccuracyMatrix(stream.size());

  std::vector<const Sample*> step;
  std::vector<Sample> incoming;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    const Task& task = stream[t];
    if (task.train.empty()) throw InputError("task " + std::to_string(t) + " has no training data");
    std::vector<std::size_t> order(task.train.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.cl_epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), order_rng);
      for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
        const std::size_t len = std::min(cfg.batch, order.size() - start);
        step.clear();
        incoming.clear();
        for (std::size_t i = start; i < start + len; ++i) {
          step.push_back(&task.train[order[i]]);
          if (epoch == 0) incoming.push_back(task.train[order[i]]);
        }
        const auto replay = buffer.random_retrieval(cfg.replay_batch, retrieval_rng);
        for (const auto& s : replay) step.push_back(&s);
        optimizer.step(params, step);
        // Each datum enters the reservoir once, on the first pass.
        if (epoch == 0) buffer.reservoir_update(incoming, reservoir_rng);
      }
    }

    if (with_casp) {
      CaspConfig cc = cfg.casp;
      cc.seed = derive_seed(seed, "surrogate", t);
      const auto outcome = run_casp(task, buffer, num_classes, cc);
      if (observer.on_trace && outcome.trace) observer.on_trace(task.index, *outcome.trace);
    }
    if (observer.on_buffer) observer.on_buffer(task.index, buffer);

    for (std::size_t j = 0; j <= t; ++j) {
      result.matrix.set(t, j, evaluate_accuracy(params, stream[j].test));
      const auto preds = kernels::predictions(params, stream[j].test);
      std::map<ClassId, std::pair<std::size_t, std::size_t>> hits;
      for (std::size_t i = 0; i < preds.size(); ++i) {
        auto& [ok, total] = hits[stream[j].test[i].label];
        ok += preds[i] == static_cast<std::size_t>(stream[j].test[i].label) ? 1 : 0;
        ++total;
      }
      for (const auto& [cls, h] : hits) {
        result.class_history[cls].push_back(static_cast<double>(h.first) /
                                            static_cast<double>(h.second));
      }
    }
  }

  ResultRow& row = result.row;
  row.method = with_casp ? casp_tag(cfg.casp) : "ER";
  row.seed = seed;
  row.buffer = cfg.buffer;
  row.tasks = stream.size();
  row.avg_end_accuracy = average_end_accuracy(result.matrix);
  row.avg_end_forgetting = stream.size() >= 2 ? average_end_forgetting(result.matrix) : 0.0;
  if (cfg.ood_sigma) {
    std::vector<double> accs;
    for (std::size_t j = 0; j < stream.size(); ++j) {
      const auto noisy = corrupt_features(stream[j].test, *cfg.ood_sigma, derive_seed(seed, "ood", j));
      accs.push_back(evaluate_accuracy(params, noisy));
    }
    row.ood_accuracy = mean_of(accs);
  }
  if (cfg.record_wall_time) {
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            started)
                      .count();
  }
  return result;
}

}  // namespace

RunResult run_er(const ExperimentConfig& cfg, std::uint64_t seed, const RunObserver& observer) {
  return run_replay(cfg, seed, false, observer);
}

RunResult run_er_casp(const ExperimentConfig& cfg, std::uint64_t seed,
                      const RunObserver& observer) {
  return run_replay(cfg, seed, true, observer);
}

ResultRow run_subset_study(const ExperimentConfig& cfg, double retain_fraction,
                           SubsetCategory category, std::uint64_t seed) {
  cfg.validate();
  if (!(retain_fraction > 0.0 && retain_fraction <= 1.0)) {
    throw InputError("retain fraction must lie in (0, 1]");
  }
  const auto started = std::chrono::steady_clock::now();
  const TaskStream stream = build_stream(cfg, seed);
  const std::size_t num_classes = class_count_of(stream);
  const auto train = all_samples(stream, Split::Train);
  const auto test = all_samples(stream, Split::Test);
  if (train.empty() || test.empty()) throw InputError("subset study needs train and test data");

  const auto counts = class_counts(train);
  std::size_t smallest = train.size();
  for (const auto& [c, n] : counts) smallest = std::min(smallest, n);
  if (retain_fraction * static_cast<double>(smallest) < 1.0) {
    throw InputError("retain fraction keeps less than one sample per class");
  }

  std::vector<Sample> subset;
  if (retain_fraction == 1.0) {
    subset = train;
  } else {
    std::vector<SampleId> keep;
    if (category == SubsetCategory::Random) {
      const auto take = static_cast<std::size_t>(
          std::ceil(retain_fraction * static_cast<double>(train.size())));
      std::vector<SampleId> ids;
      for (const auto& s : train) ids.push_back(s.id);
      Rng rng(derive_seed(seed, "subset-random"));
      for (std::size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, ids.size() - 1);
        std::swap(ids[i], ids[pick(rng)]);
      }
      keep.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(take));
    } else {
      CaspConfig cc = cfg.casp;
      cc.seed = derive_seed(seed, "surrogate");
      const auto trace = trace_surrogate(train, num_classes, cc);
      const auto scores = sample_scores(trace);
      auto cats = categorize_samples(scores, retain_fraction);
      keep = category == SubsetCategory::Simple ? cats.simple
             : category == SubsetCategory::Hard ? cats.hard
                                                : cats.challenging;
    }
    const std::set<SampleId> chosen(keep.begin(), keep.end());
    for (const auto& s : train) {
      if (chosen.count(s.id)) subset.push_back(s);
    }
  }

  SgdConfig sgd = cfg.cl_sgd;
  sgd.epochs = cfg.offline_epochs;
  Trainer trainer(ModelParams::glorot(subset.front().features.size(), cfg.hidden, num_classes,
                                      derive_seed(seed, "init")),
                  sgd, cfg.batch, derive_seed(seed, "offline-order"));
  for (int e = 0; e < cfg.offline_epochs; ++e) trainer.run_epoch(subset);

  ResultRow row;
  row.method = "subset:" + std::string(to_string(category));
  row.seed = seed;
  row.buffer = subset.size();
  row.tasks = stream.size();
  row.avg_end_accuracy = evaluate_accuracy(trainer.params(), test);
  row.avg_end_forgetting = 0.0;
  if (cfg.ood_sigma) {
    row.ood_accuracy = evaluate_accuracy(
        trainer.params(), corrupt_features(test, *cfg.ood_sigma, derive_seed(seed, "ood")));
  }
  if (cfg.record_wall_time) {
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            started)
                      .count();
  }
  return row;
}

ResultRow run_configured(const ExperimentConfig& cfg, std::uint64_t seed,
                         const RunObserver& observer) {
  switch (cfg.method) {
    case Method::Er: return run_er(cfg, seed, observer).row;
    case Method::ErCasp: return run_er_casp(cfg, seed, observer).row;
    case Method::OfflineSubset:
      return run_subset_study(cfg, cfg.subset_fraction, cfg.subset_category, seed);
  }
  throw InputError("unknown method");
}

namespace {

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.method != b.method) return a.method < b.method;
    return a.seed < b.seed;
  });
}

// Runs `jobs` independent cells in parallel and rethrows the first failure.
template <typename F>
std::vector<ResultRow> run_cells(std::size_t jobs, F&& cell) {
  std::vector<ResultRow> rows(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  const auto n = static_cast<std::int64_t>(jobs);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      rows[static_cast<std::size_t>(i)] = cell(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  sort_rows(rows);
  return rows;
}

}  // namespace

std::vector<ResultRow> run_grid(const ExperimentConfig& base,
                                std::span<const ClassStrategy> class_strategies,
                                std::span<const SampleStrategy> sample_strategies,
                                std::span<const std::uint64_t> seeds) {
  if (class_strategies.empty() || sample_strategies.empty() || seeds.empty()) {
    throw InputError("strategy grid and seed list must be non-empty");
  }
  base.validate();
  const std::size_t per_cell = seeds.size();
  const std::size_t cells = class_strategies.size() * sample_strategies.size();
  return run_cells(cells * per_cell, [&](std::size_t job) {
    const std::size_t cell = job / per_cell;
    ExperimentConfig cfg = base;
    cfg.casp.class_strategy = class_strategies[cell / sample_strategies.size()];
    cfg.casp.sample_strategy = sample_strategies[cell % sample_strategies.size()];
    return run_er_casp(cfg, seeds[job % per_cell]).row;
  });
}

std::vector<ResultRow> run_seeds(const ExperimentConfig& cfg, std::span<const std::uint64_t> seeds,
                                 const std::function<RunObserver(std::uint64_t)>& observer_for) {
  if (seeds.empty()) throw InputError("seed list must be non-empty");
  cfg.validate();
  return run_cells(seeds.size(), [&](std::size_t i) {
    const RunObserver obs = observer_for ? observer_for(seeds[i]) : RunObserver{};
    return run_configured(cfg, seeds[i], obs);
  });
}

VulnerabilityForgetting vulnerability_forgetting_study(const ExperimentConfig& cfg,
                                                       std::uint64_t seed) {
  const TaskStream stream = build_stream(cfg, seed);
  if (stream.size() < 2) throw InputError("forgetting study needs at least two tasks");
  CaspConfig cc = cfg.casp;
  cc.seed = derive_seed(seed, "surrogate", 0);
  const auto trace = trace_surrogate(stream.front().train, class_count_of(stream), cc);
  const auto scores = class_scores(trace);

  const RunResult run = run_er(cfg, seed);
  const auto forgetting = per_class_forgetting(run.class_history);

  VulnerabilityForgetting out;
  for (const auto& s : scores) {
    out.classes.push_back(s.class_id);
    out.vulnerability.push_back(s.vulnerability);
    out.forgetting.push_back(forgetting.at(s.class_id));
  }
  out.correlation = pearson(out.vulnerability, out.forgetting);
  return out;
}

// ---------------------------------------------------------------------------
// Results I/O

ResultFormat parse_result_format(std::string_view name) {
  if (name == "csv") return ResultFormat::Csv;
  if (name == "json") return ResultFormat::Json;
  throw InputError("unknown result format '" + std::string(name) + "'");
}

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

double rounded6(double v) { return std::stod(fixed6(v)); }

}  // namespace

std::string format_results(std::span<const ResultRow> rows, ResultFormat format) {
  if (format == ResultFormat::Csv) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : rows) {
      out += r.method + ',' + std::to_string(r.seed) + ',' + std::to_string(r.buffer) + ',' +
             std::to_string(r.tasks) + ',' + fixed6(r.avg_end_accuracy) + ',' +
             fixed6(r.avg_end_forgetting) + ',' + (r.ood_accuracy ? fixed6(*r.ood_accuracy) : "") +
             ',' + fixed6(r.wall_ms) + '\n';
    }
    return out;
  }
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["method"] = r.method;
    o["seed"] = r.seed;
    o["buffer"] = r.buffer;
    o["tasks"] = r.tasks;
    o["avg_end_acc"] = rounded6(r.avg_end_accuracy);
    o["avg_end_forget"] = rounded6(r.avg_end_forgetting);
    o["ood_acc"] = r.ood_accuracy ? nlohmann::ordered_json(rounded6(*r.ood_accuracy)) : nullptr;
    o["wall_ms"] = rounded6(r.wall_ms);
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

void emit_results(std::span<const ResultRow> rows, const std::filesystem::path& path,
                  ResultFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write results to '" + path.string() + "'");
  out << format_results(rows, format);
  if (!out) throw IoError("failed writing results to '" + path.string() + "'");
}

std::vector<ResultRow> parse_results(std::string_view text, ResultFormat format) {
  std::vector<ResultRow> rows;
  if (format == ResultFormat::Json) {
    const auto arr = nlohmann::json::parse(text);
    for (const auto& o : arr) {
      ResultRow r;
      r.method = o.at("method").get<std::string>();
      r.seed = o.at("seed").get<std::uint64_t>();
      r.buffer = o.at("buffer").get<std::size_t>();
      r.tasks = o.at("tasks").get<std::size_t>();
      r.avg_end_accuracy = o.at("avg_end_acc").get<double>();
      r.avg_end_forgetting = o.at("avg_end_forget").get<double>();
      if (!o.at("ood_acc").is_null()) r.ood_accuracy = o.at("ood_acc").get<double>();
      r.wall_ms = o.at("wall_ms").get<double>();
      rows.push_back(std::move(r));
    }
    return rows;
  }

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != kCsvHeader) throw FormatError("unexpected results header", 1);
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 8) {
      throw FormatError("row " + std::to_string(line_no) + ": expected 8 columns", line_no);
    }
    ResultRow r;
    r.method = cells[0];
    r.seed = parse_number<std::uint64_t>("seed", cells[1], line_no);
    r.buffer = parse_number<std::size_t>("buffer", cells[2], line_no);
    r.tasks = parse_number<std::size_t>("tasks", cells[3], line_no);
    r.avg_end_accuracy = parse_number<double>("avg_end_acc", cells[4], line_no);
    r.avg_end_forgetting = parse_number<double>("avg_end_forget", cells[5], line_no);
    if (!cells[6].empty()) r.ood_accuracy = parse_number<double>("ood_acc", cells[6], line_no);
    r.wall_ms = parse_number<double>("wall_ms", cells[7], line_no);
    rows.push_back(std::move(r));
  }
  if (line_no == 0) throw FormatError("results text is empty", 0);
  return rows;
}

namespace {

std::uint64_t parse_seed(std::string_view text) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw InputError("bad seed '" + std::string(text) + "'");
  }
  return out;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  text = trim(text);
  std::vector<std::uint64_t> seeds;
  if (const auto dots = text.find(".."); dots != std::string_view::npos) {
    const auto lo = parse_seed(trim(text.substr(0, dots)));
    const auto hi = parse_seed(trim(text.substr(dots + 2)));
    if (hi < lo) throw InputError("seed range is empty");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto part = trim(text.substr(start, comma == std::string_view::npos ? text.size() - start
                                                                              : comma - start));
    seeds.push_back(parse_seed(part));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return seeds;
}

}  // namespace casp
