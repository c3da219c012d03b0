#include "casp/stream.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "casp/common.hpp"

namespace casp {

void StreamConfig::validate() const {
  if (tasks < 1 || classes_per_task < 1 || train_per_class < 1 || test_per_class < 1 ||
      feature_dim < 1) {
    throw InputError("stream counts must all be at least 1");
  }
  if (!(center_radius >= 0.0)) throw InputError("center radius must be nonnegative");
  if (!(spread_min > 0.0) || !(spread_max >= spread_min)) {
    throw InputError("spreads must satisfy 0 < spread_min <= spread_max");
  }
  const auto k = static_cast<std::size_t>(num_classes());
  if (!class_spreads.empty()) {
    if (class_spreads.size() != k) throw InputError("class_spreads needs one entry per class");
    for (double s : class_spreads) {
      if (!(s > 0.0)) throw InputError("class spreads must be positive");
    }
  }
  if (!class_centers.empty()) {
    if (class_centers.size() != k) throw InputError("class_centers needs one entry per class");
    for (const auto& c : class_centers) {
      if (c.size() != static_cast<std::size_t>(feature_dim)) {
        throw InputError("class center has wrong dimension");
      }
    }
  }
}

TaskStream make_gaussian_stream(const StreamConfig& cfg) {
  cfg.validate();
  const int k = cfg.num_classes();
  const auto d = static_cast<std::size_t>(cfg.feature_dim);

  std::vector<std::vector<double>> centers = cfg.class_centers;
  std::vector<double> spreads = cfg.class_spreads;
  {
    Rng rng(derive_seed(cfg.seed, "geometry"));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> spread(cfg.spread_min, cfg.spread_max);
    for (int c = 0; c < k; ++c) {
      // Draws happen even when overridden so one override does not shift the
      // other quantity's sequence.
      std::vector<double> dir(d);
      double norm = 0.0;
      do {
        norm = 0.0;
        for (double& v : dir) {
          v = normal(rng);
          norm += v * v;
        }
      } while (norm == 0.0);
      norm = std::sqrt(norm);
      for (double& v : dir) v = v / norm * cfg.center_radius;
      double s = spread(rng);
      if (cfg.graded_spreads) {
        const int j = c % cfg.classes_per_task;
        s = cfg.classes_per_task == 1
                ? cfg.spread_min
                : cfg.spread_min + (cfg.spread_max - cfg.spread_min) * j / (cfg.classes_per_task - 1);
      }
      if (cfg.class_centers.empty()) centers.push_back(std::move(dir));
      if (cfg.class_spreads.empty()) spreads.push_back(s);
    }
  }

  TaskStream stream(static_cast<std::size_t>(cfg.tasks));
  for (int t = 0; t < cfg.tasks; ++t) {
    stream[t].index = t;
    for (int j = 0; j < cfg.classes_per_task; ++j) {
      stream[t].classes.push_back(t * cfg.classes_per_task + j);
    }
  }

  auto draw = [&](ClassId c, int count, std::string_view concern, SampleId& next_id,
                  std::vector<Sample>& out) {
    Rng rng(derive_seed(cfg.seed, concern, static_cast<std::uint64_t>(c)));
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto& center = centers[static_cast<std::size_t>(c)];
    const double s = spreads[static_cast<std::size_t>(c)];
    for (int i = 0; i < count; ++i) {
      Sample smp;
      smp.id = next_id++;
      smp.label = c;
      smp.task = c / cfg.classes_per_task;
      smp.features.resize(d);
      for (std::size_t f = 0; f < d; ++f) smp.features[f] = center[f] + s * normal(rng);
      out.push_back(std::move(smp));
    }
  };

  SampleId next_id = 0;
  for (auto& task : stream) {
    for (ClassId c : task.classes) draw(c, cfg.train_per_class, "train", next_id, task.train);
  }
  for (auto& task : stream) {
    for (ClassId c : task.classes) draw(c, cfg.test_per_class, "test", next_id, task.test);
  }
  return stream;
}

std::vector<std::size_t> class_order_permutation(std::size_t num_classes, std::uint64_t seed) {
  std::vector<std::size_t> perm(num_classes);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed(seed, "class-order"));
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

std::vector<std::size_t> invert_permutation(std::span<const std::size_t> perm) {
  std::vector<std::size_t> inv(perm.size(), perm.size());
  for (std::size_t p = 0; p < perm.size(); ++p) {
    if (perm[p] >= perm.size() || inv[perm[p]] != perm.size()) {
      throw InputError("not a permutation");
    }
    inv[perm[p]] = p;
  }
  return inv;
}

TaskStream apply_class_order(const TaskStream& stream, std::span<const std::size_t> perm) {
  std::vector<ClassId> order;
  for (const auto& task : stream) order.insert(order.end(), task.classes.begin(), task.classes.end());
  if (perm.size() != order.size()) throw InputError("permutation length does not match class count");
  invert_permutation(perm);  // validates

  std::map<ClassId, std::vector<const Sample*>> train_of, test_of;
  for (const auto& task : stream) {
    for (const auto& s : task.train) train_of[s.label].push_back(&s);
    for (const auto& s : task.test) test_of[s.label].push_back(&s);
  }

  TaskStream out(stream.size());
  std::size_t pos = 0;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    out[t].index = stream[t].index;
    for (std::size_t j = 0; j < stream[t].classes.size(); ++j, ++pos) {
      const ClassId c = order[perm[pos]];
      out[t].classes.push_back(c);
      for (const Sample* s : train_of[c]) {
        out[t].train.push_back(*s);
        out[t].train.back().task = out[t].index;
      }
      for (const Sample* s : test_of[c]) {
        out[t].test.push_back(*s);
        out[t].test.back().task = out[t].index;
      }
    }
  }
  return out;
}

TaskStream shuffle_class_order(const TaskStream& stream, std::uint64_t seed) {
  std::size_t n = 0;
  for (const auto& task : stream) n += task.classes.size();
  return apply_class_order(stream, class_order_permutation(n, seed));
}

std::vector<Sample> corrupt_features(std::span<const Sample> samples, double sigma,
                                     std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InputError("noise sigma must be nonnegative");
  std::vector<Sample> out(samples.begin(), samples.end());
  if (sigma == 0.0) return out;
  Rng rng(derive_seed(seed, "corrupt"));
  std::normal_distribution<double> normal(0.0, sigma);
  for (auto& s : out) {
    for (double& v : s.features) v += normal(rng);
  }
  return out;
}

namespace {

struct ParsedRow {
  std::vector<double> features;
  long task = 0;
  long label = 0;
};

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                   : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
      cell.remove_suffix(1);
    }
    cells.push_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_long(std::string_view s, long& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

void parse_header(std::string_view line, std::size_t lineno, long& dim, long& classes) {
  std::istringstream in{std::string(line.substr(1))};
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = tok.substr(0, eq);
    long value = 0;
    if (!parse_long(std::string_view(tok).substr(eq + 1), value) || value < 1) {
      throw FormatError("line " + std::to_string(lineno) + ": bad header value '" + tok + "'",
                        lineno);
    }
    if (key == "dim") dim = value;
    if (key == "classes") classes = value;
  }
}

}  // namespace

TaskStream load_delimited_dataset(const std::filesystem::path& path, const DatasetSchema& schema,
                                  SampleId first_id) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file '" + path.string() + "'");

  long dim = -1;
  long declared_classes = -1;
  std::vector<ParsedRow> rows;
  std::string line;
  std::size_t lineno = 0;
  const std::size_t trailing = schema.task_column ? 2 : 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (view.front() == '#') {
      parse_header(view, lineno, dim, declared_classes);
      continue;
    }
    const auto cells = split_commas(view);
    auto fail = [&](const std::string& why) {
      throw FormatError("row " + std::to_string(lineno) + ": " + why, lineno);
    };
    if (cells.size() <= trailing) fail("too few columns");
    ParsedRow row;
    const std::size_t nfeat = cells.size() - trailing;
    if (dim < 0) dim = static_cast<long>(nfeat);
    if (static_cast<long>(nfeat) != dim) {
      fail("expected " + std::to_string(dim) + " features, found " + std::to_string(nfeat));
    }
    row.features.resize(nfeat);
    for (std::size_t i = 0; i < nfeat; ++i) {
      if (!parse_double(cells[i], row.features[i])) {
        fail("cannot parse feature '" + std::string(cells[i]) + "'");
      }
    }
    if (!parse_long(cells.back(), row.label) || row.label < 0) {
      fail("cannot parse label '" + std::string(cells.back()) + "'");
    }
    if (declared_classes > 0 && row.label >= declared_classes) fail("label exceeds declared classes");
    if (schema.task_column &&
        (!parse_long(cells[cells.size() - 2], row.task) || row.task < 0)) {
      fail("cannot parse task '" + std::string(cells[cells.size() - 2]) + "'");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("'" + path.string() + "' contains no data rows", lineno);

  // Map each row to a task position.
  std::map<long, std::size_t> task_slot;
  std::vector<std::size_t> row_task(rows.size());
  if (schema.task_column) {
    for (const auto& r : rows) task_slot.emplace(r.task, 0);
    std::size_t i = 0;
    for (auto& [key, slot] : task_slot) slot = i++;
    for (std::size_t r = 0; r < rows.size(); ++r) row_task[r] = task_slot[rows[r].task];
  } else {
    std::set<long> labels;
    for (const auto& r : rows) labels.insert(r.label);
    std::map<long, std::size_t> class_task;
    std::size_t i = 0;
    for (long c : labels) {
      class_task[c] = schema.classes_per_task == 0 ? 0 : i / schema.classes_per_task;
      ++i;
    }
    for (std::size_t r = 0; r < rows.size(); ++r) row_task[r] = class_task[rows[r].label];
  }

  const std::size_t ntasks = 1 + *std::max_element(row_task.begin(), row_task.end());
  TaskStream stream(ntasks);
  std::map<long, std::size_t> owner;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t t = row_task[r];
    auto [it, inserted] = owner.emplace(rows[r].label, t);
    if (!inserted && it->second != t) {
      throw FormatError("class " + std::to_string(rows[r].label) + " appears in several tasks",
                        0);
    }
    Sample s;
    s.id = first_id + r;
    s.features = std::move(rows[r].features);
    s.label = static_cast<ClassId>(rows[r].label);
    s.task = static_cast<int>(t);
    stream[t].train.push_back(std::move(s));
  }
  for (std::size_t t = 0; t < ntasks; ++t) {
    stream[t].index = static_cast<int>(t);
    std::set<ClassId> cls;
    for (const auto& s : stream[t].train) cls.insert(s.label);
    stream[t].classes.assign(cls.begin(), cls.end());
  }
  return stream;
}

TaskStream load_dataset_pair(const std::filesystem::path& train_path,
                             const std::filesystem::path& test_path,
                             const DatasetSchema& schema) {
  TaskStream stream = load_delimited_dataset(train_path, schema, 0);
  SampleId next = 0;
  std::map<ClassId, std::size_t> owner;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    next += stream[t].train.size();
    for (ClassId c : stream[t].classes) owner[c] = t;
  }
  const TaskStream test = load_delimited_dataset(test_path, schema, next);
  for (const auto& task : test) {
    for (const auto& s : task.train) {
      const auto it = owner.find(s.label);
      if (it == owner.end()) {
        throw FormatError("test class " + std::to_string(s.label) + " is absent from training data",
                          0);
      }
      if (s.features.size() != stream.front().train.front().features.size()) {
        throw FormatError("test feature dimension differs from training data", 0);
      }
      Sample copy = s;
      copy.task = static_cast<int>(it->second);
      stream[it->second].test.push_back(std::move(copy));
    }
  }
  for (auto& task : stream) {
    std::sort(task.test.begin(), task.test.end(),
              [](const Sample& a, const Sample& b) { return a.id < b.id; });
  }
  return stream;
}

void write_delimited_dataset(const std::filesystem::path& path, const TaskStream& stream,
                             Split split, bool task_column) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset file '" + path.string() + "'");
  std::size_t dim = 0;
  ClassId max_class = -1;
  for (const auto& task : stream) {
    for (const auto& s : split == Split::Train ? task.train : task.test) {
      dim = s.features.size();
      max_class = std::max(max_class, s.label);
    }
  }
  out << "# dim=" << dim << " classes=" << (max_class + 1) << '\n';
  char buf[32];
  for (const auto& task : stream) {
    for (const auto& s : split == Split::Train ? task.train : task.test) {
      for (double v : s.features) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << ',';
      }
      if (task_column) out << s.task << ',';
      out << s.label << '\n';
    }
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<Sample> all_samples(const TaskStream& stream, Split split) {
  std::vector<Sample> out;
  for (const auto& task : stream) {
    const auto& src = split == Split::Train ? task.train : task.test;
    out.insert(out.end(), src.begin(), src.end());
  }
  return out;
}

std::map<ClassId, std::size_t> class_counts(std::span<const Sample> samples) {
  std::map<ClassId, std::size_t> counts;
  for (const auto& s : samples) ++counts[s.label];
  return counts;
}

}  // namespace casp
