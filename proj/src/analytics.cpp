#include "casp/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "casp/common.hpp"
#include "casp/kernels.hpp"

namespace casp {

ConfidenceTrace::ConfidenceTrace(std::vector<SampleId> sample_ids, std::vector<ClassId> labels,
                                 std::size_t max_epochs)
    : ids_(std::move(sample_ids)), labels_(std::move(labels)), capacity_(max_epochs) {
  if (ids_.size() != labels_.size()) throw InputError("trace ids and labels differ in length");
  if (capacity_ == 0) throw InputError("trace needs room for at least one epoch");
  values_.assign(ids_.size() * capacity_, 0.0);
}

ConfidenceTrace ConfidenceTrace::for_samples(std::span<const Sample> samples,
                                             std::size_t max_epochs) {
  std::vector<SampleId> ids;
  std::vector<ClassId> labels;
  ids.reserve(samples.size());
  labels.reserve(samples.size());
  for (const auto& s : samples) {
    ids.push_back(s.id);
    labels.push_back(s.label);
  }
  return ConfidenceTrace(std::move(ids), std::move(labels), max_epochs);
}

void ConfidenceTrace::record_epoch(const ModelParams& params, std::span<const Sample> samples) {
  if (samples.size() != ids_.size()) throw InputError("sample count does not match trace rows");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].id != ids_[i] || samples[i].label != labels_[i]) {
      throw InputError("samples are not in trace row order (row " + std::to_string(i) + ")");
    }
  }
  append_column(kernels::target_confidences(params, samples));
}

void ConfidenceTrace::append_column(std::span<const double> column) {
  if (epochs_ >= capacity_) {
    throw InputError("trace already holds " + std::to_string(capacity_) + " epochs");
  }
  if (column.size() != ids_.size()) throw InputError("column length does not match trace rows");
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (!(column[i] >= 0.0 && column[i] <= 1.0)) throw InputError("confidence outside [0, 1]");
    values_[i * capacity_ + epochs_] = column[i];
  }
  ++epochs_;
}

double ConfidenceTrace::at(std::size_t r, std::size_t epoch) const {
  if (r >= ids_.size() || epoch >= epochs_) throw InputError("trace index out of range");
  return values_[r * capacity_ + epoch];
}

std::span<const double> ConfidenceTrace::row(std::size_t r) const {
  if (r >= ids_.size()) throw InputError("trace row out of range");
  return {values_.data() + r * capacity_, epochs_};
}

double ConfidenceTrace::class_confidence(ClassId class_id, std::size_t epoch) const {
  if (epoch >= epochs_) throw InputError("epoch " + std::to_string(epoch) + " not recorded");
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    if (labels_[r] != class_id) continue;
    total += values_[r * capacity_ + epoch];
    ++n;
  }
  if (n == 0) throw InputError("class " + std::to_string(class_id) + " not in trace");
  return total / static_cast<double>(n);
}

std::vector<ClassId> ConfidenceTrace::classes() const {
  std::set<ClassId> s(labels_.begin(), labels_.end());
  return {s.begin(), s.end()};
}

void ConfidenceTrace::dump(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace file '" + path.string() + "'");
  char buf[32];
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    out << ids_[r] << ',' << labels_[r];
    for (double v : row(r)) {
      std::snprintf(buf, sizeof buf, ",%.6f", v);
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::array<double, 2> mean_and_std(std::span<const double> values) {
  if (values.empty()) throw InputError("mean of an empty range");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

std::vector<ClassScore> class_scores(const ConfidenceTrace& trace) {
  if (trace.epochs() == 0 || trace.num_samples() == 0) {
    throw InputError("class scores need a non-empty trace");
  }
  // Accumulate per-class sums for every epoch in one pass over the rows.
  std::map<ClassId, std::pair<std::vector<double>, std::size_t>> acc;
  for (std::size_t r = 0; r < trace.num_samples(); ++r) {
    auto& [sums, count] = acc[trace.labels()[r]];
    if (sums.empty()) sums.assign(trace.epochs(), 0.0);
    const auto row = trace.row(r);
    for (std::size_t e = 0; e < row.size(); ++e) sums[e] += row[e];
    ++count;
  }
  std::vector<ClassScore> out;
  out.reserve(acc.size());
  for (auto& [cls, entry] : acc) {
    auto& [sums, count] = entry;
    for (double& s : sums) s /= static_cast<double>(count);
    const auto [mean, sd] = mean_and_std(sums);
    out.push_back({cls, mean, sd});
  }
  return out;
}

std::vector<SampleScore> sample_scores(const ConfidenceTrace& trace) {
  if (trace.epochs() == 0 || trace.num_samples() == 0) {
    throw InputError("sample scores need a non-empty trace");
  }
  std::vector<SampleScore> out;
  out.reserve(trace.num_samples());
  for (std::size_t r = 0; r < trace.num_samples(); ++r) {
    const auto [mean, sd] = mean_and_std(trace.row(r));
    out.push_back({trace.sample_ids()[r], trace.labels()[r], mean, sd});
  }
  return out;
}

SampleCategories categorize_samples(std::span<const SampleScore> scores, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InputError("fraction must lie in (0, 1)");
  if (scores.empty()) throw InputError("no scores to categorize");
  const auto n = scores.size();
  const auto take = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));

  auto pick = [&](auto better) {
    std::vector<const SampleScore*> ptrs;
    ptrs.reserve(n);
    for (const auto& s : scores) ptrs.push_back(&s);
    std::sort(ptrs.begin(), ptrs.end(), [&](const SampleScore* a, const SampleScore* b) {
      if (better(*a, *b)) return true;
      if (better(*b, *a)) return false;
      return a->sample_id < b->sample_id;
    });
    std::vector<SampleId> ids;
    for (std::size_t i = 0; i < take; ++i) ids.push_back(ptrs[i]->sample_id);
    return ids;
  };

  SampleCategories out;
  out.simple = pick([](const SampleScore& a, const SampleScore& b) {
    return a.mean_confidence > b.mean_confidence;
  });
  out.hard = pick([](const SampleScore& a, const SampleScore& b) {
    return a.mean_confidence < b.mean_confidence;
  });
  out.challenging = pick([](const SampleScore& a, const SampleScore& b) {
    return a.vulnerability > b.vulnerability;
  });
  return out;
}

}  // namespace casp
