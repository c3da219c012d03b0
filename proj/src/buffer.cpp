#include "casp/buffer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>
#include <unordered_map>

namespace casp {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw InputError("buffer capacity must be positive");
  slots_.reserve(capacity_);
}

void ReplayBuffer::reservoir_update(std::span<const Sample> batch, Rng& rng) {
  for (const Sample& s : batch) {
    ++stream_count_;
    if (slots_.size() < capacity_) {
      slots_.push_back(s);
      continue;
    }
    std::uniform_int_distribution<std::uint64_t> pick(0, stream_count_ - 1);
    const std::uint64_t j = pick(rng);
    if (j < capacity_) slots_[static_cast<std::size_t>(j)] = s;
  }
}

std::vector<Sample> ReplayBuffer::random_retrieval(std::size_t count, Rng& rng) const {
  const std::size_t n = slots_.size();
  const std::size_t k = std::min(count, n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<Sample> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(slots_[idx[i]]);
  return out;
}

std::size_t ReplayBuffer::task_share(int task) const {
  return static_cast<std::size_t>(
      std::count_if(slots_.begin(), slots_.end(), [task](const Sample& s) { return s.task == task; }));
}

std::map<ClassId, std::size_t> ReplayBuffer::task_class_counts(int task) const {
  std::map<ClassId, std::size_t> counts;
  for (const auto& s : slots_) {
    if (s.task == task) ++counts[s.label];
  }
  return counts;
}

void ReplayBuffer::rewrite_task(int task, std::span<const Sample> chosen) {
  const std::size_t share = task_share(task);
  if (chosen.size() != share) {
    throw InputError("rewrite of task " + std::to_string(task) + " needs " +
                     std::to_string(share) + " samples, got " + std::to_string(chosen.size()));
  }
  for (const auto& s : chosen) {
    if (s.task != task) {
      throw InputError("sample " + std::to_string(s.id) + " does not belong to task " +
                       std::to_string(task));
    }
  }
  auto it = chosen.begin();
  for (auto& slot : slots_) {
    if (slot.task == task) slot = *it++;
  }
}

void ReplayBuffer::dump(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write buffer snapshot '" + path.string() + "'");
  out << "slot,sample_id,task,class\n";
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    out << i << ',' << slots_[i].id << ',' << slots_[i].task << ',' << slots_[i].label << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

namespace {

// Largest-remainder apportionment of `total` over `active` (indices into
// `weights`). Remainders are compared after quantizing to 1e-9 so that
// rescaled weights produce the same ranking.
void apportion(std::span<const double> weights, const std::vector<std::size_t>& active,
               std::size_t total, std::span<const ClassId> ids, std::vector<std::size_t>& quota) {
  double wsum = 0.0;
  for (auto i : active) wsum += weights[i];
  const bool even = !(wsum > 0.0);

  struct Part {
    std::size_t index;
    std::int64_t remainder;
  };
  std::vector<Part> parts;
  std::size_t assigned = 0;
  const double m = static_cast<double>(total);
  for (auto i : active) {
    const double share =
        even ? m / static_cast<double>(active.size()) : weights[i] / wsum * m;
    auto base = static_cast<std::size_t>(std::floor(share + 1e-9));
    base = std::min(base, total);
    const double rem = std::max(0.0, share - static_cast<double>(base));
    quota[i] = base;
    assigned += base;
    parts.push_back({i, std::llround(rem * 1e9)});
  }
  // Floating shares can over-assign by one when several land just under an
  // integer; trim from the smallest remainders.
  std::sort(parts.begin(), parts.end(), [&](const Part& a, const Part& b) {
    if (a.remainder != b.remainder) return a.remainder > b.remainder;
    return ids[a.index] < ids[b.index];
  });
  for (auto it = parts.rbegin(); assigned > total && it != parts.rend(); ++it) {
    if (quota[it->index] > 0) {
      --quota[it->index];
      --assigned;
    }
  }
  for (std::size_t p = 0; assigned < total; p = (p + 1) % parts.size()) {
    ++quota[parts[p].index];
    ++assigned;
  }
}

}  // namespace

AllocationPlan allocate_quota(std::span<const ClassWeight> weights, std::size_t total,
                              const std::map<ClassId, std::size_t>& class_counts, int task) {
  std::vector<ClassWeight> sorted(weights.begin(), weights.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ClassWeight& a, const ClassWeight& b) { return a.class_id < b.class_id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].class_id == sorted[i - 1].class_id) throw InputError("duplicate class weight");
  }

  AllocationPlan plan;
  plan.task = task;
  plan.total = total;
  if (sorted.empty()) {
    if (total != 0) throw InputError("cannot allocate slots without classes");
    return plan;
  }

  std::vector<double> w;
  std::vector<ClassId> ids;
  std::vector<std::size_t> avail;
  std::size_t available = 0;
  for (const auto& cw : sorted) {
    if (!(cw.weight >= 0.0) || !std::isfinite(cw.weight)) {
      throw InputError("class weights must be finite and nonnegative");
    }
    w.push_back(cw.weight);
    ids.push_back(cw.class_id);
    const auto it = class_counts.find(cw.class_id);
    avail.push_back(it == class_counts.end() ? 0 : it->second);
    available += avail.back();
  }
  if (total > available) {
    throw InputError("cannot allocate " + std::to_string(total) + " slots over " +
                     std::to_string(available) + " available samples");
  }

  std::vector<std::size_t> quota(w.size(), 0);
  std::vector<std::size_t> active(w.size());
  std::iota(active.begin(), active.end(), 0);
  std::size_t remaining = total;
  while (true) {
    if (active.empty()) break;
    apportion(w, active, remaining, ids, quota);
    std::vector<std::size_t> still;
    bool capped = false;
    for (auto i : active) {
      if (quota[i] > avail[i]) {
        quota[i] = avail[i];
        remaining -= avail[i];
        capped = true;
      } else {
        still.push_back(i);
      }
    }
    if (!capped) break;
    // Classes that fit are re-split together with the surplus next round.
    active = std::move(still);
  }

  for (std::size_t i = 0; i < ids.size(); ++i) plan.quotas[ids[i]] = quota[i];
  return plan;
}

std::string_view to_string(SampleStrategy s) {
  switch (s) {
    case SampleStrategy::Challenging: return "challenging";
    case SampleStrategy::Hard: return "hard";
    case SampleStrategy::Simple: return "simple";
    case SampleStrategy::Random: return "random";
  }
  return "?";
}

SampleStrategy parse_sample_strategy(std::string_view name) {
  for (auto s : {SampleStrategy::Challenging, SampleStrategy::Hard, SampleStrategy::Simple,
                 SampleStrategy::Random}) {
    if (to_string(s) == name) return s;
  }
  throw InputError("unknown sample strategy '" + std::string(name) + "'");
}

std::vector<Sample> select_samples(std::span<const Sample> task_samples,
                                   std::span<const SampleScore> scores,
                                   const AllocationPlan& plan, SampleStrategy strategy, Rng& rng) {
  std::unordered_map<SampleId, const SampleScore*> by_id;
  for (const auto& s : scores) by_id.emplace(s.sample_id, &s);

  std::map<ClassId, std::vector<const Sample*>> by_class;
  for (const auto& s : task_samples) by_class[s.label].push_back(&s);

  std::vector<Sample> out;
  for (const auto& [cls, quota] : plan.quotas) {
    if (quota == 0) continue;
    auto& cands = by_class[cls];
    if (quota > cands.size()) {
      throw InputError("quota " + std::to_string(quota) + " exceeds the " +
                       std::to_string(cands.size()) + " samples of class " + std::to_string(cls));
    }
    std::sort(cands.begin(), cands.end(),
              [](const Sample* a, const Sample* b) { return a->id < b->id; });

    if (strategy == SampleStrategy::Random) {
      for (std::size_t i = 0; i < quota; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, cands.size() - 1);
        std::swap(cands[i], cands[pick(rng)]);
      }
    } else {
      auto score = [&](const Sample* s) -> const SampleScore& {
        const auto it = by_id.find(s->id);
        if (it == by_id.end()) throw InputError("no score for sample " + std::to_string(s->id));
        return *it->second;
      };
      auto key = [&](const Sample* s) {
        const auto& sc = score(s);
        switch (strategy) {
          case SampleStrategy::Challenging: return -sc.vulnerability;
          case SampleStrategy::Hard: return sc.mean_confidence;
          case SampleStrategy::Simple: return -sc.mean_confidence;
          case SampleStrategy::Random: break;
        }
        return 0.0;
      };
      std::vector<std::pair<double, const Sample*>> keyed;
      keyed.reserve(cands.size());
      for (const Sample* s : cands) keyed.emplace_back(key(s), s);
      // Stable on the id-sorted input, so equal keys keep ascending ids.
      std::stable_sort(keyed.begin(), keyed.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t i = 0; i < cands.size(); ++i) cands[i] = keyed[i].second;
    }
    for (std::size_t i = 0; i < quota; ++i) out.push_back(*cands[i]);
  }
  return out;
}

}  // namespace casp
