#include "casp/policy.hpp"

#include <algorithm>
#include <string>

namespace casp {

std::string_view to_string(ClassStrategy s) {
  switch (s) {
    case ClassStrategy::Challenging: return "challenging";
    case ClassStrategy::Hard: return "hard";
    case ClassStrategy::Simple: return "simple";
    case ClassStrategy::Balanced: return "balanced";
    case ClassStrategy::NoPolicy: return "nopolicy";
  }
  return "?";
}

ClassStrategy parse_class_strategy(std::string_view name) {
  for (auto s : {ClassStrategy::Challenging, ClassStrategy::Hard, ClassStrategy::Simple,
                 ClassStrategy::Balanced, ClassStrategy::NoPolicy}) {
    if (to_string(s) == name) return s;
  }
  throw InputError("unknown class strategy '" + std::string(name) + "'");
}

void CaspConfig::validate() const {
  surrogate_sgd.validate();
  if (surrogate_hidden == 0) throw InputError("surrogate hidden width must be positive");
  if (surrogate_batch == 0) throw InputError("surrogate batch size must be positive");
}

std::vector<ClassWeight> class_weights(std::span<const ClassScore> scores, ClassStrategy strategy) {
  if (scores.empty()) throw InputError("no class scores");
  if (strategy == ClassStrategy::NoPolicy) {
    throw InputError("the no-policy class strategy does not weight classes");
  }
  std::vector<ClassWeight> out;
  out.reserve(scores.size());
  for (const auto& s : scores) {
    double w = 1.0;
    switch (strategy) {
      case ClassStrategy::Challenging: w = s.vulnerability; break;
      case ClassStrategy::Hard: w = 1.0 - s.mean_confidence; break;
      case ClassStrategy::Simple: w = s.mean_confidence; break;
      case ClassStrategy::Balanced: w = 1.0; break;
      case ClassStrategy::NoPolicy: break;
    }
    out.push_back({s.class_id, std::max(w, 0.0)});
  }
  std::sort(out.begin(), out.end(),
            [](const ClassWeight& a, const ClassWeight& b) { return a.class_id < b.class_id; });
  return out;
}

ConfidenceTrace trace_surrogate(std::span<const Sample> samples, std::size_t num_classes,
                                const CaspConfig& cfg) {
  cfg.validate();
  if (samples.empty()) throw InputError("surrogate needs training data");
  const std::size_t dim = samples.front().features.size();
  const auto epochs = static_cast<std::size_t>(cfg.surrogate_sgd.epochs);

  Trainer trainer(ModelParams::glorot(dim, cfg.surrogate_hidden, num_classes,
                                      derive_seed(cfg.seed, "surrogate-init")),
                  cfg.surrogate_sgd, cfg.surrogate_batch, derive_seed(cfg.seed, "surrogate-order"));
  auto trace = ConfidenceTrace::for_samples(samples, epochs + (cfg.include_epoch0 ? 1 : 0));
  if (cfg.include_epoch0) trace.record_epoch(trainer.params(), samples);
  for (std::size_t e = 0; e < epochs; ++e) {
    trainer.run_epoch(samples);
    trace.record_epoch(trainer.params(), samples);
  }
  return trace;
}

CaspOutcome run_casp(const Task& task, ReplayBuffer& buffer, std::size_t num_classes,
                     const CaspConfig& cfg) {
  cfg.validate();
  if (task.train.empty()) throw InputError("task " + std::to_string(task.index) + " has no data");

  CaspOutcome out;
  out.plan.task = task.index;
  const std::size_t share = buffer.task_share(task.index);
  out.plan.total = share;

  const bool keep_reservoir = cfg.class_strategy == ClassStrategy::NoPolicy &&
                              cfg.sample_strategy == SampleStrategy::Random;
  if (keep_reservoir || share == 0) {
    auto counts = buffer.task_class_counts(task.index);
    for (ClassId c : task.classes) out.plan.quotas[c] = counts[c];
    return out;
  }

  out.trace = trace_surrogate(task.train, num_classes, cfg);
  out.class_scores = class_scores(*out.trace);

  if (cfg.class_strategy == ClassStrategy::NoPolicy) {
    auto counts = buffer.task_class_counts(task.index);
    for (ClassId c : task.classes) out.plan.quotas[c] = counts[c];
  } else {
    const auto weights = class_weights(out.class_scores, cfg.class_strategy);
    out.plan = allocate_quota(weights, share, class_counts(task.train), task.index);
  }

  const auto scores = sample_scores(*out.trace);
  Rng rng(derive_seed(cfg.seed, "select"));
  const auto chosen = select_samples(task.train, scores, out.plan, cfg.sample_strategy, rng);
  buffer.rewrite_task(task.index, chosen);
  return out;
}

}  // namespace casp
