#include "maskvid/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "maskvid/errors.hpp"

namespace maskvid {

namespace {

// Row of the neighbor table for a unified context id.
std::uint32_t context_row(std::uint32_t id, const VocabularyLayout& vocab) {
  if (id == VocabularyLayout::kMaskId) return vocab.v_vis;
  return vocab.visual_index(id);
}

std::uint32_t task_row(std::uint32_t task_id) {
  if (task_id < VocabularyLayout::kTaskBase ||
      task_id >= VocabularyLayout::kTaskBase + VocabularyLayout::kNumTasks)
    throw VocabError("task id outside the task token range");
  return task_id - VocabularyLayout::kTaskBase;
}

std::uint32_t class_row(std::uint32_t class_id, const VocabularyLayout& vocab) {
  if (class_id == VocabularyLayout::kNoClassId) return vocab.n_classes;
  if (class_id < VocabularyLayout::kClassBase ||
      class_id >= VocabularyLayout::kClassBase + vocab.n_classes)
    throw VocabError("class id outside the class token range");
  return class_id - VocabularyLayout::kClassBase;
}

void check_shape(const PottsParams& params, const GridShape& shape,
                 std::size_t n_seq) {
  if (shape.n_tokens() != params.n_positions || n_seq != params.n_positions)
    throw DimensionError("sequence length does not match predictor geometry");
}

ProbMatrix potts_probs(const PottsParams& params, std::uint32_t task_id,
                       std::uint32_t class_id,
                       std::span<const std::uint32_t> corrupted,
                       const GridShape& shape) {
  check_shape(params, shape, corrupted.size());
  const VocabularyLayout vocab = params.vocab();
  const std::uint32_t V = params.v_vis;
  const std::uint32_t tr = task_row(task_id);
  const std::uint32_t cr = class_row(class_id, vocab);

  ProbMatrix probs(params.n_positions, V);
  std::vector<double> logits(V);
  std::size_t nb[6];
  for (std::size_t i = 0; i < params.n_positions; ++i) {
    const double* b = params.positional.data() + i * V;
    const double* g = params.task_bias.data() + static_cast<std::size_t>(tr) * V;
    const double* h = params.class_bias.data() + static_cast<std::size_t>(cr) * V;
    for (std::uint32_t v = 0; v < V; ++v) logits[v] = b[v] + g[v] + h[v];
    const int n_nb = shape.neighbor_indices(i, nb);
    for (int j = 0; j < n_nb; ++j) {
      const std::uint32_t row = context_row(corrupted[nb[j]], vocab);
      const double* a = params.neighbor.data() + static_cast<std::size_t>(row) * V;
      for (std::uint32_t v = 0; v < V; ++v) logits[v] += a[v];
    }
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    auto out = probs.row(i);
    for (std::uint32_t v = 0; v < V; ++v) {
      out[v] = std::exp(logits[v] - m);
      sum += out[v];
    }
    for (std::uint32_t v = 0; v < V; ++v) out[v] /= sum;
  }
  return probs;
}

void check_example(const TrainingExample& ex, const PottsParams& params) {
  if (ex.corrupted.size() != params.n_positions ||
      ex.targets.size() != params.n_positions ||
      ex.regions.size() != params.n_positions)
    throw DimensionError("training example length mismatch");
  for (std::uint32_t t : ex.targets)
    if (t >= params.v_vis) throw VocabError("target index out of range");
}

struct BatchPass {
  LossBreakdown loss;
  std::vector<ProbMatrix> probs;  // per example, only when requested
};

// Forward pass over a batch: region-split cross-entropy with optional label
// smoothing, q(v) = (1 - ls) * onehot + ls / V.
BatchPass batch_forward(const PottsParams& params,
                        std::span<const TrainingExample> batch,
                        const GridShape& shape, double label_smoothing,
                        bool keep_probs) {
  if (batch.empty()) throw DimensionError("empty training batch");
  const std::uint32_t V = params.v_vis;
  BatchPass pass;
  double sum_refine = 0.0, sum_mask = 0.0, sum_recons = 0.0;
  for (const TrainingExample& ex : batch) {
    check_example(ex, params);
    ProbMatrix probs = potts_probs(params, ex.task_id, ex.class_id,
                                   ex.corrupted, shape);
    for (std::size_t i = 0; i < params.n_positions; ++i) {
      const auto row = probs.row(i);
      double ce = 0.0;
      if (label_smoothing == 0.0) {
        ce = -std::log(row[ex.targets[i]]);
      } else {
        for (std::uint32_t v = 0; v < V; ++v) {
          const double q = (v == ex.targets[i] ? 1.0 - label_smoothing : 0.0) +
                           label_smoothing / V;
          ce -= q * std::log(row[v]);
        }
      }
      switch (ex.regions[i]) {
        case Region::Refine: sum_refine += ce; ++pass.loss.n_refine; break;
        case Region::Mask: sum_mask += ce; ++pass.loss.n_mask; break;
        case Region::Recons: sum_recons += ce; ++pass.loss.n_recons; break;
      }
    }
    if (keep_probs) pass.probs.push_back(std::move(probs));
  }
  const double denom =
      static_cast<double>(batch.size()) * params.n_positions;
  pass.loss.total = (sum_refine + sum_mask + sum_recons) / denom;
  pass.loss.refine = pass.loss.n_refine ? sum_refine / pass.loss.n_refine : 0.0;
  pass.loss.mask_part = pass.loss.n_mask ? sum_mask / pass.loss.n_mask : 0.0;
  pass.loss.recons = pass.loss.n_recons ? sum_recons / pass.loss.n_recons : 0.0;
  if (!std::isfinite(pass.loss.total))
    throw NumericError("non-finite training loss");
  return pass;
}

}  // namespace

PottsParams PottsParams::zeros(std::uint32_t v_vis, std::uint32_t n_positions,
                               std::uint32_t n_classes) {
  if (v_vis == 0 || n_positions == 0)
    throw DimensionError("predictor needs a non-empty vocabulary and lattice");
  PottsParams p;
  p.v_vis = v_vis;
  p.n_positions = n_positions;
  p.n_classes = n_classes;
  p.neighbor.assign(static_cast<std::size_t>(v_vis + 1) * v_vis, 0.0);
  p.positional.assign(static_cast<std::size_t>(n_positions) * v_vis, 0.0);
  p.task_bias.assign(static_cast<std::size_t>(VocabularyLayout::kNumTasks) * v_vis, 0.0);
  p.class_bias.assign(static_cast<std::size_t>(n_classes + 1) * v_vis, 0.0);
  return p;
}

void PottsParams::check_finite() const {
  auto all_finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(),
                       [](double x) { return std::isfinite(x); });
  };
  if (!all_finite(neighbor) || !all_finite(positional) ||
      !all_finite(task_bias) || !all_finite(class_bias))
    throw NumericError("non-finite predictor parameter");
}

OraclePredictor::OraclePredictor(TokenGrid truth, std::uint32_t v_vis,
                                 double epsilon)
    : truth_(std::move(truth)), v_vis_(v_vis), epsilon_(epsilon) {
  if (v_vis_ == 0) throw DimensionError("oracle needs a non-empty vocabulary");
  if (epsilon_ < 0.0 || epsilon_ >= 1.0)
    throw ConfigError("oracle epsilon must lie in [0, 1)");
  if (epsilon_ > 0.0 && v_vis_ < 2)
    throw ConfigError("oracle smoothing needs at least two visual ids");
  for (std::uint32_t id : truth_.ids)
    if (id >= v_vis_) throw VocabError("oracle truth id out of range");
}

ProbMatrix OraclePredictor::predict(std::uint32_t, std::uint32_t,
                                    std::span<const std::uint32_t> corrupted,
                                    const GridShape& shape) const {
  if (shape.n_tokens() != truth_.ids.size() ||
      corrupted.size() != truth_.ids.size())
    throw DimensionError("sequence length does not match oracle geometry");
  ProbMatrix probs(truth_.ids.size(), v_vis_);
  const double off = v_vis_ > 1 ? epsilon_ / (v_vis_ - 1) : 0.0;
  for (std::size_t i = 0; i < truth_.ids.size(); ++i) {
    auto row = probs.row(i);
    std::fill(row.begin(), row.end(), off);
    row[truth_.ids[i]] = 1.0 - epsilon_;
  }
  return probs;
}

ProbMatrix PottsPredictor::predict(std::uint32_t task_id,
                                   std::uint32_t class_id,
                                   std::span<const std::uint32_t> corrupted,
                                   const GridShape& shape) const {
  return potts_probs(params_, task_id, class_id, corrupted, shape);
}

std::vector<Region> classify_regions(std::span<const std::uint32_t> corrupted,
                                     std::span<const std::uint32_t> cond,
                                     const VocabularyLayout& vocab) {
  if (corrupted.size() != cond.size())
    throw DimensionError("corrupted/condition length mismatch");
  std::vector<Region> regions(corrupted.size());
  for (std::size_t i = 0; i < corrupted.size(); ++i) {
    if (corrupted[i] == VocabularyLayout::kMaskId)
      regions[i] = Region::Mask;
    else if (corrupted[i] == vocab.visual_id(cond[i]))
      regions[i] = Region::Refine;
    else
      regions[i] = Region::Recons;
  }
  return regions;
}

LossBreakdown multitask_loss(const ProbMatrix& probs,
                             std::span<const std::uint32_t> targets,
                             std::span<const std::uint32_t> corrupted,
                             std::span<const std::uint32_t> cond,
                             const VocabularyLayout& vocab,
                             double label_smoothing) {
  const std::size_t n = probs.n_positions;
  if (n == 0) throw DimensionError("empty sequence");
  if (targets.size() != n || corrupted.size() != n || cond.size() != n)
    throw DimensionError("loss inputs disagree on length");
  const std::vector<Region> regions = classify_regions(corrupted, cond, vocab);

  LossBreakdown out;
  double sums[3] = {0.0, 0.0, 0.0};
  std::size_t* counts[3] = {&out.n_refine, &out.n_mask, &out.n_recons};
  for (std::size_t i = 0; i < n; ++i) {
    if (targets[i] >= probs.v_vis) throw VocabError("target index out of range");
    double ce = 0.0;
    if (label_smoothing == 0.0) {
      ce = -std::log(probs.at(i, targets[i]));
    } else {
      for (std::uint32_t v = 0; v < probs.v_vis; ++v) {
        const double q = (v == targets[i] ? 1.0 - label_smoothing : 0.0) +
                         label_smoothing / probs.v_vis;
        ce -= q * std::log(probs.at(i, v));
      }
    }
    const int r = static_cast<int>(regions[i]);
    sums[r] += ce;
    ++*counts[r];
  }
  out.total = (sums[0] + sums[1] + sums[2]) / static_cast<double>(n);
  out.refine = out.n_refine ? sums[0] / out.n_refine : 0.0;
  out.mask_part = out.n_mask ? sums[1] / out.n_mask : 0.0;
  out.recons = out.n_recons ? sums[2] / out.n_recons : 0.0;
  return out;
}

LossBreakdown evaluate_loss(const PottsParams& params,
                            std::span<const TrainingExample> batch,
                            const GridShape& shape, double label_smoothing) {
  return batch_forward(params, batch, shape, label_smoothing, false).loss;
}

LossBreakdown grad_step(PottsParams& params,
                        std::span<const TrainingExample> batch,
                        const GridShape& shape, double learning_rate,
                        double label_smoothing) {
  if (learning_rate < 0.0)
    throw ConfigError("learning rate must be non-negative");
  BatchPass pass = batch_forward(params, batch, shape, label_smoothing, true);

  const std::uint32_t V = params.v_vis;
  const VocabularyLayout vocab = params.vocab();
  PottsParams grad = PottsParams::zeros(V, params.n_positions, params.n_classes);
  const double scale =
      1.0 / (static_cast<double>(batch.size()) * params.n_positions);

  // d(mean CE)/d(logit_i(v)) = scale * (p_i(v) - q_i(v)); each parameter
  // block receives the sum of the logit gradients it feeds.
  std::size_t nb[6];
  for (std::size_t e = 0; e < batch.size(); ++e) {
    const TrainingExample& ex = batch[e];
    const ProbMatrix& probs = pass.probs[e];
    const std::uint32_t tr = task_row(ex.task_id);
    const std::uint32_t cr = class_row(ex.class_id, vocab);
    for (std::size_t i = 0; i < params.n_positions; ++i) {
      const auto row = probs.row(i);
      double* gb = grad.positional.data() + i * V;
      double* gg = grad.task_bias.data() + static_cast<std::size_t>(tr) * V;
      double* gh = grad.class_bias.data() + static_cast<std::size_t>(cr) * V;
      const int n_nb = shape.neighbor_indices(i, nb);
      for (std::uint32_t v = 0; v < V; ++v) {
        const double q = (v == ex.targets[i] ? 1.0 - label_smoothing : 0.0) +
                         (label_smoothing != 0.0 ? label_smoothing / V : 0.0);
        const double d = scale * (row[v] - q);
        gb[v] += d;
        gg[v] += d;
        gh[v] += d;
        for (int j = 0; j < n_nb; ++j)
          grad.neighbor[static_cast<std::size_t>(
                            context_row(ex.corrupted[nb[j]], vocab)) *
                            V +
                        v] += d;
      }
    }
  }
  grad.check_finite();

  auto apply = [&](std::vector<double>& p, const std::vector<double>& g) {
    for (std::size_t k = 0; k < p.size(); ++k) p[k] -= learning_rate * g[k];
  };
  apply(params.neighbor, grad.neighbor);
  apply(params.positional, grad.positional);
  apply(params.task_bias, grad.task_bias);
  apply(params.class_bias, grad.class_bias);
  return pass.loss;
}

std::vector<LossBreakdown> train_predictor(
    PottsParams& params, std::span<const VideoTensor> videos,
    std::span<const std::uint32_t> labels, std::span<const TaskSpec> tasks,
    const Codebook& cb, const GridShape& shape, const TrainOptions& options,
    Rng& rng) {
  if (videos.empty()) throw ConfigError("training needs a non-empty dataset");
  if (labels.size() != videos.size())
    throw DimensionError("one label per video required");
  if (tasks.empty()) throw ConfigError("training needs at least one task");
  if (options.epochs < 0) throw ConfigError("epochs must be non-negative");
  const VocabularyLayout vocab = params.vocab();
  if (shape.n_tokens() != params.n_positions)
    throw DimensionError("lattice size does not match predictor geometry");

  // Condition geometry is label-independent given the video, so bundles and
  // ground-truth tokens are cached across steps.
  std::vector<std::optional<TokenGrid>> truth_cache(videos.size());
  std::vector<std::optional<ConditionBundle>> bundle_cache(videos.size() *
                                                           tasks.size());
  auto truth_of = [&](std::size_t vi) -> const TokenGrid& {
    if (!truth_cache[vi]) truth_cache[vi] = encode(videos[vi], cb, shape);
    return *truth_cache[vi];
  };
  auto bundle_of = [&](std::size_t vi, std::size_t ti) -> const ConditionBundle& {
    const std::size_t key = vi * tasks.size() + ti;
    if (!bundle_cache[key]) {
      TaskSpec spec = tasks[ti];
      if (task_uses_class(spec.kind)) spec.class_label = labels[vi];
      bundle_cache[key] = make_condition(videos[vi], spec, cb, shape);
    }
    return *bundle_cache[key];
  };

  const std::size_t steps = static_cast<std::size_t>(options.epochs) * videos.size();
  std::vector<LossBreakdown> curve;
  curve.reserve(steps);
  for (std::size_t step = 0; step < steps; ++step) {
    const std::size_t vi = rng.below(videos.size());
    const std::size_t ti = rng.below(tasks.size());
    const TokenGrid& truth = truth_of(vi);
    const ConditionBundle& bundle = bundle_of(vi, ti);
    const TrainingMask tm =
        sample_training_mask(params.n_positions, options.schedule, rng);

    TrainingExample ex;
    ex.task_id = task_token_id(tasks[ti].kind);
    ex.class_id = task_uses_class(tasks[ti].kind)
                      ? vocab.class_id(labels[vi])
                      : VocabularyLayout::kNoClassId;
    ex.corrupted = conditional_mask(truth.ids, bundle.cond_tokens.ids,
                                    bundle.allpadded, tm.scores, tm.cutoff,
                                    vocab);
    ex.targets = truth.ids;
    ex.regions = classify_regions(ex.corrupted, bundle.cond_tokens.ids, vocab);
    curve.push_back(grad_step(params, {&ex, 1}, shape, options.learning_rate,
                              options.label_smoothing));
  }
  return curve;
}

}  // namespace maskvid
