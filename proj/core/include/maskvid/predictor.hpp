#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "maskvid/codebook.hpp"
#include "maskvid/grid.hpp"
#include "maskvid/masking.hpp"
#include "maskvid/rng.hpp"
#include "maskvid/tasks.hpp"
#include "maskvid/vocab.hpp"

namespace maskvid {

// Row-stochastic position-by-vocabulary table: one categorical distribution
// over visual indices per lattice position.
struct ProbMatrix {
  std::size_t n_positions = 0;
  std::uint32_t v_vis = 0;
  std::vector<double> p;

  ProbMatrix() = default;
  ProbMatrix(std::size_t n, std::uint32_t v)
      : n_positions(n), v_vis(v), p(n * v, 0.0) {}

  double at(std::size_t i, std::uint32_t v) const { return p[i * v_vis + v]; }
  std::span<const double> row(std::size_t i) const {
    return {p.data() + i * v_vis, v_vis};
  }
  std::span<double> row(std::size_t i) {
    return {p.data() + i * v_vis, v_vis};
  }
};

// Predictor contract: given the task token, class token and corrupted
// sequence (unified ids: mask or visual), produce per-position distributions
// over the visual vocabulary.
class TokenPredictor {
 public:
  virtual ~TokenPredictor() = default;
  virtual ProbMatrix predict(std::uint32_t task_id, std::uint32_t class_id,
                             std::span<const std::uint32_t> corrupted,
                             const GridShape& shape) const = 0;
  virtual std::uint32_t v_vis() const = 0;
};

// Test predictor wrapping a known token grid: probability (1 - epsilon) on
// the ground-truth id, epsilon / (v_vis - 1) on every other id.
class OraclePredictor : public TokenPredictor {
 public:
  OraclePredictor(TokenGrid truth, std::uint32_t v_vis, double epsilon);

  ProbMatrix predict(std::uint32_t task_id, std::uint32_t class_id,
                     std::span<const std::uint32_t> corrupted,
                     const GridShape& shape) const override;
  std::uint32_t v_vis() const override { return v_vis_; }

 private:
  TokenGrid truth_;
  std::uint32_t v_vis_;
  double epsilon_;
};

// Log-linear lattice predictor. Per-position logits are the sum of a
// positional bias, a task bias, a class bias, and one neighbor-compatibility
// row per occupied 6-neighbor:
//   logits_i(v) = b[i,v] + g[task,v] + h[class,v] + sum_j A[ctx(corrupted_j), v]
// ctx maps the mask id to the extra last row of A and visual ids to their own
// rows, so masked and visible context genuinely change the prediction.
struct PottsParams {
  std::uint32_t v_vis = 0;
  std::uint32_t n_positions = 0;
  std::uint32_t n_classes = 0;
  std::vector<double> neighbor;    // (v_vis + 1) x v_vis, last row = mask ctx
  std::vector<double> positional;  // n_positions x v_vis
  std::vector<double> task_bias;   // kTaskCount x v_vis
  std::vector<double> class_bias;  // (n_classes + 1) x v_vis, last = no class

  static PottsParams zeros(std::uint32_t v_vis, std::uint32_t n_positions,
                           std::uint32_t n_classes);
  VocabularyLayout vocab() const { return VocabularyLayout{n_classes, v_vis}; }
  void check_finite() const;  // throws NumericError
};

class PottsPredictor : public TokenPredictor {
 public:
  explicit PottsPredictor(PottsParams params) : params_(std::move(params)) {}

  ProbMatrix predict(std::uint32_t task_id, std::uint32_t class_id,
                     std::span<const std::uint32_t> corrupted,
                     const GridShape& shape) const override;
  std::uint32_t v_vis() const override { return params_.v_vis; }
  const PottsParams& params() const { return params_; }

 private:
  PottsParams params_;
};

// Position role inside a corrupted sequence, recovered from the sequence
// itself: mask token, re-presented condition token, or kept target token.
enum class Region : std::uint8_t { Refine, Mask, Recons };

std::vector<Region> classify_regions(std::span<const std::uint32_t> corrupted,
                                     std::span<const std::uint32_t> cond,
                                     const VocabularyLayout& vocab);

// Mean cross-entropy in nats, split by region. Parts average within their
// region; total averages over all positions, so
// total * N == refine * n_refine + mask_part * n_mask + recons * n_recons.
struct LossBreakdown {
  double total = 0.0;
  double refine = 0.0;
  double mask_part = 0.0;
  double recons = 0.0;
  std::size_t n_refine = 0;
  std::size_t n_mask = 0;
  std::size_t n_recons = 0;
};

LossBreakdown multitask_loss(const ProbMatrix& probs,
                             std::span<const std::uint32_t> targets,
                             std::span<const std::uint32_t> corrupted,
                             std::span<const std::uint32_t> cond,
                             const VocabularyLayout& vocab,
                             double label_smoothing = 0.0);

struct TrainingExample {
  std::uint32_t task_id = VocabularyLayout::kTaskBase;
  std::uint32_t class_id = VocabularyLayout::kNoClassId;
  std::vector<std::uint32_t> corrupted;  // unified ids
  std::vector<std::uint32_t> targets;    // visual indices
  std::vector<Region> regions;
};

// Batch loss at the current parameters, without updating them.
LossBreakdown evaluate_loss(const PottsParams& params,
                            std::span<const TrainingExample> batch,
                            const GridShape& shape, double label_smoothing);

// One vanilla SGD step on the mean (optionally label-smoothed) cross-entropy
// over the batch; returns the pre-update loss.
LossBreakdown grad_step(PottsParams& params,
                        std::span<const TrainingExample> batch,
                        const GridShape& shape, double learning_rate,
                        double label_smoothing);

struct TrainOptions {
  int epochs = 1;
  double learning_rate = 0.5;
  double label_smoothing = 1e-4;
  Schedule schedule{ScheduleKind::Cosine};
};

// SGD over epochs * n_videos steps. Each step samples a video and a task,
// builds the condition, corrupts the ground-truth tokens with a fresh
// training mask, and applies one grad_step. Returns the per-step losses.
std::vector<LossBreakdown> train_predictor(
    PottsParams& params, std::span<const VideoTensor> videos,
    std::span<const std::uint32_t> labels, std::span<const TaskSpec> tasks,
    const Codebook& cb, const GridShape& shape, const TrainOptions& options,
    Rng& rng);

}  // namespace maskvid
