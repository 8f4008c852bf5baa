#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "maskvid/codebook.hpp"
#include "maskvid/errors.hpp"
#include "maskvid/predictor.hpp"
#include "maskvid/tasks.hpp"

using namespace maskvid;
using test::random_videos;

namespace {

// 2x2x2 lattice, four visual ids, two classes.
const GridShape kShape = GridShape::for_video(2, 2, 2, 1, 1, 1);
const VocabularyLayout kVocab{2, 4};

PottsParams speckled_params(std::uint64_t seed) {
  PottsParams p = PottsParams::zeros(4, 8, 2);
  Rng rng(seed);
  auto fill = [&](std::vector<double>& v) {
    for (double& x : v) x = 0.6 * (rng.uniform() - 0.5);
  };
  fill(p.neighbor);
  fill(p.positional);
  fill(p.task_bias);
  fill(p.class_bias);
  return p;
}

TrainingExample random_example(std::uint64_t seed) {
  Rng rng(seed);
  TrainingExample ex;
  ex.task_id = task_token_id(TaskKind::FI);
  ex.class_id = kVocab.class_id(static_cast<std::uint32_t>(rng.below(2)));
  std::vector<std::uint32_t> cond(8);
  for (std::size_t i = 0; i < 8; ++i) {
    cond[i] = static_cast<std::uint32_t>(rng.below(4));
    ex.targets.push_back(static_cast<std::uint32_t>(rng.below(4)));
    const std::uint64_t pick = rng.below(3);
    if (pick == 0)
      ex.corrupted.push_back(VocabularyLayout::kMaskId);
    else if (pick == 1)
      ex.corrupted.push_back(kVocab.visual_id(cond[i]));
    else
      ex.corrupted.push_back(kVocab.visual_id(ex.targets[i]));
  }
  ex.regions = classify_regions(ex.corrupted, cond, kVocab);
  return ex;
}

}  // namespace

TEST_CASE("zero parameters give uniform rows and a log-vocabulary loss") {
  const PottsPredictor pred(PottsParams::zeros(4, 8, 2));
  const std::vector<std::uint32_t> corrupted(8, VocabularyLayout::kMaskId);
  const ProbMatrix probs = pred.predict(task_token_id(TaskKind::FP),
                                        VocabularyLayout::kNoClassId,
                                        corrupted, kShape);
  REQUIRE(probs.n_positions == 8);
  REQUIRE(probs.v_vis == 4);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::uint32_t v = 0; v < 4; ++v) REQUIRE(probs.at(i, v) == 0.25);

  const std::vector<std::uint32_t> targets(8, 2), cond(8, 1);
  const LossBreakdown loss =
      multitask_loss(probs, targets, corrupted, cond, kVocab, 0.0);
  CHECK(loss.total == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(loss.n_mask == 8);
}

TEST_CASE("neighbor context shifts the prediction") {
  PottsParams params = PottsParams::zeros(4, 8, 2);
  for (std::uint32_t v = 0; v < 4; ++v)
    params.neighbor[2 * 4 + v] = 0.5 * v;  // visible id 2 pulls toward high ids
  const PottsPredictor pred(params);

  std::vector<std::uint32_t> corrupted(8, VocabularyLayout::kMaskId);
  const ProbMatrix blank = pred.predict(task_token_id(TaskKind::FP),
                                        VocabularyLayout::kNoClassId,
                                        corrupted, kShape);
  corrupted[1] = kVocab.visual_id(2);  // w+ neighbor of position 0
  const ProbMatrix seen = pred.predict(task_token_id(TaskKind::FP),
                                       VocabularyLayout::kNoClassId,
                                       corrupted, kShape);

  for (std::uint32_t v = 0; v < 4; ++v) REQUIRE(blank.at(0, v) == 0.25);
  // Position 0 now sees one row of the neighbor table: softmax(0, .5, 1, 1.5).
  double denom = 0.0;
  for (std::uint32_t v = 0; v < 4; ++v) denom += std::exp(0.5 * v - 1.5);
  for (std::uint32_t v = 0; v < 4; ++v)
    REQUIRE(seen.at(0, v) ==
            doctest::Approx(std::exp(0.5 * v - 1.5) / denom).epsilon(1e-12));
  // Positions that do not border the visible token keep the uniform row.
  for (std::uint32_t v = 0; v < 4; ++v) REQUIRE(seen.at(7, v) == 0.25);
}

TEST_CASE("masked context uses its own dedicated row") {
  PottsParams params = PottsParams::zeros(4, 8, 2);
  for (std::uint32_t v = 0; v < 4; ++v)
    params.neighbor[4 * 4 + v] = v == 0 ? 1.0 : 0.0;  // mask row favors id 0
  const PottsPredictor pred(params);
  const std::vector<std::uint32_t> all_mask(8, VocabularyLayout::kMaskId);
  const ProbMatrix probs = pred.predict(task_token_id(TaskKind::CG),
                                        kVocab.class_id(0), all_mask, kShape);
  CHECK(probs.at(0, 0) > 0.5);
}

TEST_CASE("task and class tokens bias every position") {
  PottsParams params = PottsParams::zeros(4, 8, 2);
  for (std::uint32_t v = 0; v < 4; ++v) {
    params.task_bias[static_cast<std::size_t>(3) * 4 + v] = v == 1 ? 2.0 : 0.0;
    params.class_bias[static_cast<std::size_t>(1) * 4 + v] = v == 2 ? 2.0 : 0.0;
  }
  const PottsPredictor pred(params);
  const std::vector<std::uint32_t> corrupted(8, VocabularyLayout::kMaskId);

  const ProbMatrix opv = pred.predict(task_token_id(TaskKind::OPV),
                                      VocabularyLayout::kNoClassId, corrupted,
                                      kShape);
  const ProbMatrix fp = pred.predict(task_token_id(TaskKind::FP),
                                     VocabularyLayout::kNoClassId, corrupted,
                                     kShape);
  CHECK(opv.at(3, 1) > 0.5);
  CHECK(fp.at(3, 1) == 0.25);

  const ProbMatrix cls = pred.predict(task_token_id(TaskKind::FP),
                                      kVocab.class_id(1), corrupted, kShape);
  CHECK(cls.at(5, 2) > 0.5);
}

TEST_CASE("prediction validates ids and geometry") {
  const PottsPredictor pred(PottsParams::zeros(4, 8, 2));
  const std::vector<std::uint32_t> corrupted(8, VocabularyLayout::kMaskId);
  CHECK_THROWS_AS(pred.predict(0, VocabularyLayout::kNoClassId, corrupted, kShape),
                  VocabError);
  CHECK_THROWS_AS(pred.predict(12, VocabularyLayout::kNoClassId, corrupted, kShape),
                  VocabError);
  CHECK_THROWS_AS(pred.predict(task_token_id(TaskKind::FP), 2, corrupted, kShape),
                  VocabError);
  CHECK_THROWS_AS(pred.predict(task_token_id(TaskKind::FP), kVocab.visual_id(0),
                               corrupted, kShape),
                  VocabError);

  std::vector<std::uint32_t> with_class = corrupted;
  with_class[3] = VocabularyLayout::kClassBase;  // class tokens are not context
  CHECK_THROWS_AS(pred.predict(task_token_id(TaskKind::FP),
                               VocabularyLayout::kNoClassId, with_class, kShape),
                  VocabError);

  const std::vector<std::uint32_t> shorter(7, VocabularyLayout::kMaskId);
  CHECK_THROWS_AS(pred.predict(task_token_id(TaskKind::FP),
                               VocabularyLayout::kNoClassId, shorter, kShape),
                  DimensionError);
}

TEST_CASE("rows stay stochastic for random parameters") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PottsPredictor pred(speckled_params(seed));
    const TrainingExample ex = random_example(seed + 100);
    const ProbMatrix probs = pred.predict(ex.task_id, ex.class_id, ex.corrupted,
                                          kShape);
    for (std::size_t i = 0; i < 8; ++i) {
      double sum = 0.0;
      for (std::uint32_t v = 0; v < 4; ++v) {
        REQUIRE(probs.at(i, v) > 0.0);
        sum += probs.at(i, v);
      }
      REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("oracle rows put 1 - epsilon on the truth") {
  TokenGrid truth;
  truth.shape = kShape;
  truth.ids = {0, 1, 2, 3, 3, 2, 1, 0};
  const std::vector<std::uint32_t> corrupted(8, VocabularyLayout::kMaskId);

  const OraclePredictor exact(truth, 4, 0.0);
  const ProbMatrix one_hot = exact.predict(task_token_id(TaskKind::FP),
                                           VocabularyLayout::kNoClassId,
                                           corrupted, kShape);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::uint32_t v = 0; v < 4; ++v)
      REQUIRE(one_hot.at(i, v) == (v == truth.ids[i] ? 1.0 : 0.0));

  const std::vector<std::uint32_t> cond(8, 0);
  const LossBreakdown loss =
      multitask_loss(one_hot, truth.ids, corrupted, cond, kVocab, 0.0);
  CHECK(loss.total == 0.0);

  const OraclePredictor fuzzy(truth, 4, 0.25);
  const ProbMatrix soft = fuzzy.predict(task_token_id(TaskKind::FP),
                                        VocabularyLayout::kNoClassId,
                                        corrupted, kShape);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::uint32_t v = 0; v < 4; ++v)
      REQUIRE(soft.at(i, v) ==
              doctest::Approx(v == truth.ids[i] ? 0.75 : 0.25 / 3).epsilon(1e-15));
}

TEST_CASE("oracle construction validates epsilon and ids") {
  TokenGrid truth;
  truth.shape = kShape;
  truth.ids.assign(8, 0);
  CHECK_THROWS_AS(OraclePredictor(truth, 4, -0.1), ConfigError);
  CHECK_THROWS_AS(OraclePredictor(truth, 4, 1.0), ConfigError);
  CHECK_THROWS_AS(OraclePredictor(truth, 1, 0.5), ConfigError);
  TokenGrid bad = truth;
  bad.ids[0] = 4;
  CHECK_THROWS_AS(OraclePredictor(bad, 4, 0.0), VocabError);
}

TEST_CASE("regions follow the mask, refine, reconstruct precedence") {
  const std::vector<std::uint32_t> cond = {1, 1, 1};
  const std::vector<std::uint32_t> corrupted = {
      VocabularyLayout::kMaskId, kVocab.visual_id(1), kVocab.visual_id(3)};
  const auto regions = classify_regions(corrupted, cond, kVocab);
  REQUIRE(regions.size() == 3);
  CHECK(regions[0] == Region::Mask);
  CHECK(regions[1] == Region::Refine);
  CHECK(regions[2] == Region::Recons);
  CHECK_THROWS_AS(classify_regions(corrupted, {cond.data(), 2}, kVocab),
                  DimensionError);
}

TEST_CASE("label smoothing mixes the target with a uniform floor") {
  ProbMatrix probs(1, 4);
  probs.p = {0.1, 0.2, 0.3, 0.4};
  const std::vector<std::uint32_t> targets = {2};
  const std::vector<std::uint32_t> corrupted = {VocabularyLayout::kMaskId};
  const std::vector<std::uint32_t> cond = {0};
  const double ls = 0.1;
  double expect = 0.0;
  for (std::uint32_t v = 0; v < 4; ++v) {
    const double q = (v == 2 ? 1.0 - ls : 0.0) + ls / 4;
    expect -= q * std::log(probs.p[v]);
  }
  const LossBreakdown loss =
      multitask_loss(probs, targets, corrupted, cond, kVocab, ls);
  CHECK(loss.total == doctest::Approx(expect).epsilon(1e-15));
  CHECK(loss.mask_part == loss.total);
}

TEST_CASE("loss validates targets and lengths") {
  ProbMatrix probs(2, 4);
  probs.p = {0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25};
  const std::vector<std::uint32_t> corrupted(2, VocabularyLayout::kMaskId);
  const std::vector<std::uint32_t> cond(2, 0);
  CHECK_THROWS_AS(
      multitask_loss(probs, std::vector<std::uint32_t>{4, 0}, corrupted, cond,
                     kVocab, 0.0),
      VocabError);
  CHECK_THROWS_AS(
      multitask_loss(probs, std::vector<std::uint32_t>{0}, corrupted, cond,
                     kVocab, 0.0),
      DimensionError);
}

TEST_CASE("analytic gradients match central finite differences") {
  const PottsParams base = speckled_params(5);
  const TrainingExample exs[2] = {random_example(6), random_example(7)};
  const double ls = 1e-4;
  const double h = 1e-5;

  PottsParams stepped = base;
  const LossBreakdown pre = grad_step(stepped, exs, kShape, 1.0, ls);
  const LossBreakdown eval = evaluate_loss(base, exs, kShape, ls);
  CHECK(pre.total == eval.total);

  auto block_of = [](PottsParams& p, int b) -> std::vector<double>& {
    switch (b) {
      case 0: return p.neighbor;
      case 1: return p.positional;
      case 2: return p.task_bias;
      default: return p.class_bias;
    }
  };
  double max_rel = 0.0;
  PottsParams base_copy = base;
  for (int b = 0; b < 4; ++b) {
    const std::vector<double>& orig = block_of(base_copy, b);
    const std::vector<double>& moved = block_of(stepped, b);
    for (std::size_t k = 0; k < orig.size(); ++k) {
      const double analytic = orig[k] - moved[k];  // unit learning rate
      PottsParams plus = base, minus = base;
      block_of(plus, b)[k] += h;
      block_of(minus, b)[k] -= h;
      const double fd = (evaluate_loss(plus, exs, kShape, ls).total -
                         evaluate_loss(minus, exs, kShape, ls).total) /
                        (2 * h);
      const double rel = std::abs(analytic - fd) /
                         std::max({std::abs(analytic), std::abs(fd), 1e-8});
      max_rel = std::max(max_rel, rel);
    }
  }
  CHECK(max_rel < 1e-4);
}

TEST_CASE("zero learning rate leaves the parameters untouched") {
  PottsParams params = speckled_params(8);
  const PottsParams before = params;
  const TrainingExample ex = random_example(9);
  grad_step(params, {&ex, 1}, kShape, 0.0, 0.0);
  CHECK(params.neighbor == before.neighbor);
  CHECK(params.positional == before.positional);
  CHECK(params.task_bias == before.task_bias);
  CHECK(params.class_bias == before.class_bias);

  CHECK_THROWS_AS(grad_step(params, {&ex, 1}, kShape, -0.5, 0.0), ConfigError);
}

TEST_CASE("repeated steps on one example drive the loss down") {
  PottsParams params = PottsParams::zeros(4, 8, 2);
  const TrainingExample ex = random_example(10);
  double first = 0.0, last = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int step = 0; step < 40; ++step) {
    last = grad_step(params, {&ex, 1}, kShape, 0.5, 0.0).total;
    if (step == 0) first = last;
    REQUIRE(last <= prev + 1e-12);
    prev = last;
  }
  CHECK(last < 0.5 * first);
}

TEST_CASE("training is deterministic and respects class symmetry") {
  const auto videos = random_videos(40, 4, 4, 8, 8);
  const GridShape shape = GridShape::for_video(4, 8, 8, 2, 4, 4);
  const Codebook cb = fit_codebook(videos, shape, 8, 25).codebook;
  const std::vector<std::uint32_t> labels = {0, 1, 0, 1};
  TaskSpec cg;
  cg.kind = TaskKind::CG;
  TaskSpec cfp;
  cfp.kind = TaskKind::CFP;
  const std::vector<TaskSpec> tasks = {cg, cfp};
  TrainOptions options;
  options.epochs = 3;
  options.learning_rate = 0.5;

  PottsParams a = PottsParams::zeros(8, 8, 2);
  Rng rng_a(55);
  const auto curve_a = train_predictor(a, videos, labels, tasks, cb, shape,
                                       options, rng_a);
  PottsParams b = PottsParams::zeros(8, 8, 2);
  Rng rng_b(55);
  const auto curve_b = train_predictor(b, videos, labels, tasks, cb, shape,
                                       options, rng_b);
  REQUIRE(curve_a.size() == 12);
  REQUIRE(curve_a.size() == curve_b.size());
  for (std::size_t i = 0; i < curve_a.size(); ++i)
    REQUIRE(curve_a[i].total == curve_b[i].total);
  CHECK(a.neighbor == b.neighbor);
  CHECK(a.positional == b.positional);
  CHECK(a.task_bias == b.task_bias);
  CHECK(a.class_bias == b.class_bias);

  // Swapping the two class labels swaps the two class rows and nothing else.
  const std::vector<std::uint32_t> swapped = {1, 0, 1, 0};
  PottsParams c = PottsParams::zeros(8, 8, 2);
  Rng rng_c(55);
  const auto curve_c = train_predictor(c, videos, swapped, tasks, cb, shape,
                                       options, rng_c);
  for (std::size_t i = 0; i < curve_a.size(); ++i)
    REQUIRE(curve_c[i].total == curve_a[i].total);
  CHECK(c.neighbor == a.neighbor);
  CHECK(c.positional == a.positional);
  CHECK(c.task_bias == a.task_bias);
  const std::size_t V = 8;
  for (std::size_t v = 0; v < V; ++v) {
    REQUIRE(c.class_bias[0 * V + v] == a.class_bias[1 * V + v]);
    REQUIRE(c.class_bias[1 * V + v] == a.class_bias[0 * V + v]);
    REQUIRE(c.class_bias[2 * V + v] == a.class_bias[2 * V + v]);
  }
}

TEST_CASE("neighbor identity is learnable from constant videos") {
  // Four constant clips with dyadic levels; the condition re-presents the
  // truth, so masked positions can only be predicted from their neighbors.
  std::vector<VideoTensor> videos;
  for (const float level : {0.125f, 0.375f, 0.625f, 0.875f}) {
    VideoTensor v(4, 8, 8, 1);
    std::fill(v.data.begin(), v.data.end(), level);
    videos.push_back(std::move(v));
  }
  const GridShape shape = GridShape::for_video(4, 8, 8, 2, 4, 4);
  const Codebook cb = fit_codebook(videos, shape, 4, 25).codebook;
  const std::vector<std::uint32_t> labels = {0, 1, 2, 3};
  TaskSpec fp;
  fp.kind = TaskKind::FP;
  const std::vector<TaskSpec> tasks = {fp};

  TrainOptions options;
  options.epochs = 400;
  options.learning_rate = 2.0;
  options.label_smoothing = 0.0;
  PottsParams params = PottsParams::zeros(4, 8, 4);
  Rng rng(66);
  train_predictor(params, videos, labels, tasks, cb, shape, options, rng);

  // Held-out corruption: fresh masks over the same clips.
  const VocabularyLayout vocab = params.vocab();
  Rng eval_rng(999);
  std::vector<TrainingExample> batch;
  for (int i = 0; i < 20; ++i) {
    const std::size_t vi = i % videos.size();
    const TokenGrid truth = encode(videos[vi], cb, shape);
    const ConditionBundle bundle = make_condition(videos[vi], fp, cb, shape);
    const TrainingMask tm =
        sample_training_mask(8, Schedule{ScheduleKind::Cosine}, eval_rng);
    TrainingExample ex;
    ex.task_id = task_token_id(TaskKind::FP);
    ex.class_id = VocabularyLayout::kNoClassId;
    ex.corrupted = conditional_mask(truth.ids, bundle.cond_tokens.ids,
                                    bundle.allpadded, tm.scores, tm.cutoff,
                                    vocab);
    ex.targets = truth.ids;
    ex.regions = classify_regions(ex.corrupted, bundle.cond_tokens.ids, vocab);
    batch.push_back(std::move(ex));
  }
  const LossBreakdown held_out = evaluate_loss(params, batch, shape, 0.0);
  CHECK(held_out.total < 0.1 * std::log(4.0));
}

TEST_CASE("training validates its inputs") {
  const auto videos = random_videos(41, 2, 4, 8, 8);
  const GridShape shape = GridShape::for_video(4, 8, 8, 2, 4, 4);
  const Codebook cb = fit_codebook(videos, shape, 4, 25).codebook;
  const std::vector<std::uint32_t> labels = {0, 1};
  TaskSpec fp;
  fp.kind = TaskKind::FP;
  const std::vector<TaskSpec> tasks = {fp};
  TrainOptions options;
  Rng rng(1);

  PottsParams params = PottsParams::zeros(4, 8, 2);
  CHECK_THROWS_AS(train_predictor(params, {}, labels, tasks, cb, shape, options,
                                  rng),
                  ConfigError);
  CHECK_THROWS_AS(train_predictor(params, videos, {labels.data(), 1}, tasks, cb,
                                  shape, options, rng),
                  DimensionError);
  CHECK_THROWS_AS(train_predictor(params, videos, labels, {}, cb, shape,
                                  options, rng),
                  ConfigError);
  TrainOptions bad = options;
  bad.epochs = -1;
  CHECK_THROWS_AS(train_predictor(params, videos, labels, tasks, cb, shape, bad,
                                  rng),
                  ConfigError);
}
