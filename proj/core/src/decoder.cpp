#include "maskvid/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maskvid/errors.hpp"

namespace maskvid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_row_stochastic(const ProbMatrix& probs) {
  for (std::size_t i = 0; i < probs.n_positions; ++i) {
    double sum = 0.0;
    for (double p : probs.row(i)) {
      if (!(p >= 0.0)) throw NumericError("predictor row has negative entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw NumericError("predictor row does not sum to 1");
  }
}

std::uint32_t sample_row(std::span<const double> row, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::uint32_t v = 0; v < row.size(); ++v) {
    acc += row[v];
    if (u < acc) return v;
  }
  return static_cast<std::uint32_t>(row.size() - 1);
}

}  // namespace

DecodeResult conditional_decode(const TokenPredictor& predictor,
                                std::uint32_t task_id, std::uint32_t class_id,
                                const ConditionBundle& bundle,
                                const VocabularyLayout& vocab,
                                const DecodeConfig& config) {
  const GridShape& shape = bundle.cond_tokens.shape;
  const std::size_t n = shape.n_tokens();
  if (n == 0) throw DimensionError("cannot decode an empty lattice");
  if (bundle.cond_tokens.ids.size() != n || bundle.allpadded.size() != n)
    throw DimensionError("condition bundle inconsistent with its lattice");
  if (config.steps < 1) throw ConfigError("decoding needs at least one step");
  if (config.temperature < 0.0)
    throw ConfigError("decoding temperature must be non-negative");

  Rng rng(config.seed);
  const int K = config.steps;

  std::vector<double> scores(n, 0.0);
  std::vector<std::uint32_t> estimate(n, 0);  // placeholder, resampled before use
  std::vector<std::uint8_t> finalized(n, 0);
  Cutoff cutoff = Cutoff::all();

  // Finalized positions are pinned above every cutoff. Without this the
  // cutoff value can exceed 1 at high temperature and pull already-frozen
  // positions (score exactly 1) back into the maskable set.
  auto adjusted = [&](std::size_t i) { return finalized[i] ? kInf : scores[i]; };

  DecodeResult result;
  result.trace.steps.reserve(K);
  std::size_t n_finalized = 0;

  for (int t = 0; t < K; ++t) {
    std::vector<double> adj(n);
    for (std::size_t i = 0; i < n; ++i) adj[i] = adjusted(i);

    DecodeStep snap;
    snap.corrupted = conditional_mask(estimate, bundle.cond_tokens.ids,
                                      bundle.allpadded, adj, cutoff, vocab);

    const ProbMatrix probs =
        predictor.predict(task_id, class_id, snap.corrupted, shape);
    if (probs.n_positions != n || probs.v_vis != vocab.v_vis)
      throw DimensionError("predictor output shape mismatch");
    check_row_stochastic(probs);

    // Resample every maskable position and take the model probability of the
    // sampled id as its confidence; confidence exactly 1 finalizes on the
    // spot, since no later resample could change the token.
    for (std::size_t i = 0; i < n; ++i) {
      if (finalized[i] || !cutoff.selects(adj[i], i)) continue;
      estimate[i] = sample_row(probs.row(i), rng);
      scores[i] = probs.at(i, estimate[i]);
      if (scores[i] == 1.0) {
        finalized[i] = 1;
        ++n_finalized;
      }
    }

    // Annealed Gumbel perturbation. Zero amplitude draws nothing, so at
    // temperature 0 the trace depends on the sampling stream alone.
    const double amp =
        config.temperature * (1.0 - static_cast<double>(t + 1) / K);
    if (amp > 0.0) {
      for (std::size_t i = 0; i < n; ++i)
        if (!finalized[i] && scores[i] < 1.0) scores[i] += amp * rng.gumbel();
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!std::isfinite(scores[i]) && !finalized[i])
        throw NumericError("non-finite decoding score");

    // Keep the ceil(gamma((t+1)/K) * N) lowest-scoring non-finalized
    // positions maskable; freeze the rest at score 1.
    std::size_t keep = mask_count_for_ratio(
        config.schedule, static_cast<double>(t + 1) / K, n);
    keep = std::min(keep, n - n_finalized);
    for (std::size_t i = 0; i < n; ++i) adj[i] = adjusted(i);
    cutoff = cutoff_kth_smallest(adj, keep);
    for (std::size_t i = 0; i < n; ++i) {
      if (finalized[i] || cutoff.selects(adj[i], i)) continue;
      scores[i] = 1.0;
      finalized[i] = 1;
      ++n_finalized;
    }

    snap.estimate = estimate;
    snap.scores = scores;
    snap.cutoff = cutoff;
    snap.n_finalized = n_finalized;
    result.trace.steps.push_back(std::move(snap));
  }

  result.tokens.shape = shape;
  result.tokens.ids = estimate;
  return result;
}

GenerateResult generate_video(const VideoTensor* input, const TaskSpec& spec,
                              const Codebook& cb, const GridShape& shape,
                              const TokenPredictor& predictor,
                              const VocabularyLayout& vocab,
                              const DecodeConfig& config) {
  VideoTensor zeros;
  if (!input) {
    if (spec.kind != TaskKind::CG)
      throw ConfigError("only class-conditional generation runs without an input video");
    zeros = VideoTensor(shape.frames(), shape.pixel_height(),
                        shape.pixel_width(), cb.channels(shape));
    input = &zeros;
  }
  const ConditionBundle bundle = make_condition(*input, spec, cb, shape);
  const std::uint32_t class_id = spec.class_label
                                     ? vocab.class_id(*spec.class_label)
                                     : VocabularyLayout::kNoClassId;
  DecodeResult decoded = conditional_decode(
      predictor, task_token_id(spec.kind), class_id, bundle, vocab, config);
  GenerateResult out;
  out.video = decode(decoded.tokens, cb);
  out.tokens = std::move(decoded.tokens);
  out.trace = std::move(decoded.trace);
  return out;
}

}  // namespace maskvid
