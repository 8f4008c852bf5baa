#pragma once

#include <cstdint>
#include <vector>

#include "maskvid/codebook.hpp"
#include "maskvid/grid.hpp"
#include "maskvid/masking.hpp"
#include "maskvid/predictor.hpp"
#include "maskvid/tasks.hpp"
#include "maskvid/video.hpp"

namespace maskvid {

struct DecodeConfig {
  int steps = 12;
  double temperature = 4.5;
  Schedule schedule{ScheduleKind::Cosine};
  std::uint64_t seed = 0;
};

// One snapshot per decoding step.
struct DecodeStep {
  std::vector<std::uint32_t> corrupted;  // unified ids fed to the predictor
  std::vector<std::uint32_t> estimate;   // visual indices after sampling
  std::vector<double> scores;            // confidences after freezing (1 = final)
  Cutoff cutoff;                         // threshold for the next step
  std::size_t n_finalized = 0;
};

struct DecodeTrace {
  std::vector<DecodeStep> steps;
};

struct DecodeResult {
  TokenGrid tokens;
  DecodeTrace trace;
};

// Iterative conditional decoding. Starting from all-maskable state, each step
// re-corrupts the estimate with the condition (conditional_mask), resamples
// every still-maskable position from the predictor, perturbs confidences with
// annealed Gumbel noise, and freezes the least-confident-complement so that
// ceil(gamma((t+1)/K) * N) positions stay maskable. Finalized positions are
// excluded from the maskable set and never resampled.
DecodeResult conditional_decode(const TokenPredictor& predictor,
                                std::uint32_t task_id, std::uint32_t class_id,
                                const ConditionBundle& bundle,
                                const VocabularyLayout& vocab,
                                const DecodeConfig& config);

struct GenerateResult {
  VideoTensor video;
  TokenGrid tokens;
  DecodeTrace trace;
};

// Full task pipeline: build the condition from the input video, decode tokens,
// map them back to pixels. For CG (no pixel condition) input may be null.
GenerateResult generate_video(const VideoTensor* input, const TaskSpec& spec,
                              const Codebook& cb, const GridShape& shape,
                              const TokenPredictor& predictor,
                              const VocabularyLayout& vocab,
                              const DecodeConfig& config);

}  // namespace maskvid
