#include <benchmark/benchmark.h>

#include "maskvid/codebook.hpp"
#include "maskvid/decoder.hpp"
#include "maskvid/masking.hpp"
#include "maskvid/predictor.hpp"
#include "maskvid/synthetic.hpp"

using namespace maskvid;

namespace {

SyntheticDatasetSpec bench_data_spec(int n_videos) {
  SyntheticDatasetSpec spec;
  spec.n_videos = n_videos;
  spec.seed = 7;
  return spec;
}

struct Fixture {
  GridShape shape = GridShape::for_video(16, 32, 32, 4, 8, 8);
  Dataset ds = gen_synthetic(bench_data_spec(16));
  Codebook cb;
  VocabularyLayout vocab{4, 32};

  Fixture() { cb = fit_codebook(ds.videos, shape, 32, 25).codebook; }
};

Fixture& fix() {
  static Fixture f;
  return f;
}

void BM_EncodeVideo(benchmark::State& state) {
  Fixture& f = fix();
  for (auto _ : state)
    benchmark::DoNotOptimize(encode(f.ds.videos[0], f.cb, f.shape));
}
BENCHMARK(BM_EncodeVideo);

void BM_FitCodebook(benchmark::State& state) {
  Fixture& f = fix();
  for (auto _ : state)
    benchmark::DoNotOptimize(fit_codebook(f.ds.videos, f.shape, 32, 5));
}
BENCHMARK(BM_FitCodebook);

void BM_ConditionalMask(benchmark::State& state) {
  Fixture& f = fix();
  const TokenGrid z = encode(f.ds.videos[0], f.cb, f.shape);
  TaskSpec spec;
  const ConditionBundle bundle = make_condition(f.ds.videos[0], spec, f.cb, f.shape);
  Rng rng(1);
  const TrainingMask tm = sample_training_mask(z.ids.size(), Schedule{}, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(conditional_mask(z.ids, bundle.cond_tokens.ids,
                                              bundle.allpadded, tm.scores,
                                              tm.cutoff, f.vocab));
}
BENCHMARK(BM_ConditionalMask);

void BM_PottsPredict(benchmark::State& state) {
  Fixture& f = fix();
  const TokenGrid z = encode(f.ds.videos[0], f.cb, f.shape);
  PottsPredictor predictor(
      PottsParams::zeros(32, static_cast<std::uint32_t>(f.shape.n_tokens()), 4));
  std::vector<std::uint32_t> corrupted(z.ids.size());
  for (std::size_t i = 0; i < corrupted.size(); ++i)
    corrupted[i] = i % 2 ? f.vocab.visual_id(z.ids[i]) : VocabularyLayout::kMaskId;
  for (auto _ : state)
    benchmark::DoNotOptimize(predictor.predict(
        task_token_id(TaskKind::FP), VocabularyLayout::kNoClassId, corrupted,
        f.shape));
}
BENCHMARK(BM_PottsPredict);

void BM_GradStep(benchmark::State& state) {
  Fixture& f = fix();
  const TokenGrid z = encode(f.ds.videos[0], f.cb, f.shape);
  PottsParams params =
      PottsParams::zeros(32, static_cast<std::uint32_t>(f.shape.n_tokens()), 4);
  TaskSpec spec;
  const ConditionBundle bundle = make_condition(f.ds.videos[0], spec, f.cb, f.shape);
  Rng rng(1);
  const TrainingMask tm = sample_training_mask(z.ids.size(), Schedule{}, rng);
  TrainingExample ex;
  ex.task_id = task_token_id(TaskKind::FP);
  ex.corrupted = conditional_mask(z.ids, bundle.cond_tokens.ids, bundle.allpadded,
                                  tm.scores, tm.cutoff, f.vocab);
  ex.targets = z.ids;
  ex.regions = classify_regions(ex.corrupted, bundle.cond_tokens.ids, f.vocab);
  for (auto _ : state)
    benchmark::DoNotOptimize(grad_step(params, {&ex, 1}, f.shape, 0.1, 1e-4));
}
BENCHMARK(BM_GradStep);

void BM_ConditionalDecode(benchmark::State& state) {
  Fixture& f = fix();
  const TokenGrid z = encode(f.ds.videos[0], f.cb, f.shape);
  const OraclePredictor oracle(z, 32, 0.25);
  TaskSpec spec;
  const ConditionBundle bundle = make_condition(f.ds.videos[0], spec, f.cb, f.shape);
  DecodeConfig cfg;
  cfg.seed = 11;
  for (auto _ : state)
    benchmark::DoNotOptimize(conditional_decode(oracle,
                                                task_token_id(TaskKind::FP),
                                                VocabularyLayout::kNoClassId,
                                                bundle, f.vocab, cfg));
}
BENCHMARK(BM_ConditionalDecode);

}  // namespace

BENCHMARK_MAIN();
