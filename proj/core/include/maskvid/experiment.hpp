#pragma once

#include <filesystem>
#include <vector>

#include "maskvid/codebook.hpp"
#include "maskvid/predictor.hpp"
#include "maskvid/run_config.hpp"
#include "maskvid/synthetic.hpp"
#include "maskvid/tasks.hpp"

namespace maskvid {

struct TaskEval {
  TaskKind task = TaskKind::FP;
  double accuracy = 0.0;  // mean token accuracy over held-out videos
  double psnr_db = 0.0;   // mean PSNR against the source videos
};

struct EvalReport {
  std::vector<TaskEval> tasks;
  std::vector<LossBreakdown> loss_curve;
  // Reported on stdout and in timing.txt only; report.txt stays byte-identical
  // across reruns.
  double wall_clock_seconds = 0.0;
};

// Stage entry points. Each stage reads its inputs from out_dir and persists
// its outputs there, so running stages one by one equals one full run.
//   gen-data       -> data/video_NNNN.mgvd, data/labels.csv
//   fit-tokenizer  -> codebook.mgcb, fit_report.csv
//   train          -> predictor.mgpt, loss_curve.csv
//   evaluate       -> report.txt
void stage_gen_data(const RunConfig& cfg, const std::filesystem::path& out_dir);
FitReport stage_fit_tokenizer(const RunConfig& cfg,
                              const std::filesystem::path& out_dir);
std::vector<LossBreakdown> stage_train(const RunConfig& cfg,
                                       const std::filesystem::path& out_dir);
EvalReport stage_evaluate(const RunConfig& cfg,
                          const std::filesystem::path& out_dir);

// All four stages plus timing.txt.
EvalReport run_experiment(const RunConfig& cfg,
                          const std::filesystem::path& out_dir);

// Shared helpers.
Dataset load_dataset(const std::filesystem::path& out_dir);
std::filesystem::path data_dir(const std::filesystem::path& out_dir);

}  // namespace maskvid
