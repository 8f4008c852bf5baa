#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "maskvid/decoder.hpp"
#include "maskvid/grid.hpp"
#include "maskvid/kvconfig.hpp"
#include "maskvid/masking.hpp"
#include "maskvid/predictor.hpp"
#include "maskvid/synthetic.hpp"
#include "maskvid/tasks.hpp"
#include "maskvid/vocab.hpp"

namespace maskvid {

enum class PredictorKind { Potts, Oracle };

// Everything a full experiment needs; defaults are the desk-scale setup
// (16x32x32 videos, 4x4x4 token lattice, 32 visual ids, 4 motion classes).
struct RunConfig {
  std::uint64_t seed = 0;

  // dataset
  int n_train = 64;
  int n_eval = 100;
  SyntheticDatasetSpec data;  // n_videos/seed filled from the fields above

  // tokenizer
  std::uint32_t v_vis = 32;
  int block_t = 4;
  int block_h = 8;
  int block_w = 8;
  int max_iter = 25;

  // predictor
  PredictorKind predictor_kind = PredictorKind::Potts;
  double oracle_epsilon = 0.0;
  double learning_rate = 1.0;
  int epochs = 100;
  double label_smoothing = 1e-4;
  Schedule train_schedule{ScheduleKind::Cosine};

  // decoding
  DecodeConfig decode;

  // evaluation task set and shared task geometry
  std::vector<TaskKind> task_set = {
      TaskKind::FP,  TaskKind::FI,  TaskKind::OPC, TaskKind::OPV,
      TaskKind::OPH, TaskKind::OPD, TaskKind::IPC, TaskKind::IPD,
      TaskKind::CG,  TaskKind::CFP};
  TaskSpec task;  // kind + geometry for the `generate` subcommand

  static RunConfig defaults() { return RunConfig{}; }
  static RunConfig from_kv(const KeyValueFile& kv);
  static RunConfig from_file(const std::filesystem::path& path);
  KeyValueFile to_kv() const;

  void validate() const;  // throws ConfigError
  GridShape grid_shape() const;
  VocabularyLayout vocab() const;
  TaskSpec task_for(TaskKind kind,
                    std::optional<std::uint32_t> class_label) const;

  // Stage sub-seeds, decoupled so rerunning one stage never shifts another.
  std::uint64_t data_seed() const { return derive_seed(seed, 1); }
  std::uint64_t train_seed() const { return derive_seed(seed, 2); }
  std::uint64_t decode_seed() const { return derive_seed(seed, 3); }
};

}  // namespace maskvid
