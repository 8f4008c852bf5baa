#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "maskvid/codebook.hpp"
#include "maskvid/grid.hpp"
#include "maskvid/video.hpp"
#include "maskvid/vocab.hpp"

namespace maskvid {

// The ten generation tasks. Enum order fixes each task's prompt token id.
enum class TaskKind {
  FP,   // frame prediction: first t frames given
  FI,   // frame interpolation: first t1 and last t2 frames given
  OPC,  // outpaint from a centered rectangle
  OPV,  // outpaint from a centered vertical strip
  OPH,  // outpaint from a centered horizontal strip
  OPD,  // outpaint from a vertical strip sweeping left to right
  IPC,  // inpaint a centered rectangle
  IPD,  // inpaint a sweeping rectangle
  CG,   // class-conditional generation, no pixel condition
  CFP,  // class-conditional frame prediction
};

inline constexpr int kTaskCount = 10;

std::string_view task_name(TaskKind kind);
TaskKind task_from_name(std::string_view name);  // throws ConfigError

inline std::uint32_t task_token_id(TaskKind kind) {
  return VocabularyLayout::kTaskBase + static_cast<std::uint32_t>(kind);
}

inline bool task_uses_class(TaskKind kind) {
  return kind == TaskKind::CG || kind == TaskKind::CFP;
}

struct TaskSpec {
  TaskKind kind = TaskKind::FP;
  int t = 1;              // given leading frames (FP, CFP)
  int t1 = 1;             // given leading frames (FI)
  int t2 = 1;             // given trailing frames (FI)
  double h_frac = 0.5;    // condition-box height fraction
  double w_frac = 0.5;    // condition-box width fraction
  std::optional<std::uint32_t> class_label;  // dataset class (CG, CFP)
};

// Per-voxel booleans in (t, y, x) order: 1 where the source video is given.
// Throws ConfigError for parameters that make the region empty (except CG)
// or cover the whole video.
std::vector<std::uint8_t> condition_region(const TaskSpec& spec, int t_frames,
                                           int height, int width);

// Fills the non-condition voxels: frame replication for FP/CFP, per-pixel
// linear interpolation for FI, per-frame nearest-valid-pixel fill for
// OPC/OPV/OPH, zeros for the rest. Valid voxels are copied bit-exactly.
VideoTensor pad_condition(const VideoTensor& video, const TaskSpec& spec,
                          std::span<const std::uint8_t> region);

struct ConditionBundle {
  VideoTensor padded_video;
  std::vector<std::uint8_t> validity;
  TokenGrid cond_tokens;
  std::vector<std::uint8_t> allpadded;
};

ConditionBundle make_condition(const VideoTensor& video, const TaskSpec& spec,
                               const Codebook& cb, const GridShape& shape);

}  // namespace maskvid
