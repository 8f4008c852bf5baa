#pragma once

#include <cstdint>
#include <vector>

#include "maskvid/video.hpp"

namespace maskvid {

// Moving-rectangle clips: background 0, one constant-intensity rectangle per
// video drifting 1 pixel per frame, wrapping at the borders. The class label
// is the motion direction: 0 right, 1 left, 2 down, 3 up.
struct SyntheticDatasetSpec {
  int n_videos = 0;
  int t_frames = 16;
  int height = 32;
  int width = 32;
  int n_classes = 4;
  int rect_h = 8;
  int rect_w = 8;
  std::vector<float> intensity_levels = {0.4f, 0.7f, 1.0f};
  std::uint64_t seed = 0;
};

struct Dataset {
  std::vector<VideoTensor> videos;
  std::vector<std::uint32_t> labels;
};

Dataset gen_synthetic(const SyntheticDatasetSpec& spec);

}  // namespace maskvid
