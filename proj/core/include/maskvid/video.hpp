#pragma once

#include <cstddef>
#include <vector>

namespace maskvid {

// Dense pixel video, values in [0, 1], stored row-major as
// (frame, row, column, channel).
struct VideoTensor {
  int t_frames = 0;
  int height = 0;
  int width = 0;
  int channels = 1;
  std::vector<float> data;

  VideoTensor() = default;
  VideoTensor(int t, int h, int w, int c = 1);

  std::size_t size() const { return data.size(); }

  std::size_t index(int t, int y, int x, int c = 0) const {
    return ((static_cast<std::size_t>(t) * height + y) * width + x) * channels + c;
  }

  float& at(int t, int y, int x, int c = 0) { return data[index(t, y, x, c)]; }
  float at(int t, int y, int x, int c = 0) const { return data[index(t, y, x, c)]; }

  bool same_shape(const VideoTensor& other) const {
    return t_frames == other.t_frames && height == other.height &&
           width == other.width && channels == other.channels;
  }

  // Throws DimensionError if the buffer size disagrees with the declared
  // shape, NumericError if any value is non-finite or outside [0, 1].
  void validate() const;
};

}  // namespace maskvid
