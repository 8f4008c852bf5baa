#include "maskvid/video.hpp"

#include <cmath>

#include "maskvid/errors.hpp"

namespace maskvid {

VideoTensor::VideoTensor(int t, int h, int w, int c)
    : t_frames(t), height(h), width(w), channels(c) {
  if (t < 0 || h < 0 || w < 0 || c < 1)
    throw DimensionError("video shape must be non-negative with >= 1 channel");
  data.assign(static_cast<std::size_t>(t) * h * w * c, 0.0f);
}

void VideoTensor::validate() const {
  const std::size_t want =
      static_cast<std::size_t>(t_frames) * height * width * channels;
  if (data.size() != want)
    throw DimensionError("video buffer size does not match declared shape");
  for (float v : data) {
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
      throw NumericError("video value outside [0, 1]");
  }
}

}  // namespace maskvid
