#include "maskvid/grid.hpp"

#include "maskvid/errors.hpp"

namespace maskvid {

GridShape GridShape::for_video(int t_frames, int height, int width,
                               int block_t, int block_h, int block_w) {
  if (block_t <= 0 || block_h <= 0 || block_w <= 0)
    throw DimensionError("block sizes must be positive");
  if (t_frames <= 0 || height <= 0 || width <= 0)
    throw DimensionError("video extents must be positive");
  if (t_frames % block_t || height % block_h || width % block_w)
    throw DimensionError("block sizes must divide the video extents exactly");
  return GridShape{t_frames / block_t, height / block_h, width / block_w,
                   block_t,            block_h,          block_w};
}

std::size_t GridShape::flatten_index(int t, int h, int w) const {
  if (t < 0 || t >= t_lat || h < 0 || h >= h_lat || w < 0 || w >= w_lat)
    throw DimensionError("lattice coordinate out of range");
  return (static_cast<std::size_t>(t) * h_lat + h) * w_lat + w;
}

std::array<int, 3> GridShape::unflatten(std::size_t position) const {
  if (position >= n_tokens())
    throw DimensionError("lattice position out of range");
  const int w = static_cast<int>(position % w_lat);
  const int h = static_cast<int>((position / w_lat) % h_lat);
  const int t = static_cast<int>(position / (static_cast<std::size_t>(w_lat) * h_lat));
  return {t, h, w};
}

PixelBox GridShape::supervoxel_of(std::size_t position) const {
  const auto [t, h, w] = unflatten(position);
  return PixelBox{t * block_t, (t + 1) * block_t, h * block_h,
                  (h + 1) * block_h, w * block_w, (w + 1) * block_w};
}

int GridShape::neighbor_indices(std::size_t position, std::size_t out[6]) const {
  const auto [t, h, w] = unflatten(position);
  int n = 0;
  if (t > 0) out[n++] = flatten_index(t - 1, h, w);
  if (t + 1 < t_lat) out[n++] = flatten_index(t + 1, h, w);
  if (h > 0) out[n++] = flatten_index(t, h - 1, w);
  if (h + 1 < h_lat) out[n++] = flatten_index(t, h + 1, w);
  if (w > 0) out[n++] = flatten_index(t, h, w - 1);
  if (w + 1 < w_lat) out[n++] = flatten_index(t, h, w + 1);
  return n;
}

}  // namespace maskvid
