#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace maskvid {

// Half-open pixel-space box covered by one supervoxel.
struct PixelBox {
  int t0, t1, y0, y1, x0, x1;
};

// Geometry of the token lattice: how a video tiles into non-overlapping
// supervoxel blocks and how lattice coordinates map to flat sequence
// positions. Flattening is time-major: position = (t * h_lat + h) * w_lat + w.
struct GridShape {
  int t_lat = 0;
  int h_lat = 0;
  int w_lat = 0;
  int block_t = 0;
  int block_h = 0;
  int block_w = 0;

  // Throws DimensionError unless each block size divides the matching video
  // extent exactly.
  static GridShape for_video(int t_frames, int height, int width,
                             int block_t, int block_h, int block_w);

  std::size_t n_tokens() const {
    return static_cast<std::size_t>(t_lat) * h_lat * w_lat;
  }
  int frames() const { return t_lat * block_t; }
  int pixel_height() const { return h_lat * block_h; }
  int pixel_width() const { return w_lat * block_w; }
  std::size_t block_volume() const {
    return static_cast<std::size_t>(block_t) * block_h * block_w;
  }

  std::size_t flatten_index(int t, int h, int w) const;  // bounds-checked
  std::array<int, 3> unflatten(std::size_t position) const;
  PixelBox supervoxel_of(std::size_t position) const;

  // Lattice neighbors at offset +-1 along exactly one axis, truncated at the
  // boundary; the position itself is never included. Writes to out, returns
  // the count (up to 6).
  int neighbor_indices(std::size_t position, std::size_t out[6]) const;

  bool operator==(const GridShape&) const = default;
};

// Tokenized video: one visual codebook index in [0, v_vis) per lattice site,
// in flattened order.
struct TokenGrid {
  GridShape shape;
  std::vector<std::uint32_t> ids;
};

}  // namespace maskvid
