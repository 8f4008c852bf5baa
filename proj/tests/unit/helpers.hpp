#pragma once

#include <cstdint>
#include <vector>

#include "maskvid/codebook.hpp"
#include "maskvid/grid.hpp"
#include "maskvid/rng.hpp"
#include "maskvid/video.hpp"

namespace maskvid::test {

inline VideoTensor random_video(Rng& rng, int t, int h, int w, int c = 1) {
  VideoTensor v(t, h, w, c);
  for (float& x : v.data) x = static_cast<float>(rng.uniform());
  return v;
}

// Small dataset rich enough to fit a codebook of the given size.
inline std::vector<VideoTensor> random_videos(std::uint64_t seed, int n, int t,
                                              int h, int w, int c = 1) {
  Rng rng(seed);
  std::vector<VideoTensor> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(random_video(rng, t, h, w, c));
  return out;
}

}  // namespace maskvid::test
