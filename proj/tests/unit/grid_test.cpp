#include <limits>
#include <set>
#include <vector>

#include "doctest.h"
#include "maskvid/errors.hpp"
#include "maskvid/grid.hpp"
#include "maskvid/video.hpp"

using namespace maskvid;

TEST_CASE("for_video derives the lattice from the block sizes") {
  const GridShape s = GridShape::for_video(16, 32, 32, 4, 8, 8);
  CHECK(s.t_lat == 4);
  CHECK(s.h_lat == 4);
  CHECK(s.w_lat == 4);
  CHECK(s.n_tokens() == 64);
  CHECK(s.frames() == 16);
  CHECK(s.pixel_height() == 32);
  CHECK(s.pixel_width() == 32);
  CHECK(s.block_volume() == 256);
}

TEST_CASE("for_video rejects bad geometry") {
  CHECK_THROWS_AS(GridShape::for_video(16, 32, 32, 5, 8, 8), DimensionError);
  CHECK_THROWS_AS(GridShape::for_video(16, 32, 32, 4, 7, 8), DimensionError);
  CHECK_THROWS_AS(GridShape::for_video(16, 32, 32, 0, 8, 8), DimensionError);
  CHECK_THROWS_AS(GridShape::for_video(16, 32, 32, -4, 8, 8), DimensionError);
  CHECK_THROWS_AS(GridShape::for_video(0, 32, 32, 4, 8, 8), DimensionError);
}

TEST_CASE("flattening is time-major") {
  const GridShape s = GridShape::for_video(16, 32, 32, 4, 8, 8);
  CHECK(s.flatten_index(0, 0, 0) == 0);
  CHECK(s.flatten_index(0, 0, 1) == 1);
  CHECK(s.flatten_index(0, 1, 0) == 4);
  CHECK(s.flatten_index(1, 0, 0) == 16);
  CHECK(s.flatten_index(3, 3, 3) == 63);
}

TEST_CASE("flatten and unflatten are inverse bijections") {
  for (const GridShape s : {GridShape::for_video(16, 32, 32, 4, 8, 8),
                            GridShape::for_video(4, 16, 16, 1, 1, 1),
                            GridShape::for_video(3, 5, 7, 1, 1, 1)}) {
    std::set<std::size_t> seen;
    for (int t = 0; t < s.t_lat; ++t)
      for (int h = 0; h < s.h_lat; ++h)
        for (int w = 0; w < s.w_lat; ++w) {
          const std::size_t p = s.flatten_index(t, h, w);
          REQUIRE(p < s.n_tokens());
          seen.insert(p);
          const auto [tt, hh, ww] = s.unflatten(p);
          REQUIRE(tt == t);
          REQUIRE(hh == h);
          REQUIRE(ww == w);
        }
    CHECK(seen.size() == s.n_tokens());
  }
}

TEST_CASE("coordinate bounds are enforced") {
  const GridShape s = GridShape::for_video(16, 32, 32, 4, 8, 8);
  CHECK_THROWS_AS(s.flatten_index(-1, 0, 0), DimensionError);
  CHECK_THROWS_AS(s.flatten_index(4, 0, 0), DimensionError);
  CHECK_THROWS_AS(s.flatten_index(0, 4, 0), DimensionError);
  CHECK_THROWS_AS(s.flatten_index(0, 0, 4), DimensionError);
  CHECK_THROWS_AS(s.unflatten(64), DimensionError);
}

TEST_CASE("supervoxels tile the video exactly once") {
  const GridShape s = GridShape::for_video(4, 4, 4, 2, 2, 2);
  std::vector<int> cover(4 * 4 * 4, 0);
  for (std::size_t p = 0; p < s.n_tokens(); ++p) {
    const PixelBox b = s.supervoxel_of(p);
    for (int t = b.t0; t < b.t1; ++t)
      for (int y = b.y0; y < b.y1; ++y)
        for (int x = b.x0; x < b.x1; ++x)
          ++cover[(static_cast<std::size_t>(t) * 4 + y) * 4 + x];
  }
  for (int c : cover) CHECK(c == 1);
}

TEST_CASE("supervoxel boxes scale with the block sizes") {
  const GridShape s = GridShape::for_video(16, 32, 32, 4, 8, 8);
  const PixelBox b = s.supervoxel_of(s.flatten_index(1, 2, 3));
  CHECK(b.t0 == 4);
  CHECK(b.t1 == 8);
  CHECK(b.y0 == 16);
  CHECK(b.y1 == 24);
  CHECK(b.x0 == 24);
  CHECK(b.x1 == 32);
}

TEST_CASE("neighbor order is t-, t+, h-, h+, w-, w+") {
  const GridShape s = GridShape::for_video(3, 3, 3, 1, 1, 1);
  std::size_t nb[6];
  const int n = s.neighbor_indices(s.flatten_index(1, 1, 1), nb);
  REQUIRE(n == 6);
  CHECK(nb[0] == s.flatten_index(0, 1, 1));
  CHECK(nb[1] == s.flatten_index(2, 1, 1));
  CHECK(nb[2] == s.flatten_index(1, 0, 1));
  CHECK(nb[3] == s.flatten_index(1, 2, 1));
  CHECK(nb[4] == s.flatten_index(1, 1, 0));
  CHECK(nb[5] == s.flatten_index(1, 1, 2));
}

TEST_CASE("corner and degenerate lattices truncate the neighbor list") {
  const GridShape cube = GridShape::for_video(2, 2, 2, 1, 1, 1);
  std::size_t nb[6];
  CHECK(cube.neighbor_indices(0, nb) == 3);
  CHECK(nb[0] == cube.flatten_index(1, 0, 0));
  CHECK(nb[1] == cube.flatten_index(0, 1, 0));
  CHECK(nb[2] == cube.flatten_index(0, 0, 1));

  const GridShape point = GridShape::for_video(1, 1, 1, 1, 1, 1);
  CHECK(point.neighbor_indices(0, nb) == 0);
}

TEST_CASE("neighborhood is symmetric and never contains the position") {
  const GridShape s = GridShape::for_video(4, 4, 4, 1, 1, 1);
  std::size_t nb[6], back[6];
  for (std::size_t p = 0; p < s.n_tokens(); ++p) {
    const int n = s.neighbor_indices(p, nb);
    for (int j = 0; j < n; ++j) {
      REQUIRE(nb[j] != p);
      const int m = s.neighbor_indices(nb[j], back);
      bool found = false;
      for (int k = 0; k < m; ++k) found = found || back[k] == p;
      REQUIRE(found);
    }
  }
}

TEST_CASE("video validation rejects bad buffers and values") {
  VideoTensor v(2, 3, 4, 1);
  v.validate();
  v.at(1, 2, 3) = 1.0f;
  v.validate();

  VideoTensor bad_size = v;
  bad_size.data.pop_back();
  CHECK_THROWS_AS(bad_size.validate(), DimensionError);

  VideoTensor bad_val = v;
  bad_val.at(0, 0, 0) = 1.5f;
  CHECK_THROWS_AS(bad_val.validate(), NumericError);
  bad_val.at(0, 0, 0) = -0.1f;
  CHECK_THROWS_AS(bad_val.validate(), NumericError);
  bad_val.at(0, 0, 0) = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(bad_val.validate(), NumericError);
}
