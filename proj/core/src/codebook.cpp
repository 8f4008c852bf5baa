#include "maskvid/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "maskvid/errors.hpp"

namespace maskvid {

namespace {

void check_video_shape(const VideoTensor& v, const GridShape& s) {
  if (v.t_frames != s.frames() || v.height != s.pixel_height() ||
      v.width != s.pixel_width())
    throw DimensionError("video extents do not match lattice geometry");
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

// Nearest centroid by squared distance, ties to the lowest id.
std::uint32_t nearest_centroid(std::span<const double> point,
                               const Codebook& cb) {
  std::uint32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::uint32_t c = 0; c < cb.v_vis; ++c) {
    const double d = sq_dist(point, cb.centroid(c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::vector<double> collect_blocks(std::span<const VideoTensor> videos,
                                   const GridShape& shape, std::size_t dim) {
  std::vector<double> blocks;
  blocks.reserve(videos.size() * shape.n_tokens() * dim);
  std::vector<double> tmp(dim);
  for (const VideoTensor& v : videos) {
    check_video_shape(v, shape);
    for (std::size_t p = 0; p < shape.n_tokens(); ++p) {
      extract_block(v, shape, p, tmp);
      blocks.insert(blocks.end(), tmp.begin(), tmp.end());
    }
  }
  return blocks;
}

std::size_t count_distinct(const std::vector<double>& blocks, std::size_t dim) {
  const std::size_t n = dim ? blocks.size() / dim : 0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto row = [&](std::size_t i) {
    return std::span<const double>(blocks.data() + i * dim, dim);
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = row(a), rb = row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(),
                                        rb.end());
  });
  std::size_t distinct = n ? 1 : 0;
  for (std::size_t i = 1; i < n; ++i) {
    const auto prev = row(order[i - 1]), cur = row(order[i]);
    if (!std::equal(prev.begin(), prev.end(), cur.begin())) ++distinct;
  }
  return distinct;
}

// Farthest-point seeding: start from the point farthest from the data mean,
// then repeatedly take the point with the largest distance to its nearest
// chosen seed. Ties resolve to the smallest point index.
std::vector<std::size_t> farthest_point_seeds(const std::vector<double>& blocks,
                                              std::size_t dim,
                                              std::uint32_t v_vis) {
  const std::size_t n = blocks.size() / dim;
  auto row = [&](std::size_t i) {
    return std::span<const double>(blocks.data() + i * dim, dim);
  };

  std::vector<double> mean(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = row(i);
    for (std::size_t d = 0; d < dim; ++d) mean[d] += r[d];
  }
  for (double& m : mean) m /= static_cast<double>(n);

  std::vector<std::size_t> seeds;
  seeds.reserve(v_vis);
  std::size_t first = 0;
  double first_d = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = sq_dist(row(i), mean);
    if (d > first_d) {
      first_d = d;
      first = i;
    }
  }
  seeds.push_back(first);

  std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
  while (seeds.size() < v_vis) {
    const auto last = row(seeds.back());
    std::size_t next = 0;
    double next_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      min_d[i] = std::min(min_d[i], sq_dist(row(i), last));
      if (min_d[i] > next_d) {
        next_d = min_d[i];
        next = i;
      }
    }
    seeds.push_back(next);
  }
  return seeds;
}

}  // namespace

std::span<const double> Codebook::centroid(std::uint32_t id) const {
  if (id >= v_vis) throw VocabError("centroid id out of range");
  return {centroids.data() + static_cast<std::size_t>(id) * dim, dim};
}

int Codebook::channels(const GridShape& shape) const {
  const std::size_t vol = shape.block_volume();
  if (vol == 0 || dim % vol)
    throw DimensionError("codebook dim is not a multiple of the block volume");
  return static_cast<int>(dim / vol);
}

void extract_block(const VideoTensor& video, const GridShape& shape,
                   std::size_t position, std::span<double> out) {
  const PixelBox box = shape.supervoxel_of(position);
  const std::size_t want = shape.block_volume() * video.channels;
  if (out.size() != want)
    throw DimensionError("block buffer size mismatch");
  std::size_t k = 0;
  for (int t = box.t0; t < box.t1; ++t)
    for (int y = box.y0; y < box.y1; ++y)
      for (int x = box.x0; x < box.x1; ++x)
        for (int c = 0; c < video.channels; ++c)
          out[k++] = video.at(t, y, x, c);
}

FitResult fit_codebook(std::span<const VideoTensor> videos,
                       const GridShape& shape, std::uint32_t v_vis,
                       int max_iter) {
  if (v_vis == 0) throw ConfigError("codebook size must be positive");
  if (max_iter <= 0) throw ConfigError("codebook max_iter must be positive");
  const int channels = videos.empty() ? 1 : videos.front().channels;
  for (const VideoTensor& v : videos)
    if (v.channels != channels)
      throw DimensionError("videos disagree on channel count");
  const std::size_t dim = shape.block_volume() * channels;

  const std::vector<double> blocks = collect_blocks(videos, shape, dim);
  const std::size_t n = blocks.size() / (dim ? dim : 1);
  if (count_distinct(blocks, dim) < v_vis)
    throw ConfigError("not enough distinct supervoxel blocks to fill the codebook");

  auto row = [&](std::size_t i) {
    return std::span<const double>(blocks.data() + i * dim, dim);
  };

  Codebook cb;
  cb.v_vis = v_vis;
  cb.dim = static_cast<std::uint32_t>(dim);
  cb.centroids.resize(static_cast<std::size_t>(v_vis) * dim);
  const std::vector<std::size_t> seeds = farthest_point_seeds(blocks, dim, v_vis);
  for (std::uint32_t c = 0; c < v_vis; ++c) {
    const auto r = row(seeds[c]);
    std::copy(r.begin(), r.end(), cb.centroids.begin() + static_cast<std::size_t>(c) * dim);
  }

  FitReport report;
  std::vector<std::uint32_t> assign(n), prev_assign;
  for (int iter = 0; iter < max_iter; ++iter) {
    double distortion = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      assign[i] = nearest_centroid(row(i), cb);
      distortion += sq_dist(row(i), cb.centroid(assign[i]));
    }
    report.distortion_per_iter.push_back(distortion / static_cast<double>(n));
    report.iterations = iter + 1;
    if (assign == prev_assign) break;
    prev_assign = assign;

    std::vector<double> sums(cb.centroids.size(), 0.0);
    std::vector<std::size_t> counts(v_vis, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = row(i);
      double* s = sums.data() + static_cast<std::size_t>(assign[i]) * dim;
      for (std::size_t d = 0; d < dim; ++d) s[d] += r[d];
      ++counts[assign[i]];
    }
    for (std::uint32_t c = 0; c < v_vis; ++c) {
      if (!counts[c]) continue;
      for (std::size_t d = 0; d < dim; ++d)
        cb.centroids[static_cast<std::size_t>(c) * dim + d] =
            sums[static_cast<std::size_t>(c) * dim + d] / static_cast<double>(counts[c]);
    }

    // Reseed empty clusters from the points that currently sit farthest from
    // their assigned centroid, one point per empty cluster.
    std::vector<std::uint32_t> empty;
    for (std::uint32_t c = 0; c < v_vis; ++c)
      if (!counts[c]) empty.push_back(c);
    if (!empty.empty()) {
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::vector<double> dist(n);
      for (std::size_t i = 0; i < n; ++i)
        dist[i] = sq_dist(row(i), cb.centroid(assign[i]));
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) return dist[a] > dist[b];
        return a < b;
      });
      for (std::size_t e = 0; e < empty.size(); ++e) {
        const auto r = row(order[e]);
        std::copy(r.begin(), r.end(),
                  cb.centroids.begin() + static_cast<std::size_t>(empty[e]) * dim);
      }
    }
  }
  return FitResult{std::move(cb), std::move(report)};
}

TokenGrid encode(const VideoTensor& video, const Codebook& cb,
                 const GridShape& shape) {
  check_video_shape(video, shape);
  if (cb.dim != shape.block_volume() * video.channels)
    throw DimensionError("codebook dim does not match block volume");
  TokenGrid grid;
  grid.shape = shape;
  grid.ids.resize(shape.n_tokens());
  std::vector<double> tmp(cb.dim);
  for (std::size_t p = 0; p < shape.n_tokens(); ++p) {
    extract_block(video, shape, p, tmp);
    grid.ids[p] = nearest_centroid(tmp, cb);
  }
  return grid;
}

VideoTensor decode(const TokenGrid& grid, const Codebook& cb) {
  const GridShape& s = grid.shape;
  if (grid.ids.size() != s.n_tokens())
    throw DimensionError("token grid size does not match its shape");
  const int channels = cb.channels(s);
  VideoTensor out(s.frames(), s.pixel_height(), s.pixel_width(), channels);
  for (std::size_t p = 0; p < s.n_tokens(); ++p) {
    const auto c = cb.centroid(grid.ids[p]);
    const PixelBox box = s.supervoxel_of(p);
    std::size_t k = 0;
    for (int t = box.t0; t < box.t1; ++t)
      for (int y = box.y0; y < box.y1; ++y)
        for (int x = box.x0; x < box.x1; ++x)
          for (int ch = 0; ch < channels; ++ch)
            out.at(t, y, x, ch) = static_cast<float>(c[k++]);
  }
  return out;
}

ConditionTokens encode_condition(const VideoTensor& padded,
                                 std::span<const std::uint8_t> validity,
                                 const Codebook& cb, const GridShape& shape) {
  check_video_shape(padded, shape);
  const std::size_t voxels = static_cast<std::size_t>(padded.t_frames) *
                             padded.height * padded.width;
  if (validity.size() != voxels)
    throw DimensionError("validity mask size does not match video voxels");

  ConditionTokens out;
  out.tokens = encode(padded, cb, shape);
  out.allpadded.assign(shape.n_tokens(), 1);
  for (std::size_t p = 0; p < shape.n_tokens(); ++p) {
    const PixelBox box = shape.supervoxel_of(p);
    for (int t = box.t0; t < box.t1 && out.allpadded[p]; ++t)
      for (int y = box.y0; y < box.y1 && out.allpadded[p]; ++y)
        for (int x = box.x0; x < box.x1; ++x) {
          const std::size_t v =
              (static_cast<std::size_t>(t) * padded.height + y) * padded.width + x;
          if (validity[v]) {
            out.allpadded[p] = 0;
            break;
          }
        }
  }
  return out;
}

}  // namespace maskvid
