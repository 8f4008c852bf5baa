#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "maskvid/grid.hpp"
#include "maskvid/video.hpp"

namespace maskvid {

// Visual codebook: v_vis centroids over flattened supervoxel blocks.
// dim = block_t * block_h * block_w * channels; centroid values stay in [0, 1]
// because they are means of pixel blocks.
struct Codebook {
  std::uint32_t v_vis = 0;
  std::uint32_t dim = 0;
  std::vector<double> centroids;  // v_vis * dim, row-major

  std::span<const double> centroid(std::uint32_t id) const;
  int channels(const GridShape& shape) const;  // dim / block volume, checked
};

struct FitReport {
  int iterations = 0;
  // Mean squared distance after each assignment pass; non-increasing.
  std::vector<double> distortion_per_iter;
};

struct FitResult {
  Codebook codebook;
  FitReport report;
};

// Lloyd's iterations over all supervoxel blocks of the given videos, with
// farthest-point initialization and deterministic tie-breaking (lowest
// centroid id wins). Empty clusters are reseeded from the points currently
// farthest from their centroids. Throws ConfigError when the videos contain
// fewer than v_vis distinct block vectors.
FitResult fit_codebook(std::span<const VideoTensor> videos,
                       const GridShape& shape, std::uint32_t v_vis,
                       int max_iter);

// Nearest-centroid id per supervoxel, ties to the lowest id.
TokenGrid encode(const VideoTensor& video, const Codebook& cb,
                 const GridShape& shape);

// Paints each supervoxel with its centroid.
VideoTensor decode(const TokenGrid& grid, const Codebook& cb);

// Copies the block under lattice position into out (size cb dim).
void extract_block(const VideoTensor& video, const GridShape& shape,
                   std::size_t position, std::span<double> out);

// Tokenized task condition: tokens for the padded condition video plus a
// per-position flag marking supervoxels that contain no valid pixel at all.
struct ConditionTokens {
  TokenGrid tokens;
  std::vector<std::uint8_t> allpadded;
};

// validity has one entry per voxel of the padded video (t, y, x order).
ConditionTokens encode_condition(const VideoTensor& padded,
                                 std::span<const std::uint8_t> validity,
                                 const Codebook& cb, const GridShape& shape);

}  // namespace maskvid
