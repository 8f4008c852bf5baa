#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "maskvid/codebook.hpp"
#include "maskvid/grid.hpp"
#include "maskvid/predictor.hpp"
#include "maskvid/video.hpp"

namespace maskvid {

// All artifact files are little-endian with a 4-byte magic and u32 version.
//   video    "MGVD": t, h, w, c,        f32 payload
//   tokens   "MGTK": t_lat, h_lat, w_lat, v_vis, u32 payload
//   codebook "MGCB": v_vis, dim,        f32 payload
//   params   "MGPT": v_vis, n, classes, f32 payload (neighbor, positional,
//                                                     task, class order)

void write_video(const std::filesystem::path& path, const VideoTensor& video);
VideoTensor read_video(const std::filesystem::path& path);

// Token files carry lattice extents but not block sizes; callers graft the
// block geometry from their config.
struct TokenFile {
  std::uint32_t t_lat = 0;
  std::uint32_t h_lat = 0;
  std::uint32_t w_lat = 0;
  std::uint32_t v_vis = 0;
  std::vector<std::uint32_t> ids;
};

void write_tokens(const std::filesystem::path& path, const TokenGrid& grid,
                  std::uint32_t v_vis);
TokenFile read_tokens(const std::filesystem::path& path);

void write_codebook(const std::filesystem::path& path, const Codebook& cb);
Codebook read_codebook(const std::filesystem::path& path);

void write_params(const std::filesystem::path& path, const PottsParams& params);
PottsParams read_params(const std::filesystem::path& path);

// Plain CSV sidecars.
void write_labels(const std::filesystem::path& path,
                  std::span<const std::uint32_t> labels);
std::vector<std::uint32_t> read_labels(const std::filesystem::path& path);

void write_loss_curve(const std::filesystem::path& path,
                      std::span<const LossBreakdown> curve);
std::vector<LossBreakdown> read_loss_curve(const std::filesystem::path& path);

void write_fit_report(const std::filesystem::path& path,
                      const FitReport& report);

}  // namespace maskvid
