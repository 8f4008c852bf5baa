#include "maskvid/tasks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "maskvid/errors.hpp"

namespace maskvid {

namespace {

constexpr std::array<std::string_view, kTaskCount> kTaskNames = {
    "FP", "FI", "OPC", "OPV", "OPH", "OPD", "IPC", "IPD", "CG", "CFP"};

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

void check_fraction(double f, const char* what) {
  if (!(f > 0.0 && f < 1.0))
    throw ConfigError(std::string(what) + " must lie strictly inside (0, 1)");
}

// Extent and centered offset along one axis for a fractional box size.
struct AxisBox {
  int size;
  int offset;
};

AxisBox centered_box(double frac, int extent, const char* what) {
  check_fraction(frac, what);
  const int size = round_half_up(frac * extent);
  return AxisBox{size, (extent - size) / 2};
}

// Left edge of the sweeping strip at frame tau: linear left-to-right drift
// covering the full travel range over the clip.
int sweep_left_edge(int tau, int t_frames, int width, int strip_w) {
  return round_half_up(static_cast<double>(width - strip_w) * tau /
                       (t_frames - 1));
}

}  // namespace

std::string_view task_name(TaskKind kind) {
  return kTaskNames[static_cast<int>(kind)];
}

TaskKind task_from_name(std::string_view name) {
  for (int i = 0; i < kTaskCount; ++i)
    if (kTaskNames[i] == name) return static_cast<TaskKind>(i);
  throw ConfigError("unknown task name '" + std::string(name) +
                    "' (expected FP, FI, OPC, OPV, OPH, OPD, IPC, IPD, CG or CFP)");
}

std::vector<std::uint8_t> condition_region(const TaskSpec& spec, int t_frames,
                                           int height, int width) {
  if (t_frames <= 0 || height <= 0 || width <= 0)
    throw DimensionError("video extents must be positive");
  const std::size_t total =
      static_cast<std::size_t>(t_frames) * height * width;
  std::vector<std::uint8_t> region(total, 0);
  auto fill_frame = [&](int tau, int y0, int y1, int x0, int x1) {
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x)
        region[(static_cast<std::size_t>(tau) * height + y) * width + x] = 1;
  };

  switch (spec.kind) {
    case TaskKind::FP:
    case TaskKind::CFP: {
      if (spec.t < 0) throw ConfigError("given frame count must be non-negative");
      for (int tau = 0; tau < std::min(spec.t, t_frames); ++tau)
        fill_frame(tau, 0, height, 0, width);
      break;
    }
    case TaskKind::FI: {
      if (spec.t1 < 1 || spec.t2 < 1)
        throw ConfigError("interpolation needs at least one frame on each side");
      for (int tau = 0; tau < std::min(spec.t1, t_frames); ++tau)
        fill_frame(tau, 0, height, 0, width);
      for (int tau = std::max(t_frames - spec.t2, 0); tau < t_frames; ++tau)
        fill_frame(tau, 0, height, 0, width);
      break;
    }
    case TaskKind::OPC: {
      const AxisBox by = centered_box(spec.h_frac, height, "h_frac");
      const AxisBox bx = centered_box(spec.w_frac, width, "w_frac");
      for (int tau = 0; tau < t_frames; ++tau)
        fill_frame(tau, by.offset, by.offset + by.size, bx.offset,
                   bx.offset + bx.size);
      break;
    }
    case TaskKind::OPV: {
      const AxisBox bx = centered_box(spec.w_frac, width, "w_frac");
      for (int tau = 0; tau < t_frames; ++tau)
        fill_frame(tau, 0, height, bx.offset, bx.offset + bx.size);
      break;
    }
    case TaskKind::OPH: {
      const AxisBox by = centered_box(spec.h_frac, height, "h_frac");
      for (int tau = 0; tau < t_frames; ++tau)
        fill_frame(tau, by.offset, by.offset + by.size, 0, width);
      break;
    }
    case TaskKind::OPD: {
      const AxisBox bx = centered_box(spec.w_frac, width, "w_frac");
      if (t_frames < 2)
        throw ConfigError("sweeping tasks need at least two frames");
      for (int tau = 0; tau < t_frames; ++tau) {
        const int x0 = sweep_left_edge(tau, t_frames, width, bx.size);
        fill_frame(tau, 0, height, x0, x0 + bx.size);
      }
      break;
    }
    case TaskKind::IPC: {
      const AxisBox by = centered_box(spec.h_frac, height, "h_frac");
      const AxisBox bx = centered_box(spec.w_frac, width, "w_frac");
      std::fill(region.begin(), region.end(), 1);
      for (int tau = 0; tau < t_frames; ++tau)
        for (int y = by.offset; y < by.offset + by.size; ++y)
          for (int x = bx.offset; x < bx.offset + bx.size; ++x)
            region[(static_cast<std::size_t>(tau) * height + y) * width + x] = 0;
      break;
    }
    case TaskKind::IPD: {
      const AxisBox by = centered_box(spec.h_frac, height, "h_frac");
      const AxisBox bx = centered_box(spec.w_frac, width, "w_frac");
      if (t_frames < 2)
        throw ConfigError("sweeping tasks need at least two frames");
      std::fill(region.begin(), region.end(), 1);
      for (int tau = 0; tau < t_frames; ++tau) {
        const int x0 = sweep_left_edge(tau, t_frames, width, bx.size);
        for (int y = by.offset; y < by.offset + by.size; ++y)
          for (int x = x0; x < x0 + bx.size; ++x)
            region[(static_cast<std::size_t>(tau) * height + y) * width + x] = 0;
      }
      break;
    }
    case TaskKind::CG:
      break;  // no pixel condition
  }

  const std::size_t valid =
      static_cast<std::size_t>(std::count(region.begin(), region.end(), 1));
  if (spec.kind != TaskKind::CG && valid == 0)
    throw ConfigError("task parameters leave an empty condition region");
  if (valid == total)
    throw ConfigError("task parameters leave nothing to generate");
  return region;
}

namespace {

// Nearest valid pixel within one frame: smallest Chebyshev radius first, then
// squared Euclidean distance, then (y, x) order. The search expands box rings
// outward, so the first radius with any valid pixel decides.
void nearest_valid_fill(VideoTensor& out, const VideoTensor& src,
                        std::span<const std::uint8_t> region, int tau) {
  const int h = src.height, w = src.width;
  auto valid = [&](int y, int x) {
    return region[(static_cast<std::size_t>(tau) * h + y) * w + x] != 0;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (valid(y, x)) continue;
      int best_y = -1, best_x = -1;
      long best_d2 = 0;
      auto consider = [&](int yy, int xx) {
        if (yy < 0 || yy >= h || xx < 0 || xx >= w || !valid(yy, xx)) return;
        const long dy = yy - y, dx = xx - x;
        const long d2 = dy * dy + dx * dx;
        if (best_y < 0 || d2 < best_d2 ||
            (d2 == best_d2 && (yy < best_y || (yy == best_y && xx < best_x)))) {
          best_y = yy;
          best_x = xx;
          best_d2 = d2;
        }
      };
      for (int r = 1; r <= h + w && best_y < 0; ++r) {
        for (int xx = x - r; xx <= x + r; ++xx) {
          consider(y - r, xx);
          consider(y + r, xx);
        }
        for (int yy = y - r + 1; yy <= y + r - 1; ++yy) {
          consider(yy, x - r);
          consider(yy, x + r);
        }
      }
      if (best_y < 0)
        throw DimensionError("frame has no valid pixel to pad from");
      for (int c = 0; c < src.channels; ++c)
        out.at(tau, y, x, c) = src.at(tau, best_y, best_x, c);
    }
  }
}

}  // namespace

VideoTensor pad_condition(const VideoTensor& video, const TaskSpec& spec,
                          std::span<const std::uint8_t> region) {
  const std::vector<std::uint8_t> expect =
      condition_region(spec, video.t_frames, video.height, video.width);
  if (region.size() != expect.size() ||
      !std::equal(region.begin(), region.end(), expect.begin()))
    throw DimensionError("condition region does not match the task spec");

  const int T = video.t_frames, H = video.height, W = video.width;
  VideoTensor out(T, H, W, video.channels);
  auto voxel_valid = [&](int t, int y, int x) {
    return region[(static_cast<std::size_t>(t) * H + y) * W + x] != 0;
  };
  for (int t = 0; t < T; ++t)
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x)
        if (voxel_valid(t, y, x))
          for (int c = 0; c < video.channels; ++c)
            out.at(t, y, x, c) = video.at(t, y, x, c);

  switch (spec.kind) {
    case TaskKind::FP:
    case TaskKind::CFP: {
      const int last = spec.t - 1;
      for (int t = spec.t; t < T; ++t)
        for (int y = 0; y < H; ++y)
          for (int x = 0; x < W; ++x)
            for (int c = 0; c < video.channels; ++c)
              out.at(t, y, x, c) = video.at(last, y, x, c);
      break;
    }
    case TaskKind::FI: {
      const int a = spec.t1 - 1;
      const int b = T - spec.t2;
      for (int t = spec.t1; t < b; ++t) {
        const double wb = static_cast<double>(t - a) / (b - a);
        for (int y = 0; y < H; ++y)
          for (int x = 0; x < W; ++x)
            for (int c = 0; c < video.channels; ++c)
              out.at(t, y, x, c) = static_cast<float>(
                  (1.0 - wb) * video.at(a, y, x, c) + wb * video.at(b, y, x, c));
      }
      break;
    }
    case TaskKind::OPC:
    case TaskKind::OPV:
    case TaskKind::OPH: {
      for (int t = 0; t < T; ++t) nearest_valid_fill(out, out, region, t);
      break;
    }
    case TaskKind::OPD:
    case TaskKind::IPC:
    case TaskKind::IPD:
    case TaskKind::CG:
      break;  // invalid voxels stay zero
  }
  return out;
}

ConditionBundle make_condition(const VideoTensor& video, const TaskSpec& spec,
                               const Codebook& cb, const GridShape& shape) {
  if (task_uses_class(spec.kind) && !spec.class_label)
    throw ConfigError("class-conditional tasks require a class label");
  ConditionBundle bundle;
  bundle.validity = condition_region(spec, video.t_frames, video.height,
                                     video.width);
  bundle.padded_video = pad_condition(video, spec, bundle.validity);
  ConditionTokens ct =
      encode_condition(bundle.padded_video, bundle.validity, cb, shape);
  bundle.cond_tokens = std::move(ct.tokens);
  bundle.allpadded = std::move(ct.allpadded);
  return bundle;
}

}  // namespace maskvid
