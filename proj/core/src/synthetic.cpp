#include "maskvid/synthetic.hpp"

#include "maskvid/errors.hpp"
#include "maskvid/rng.hpp"

namespace maskvid {

Dataset gen_synthetic(const SyntheticDatasetSpec& spec) {
  if (spec.n_videos < 0) throw ConfigError("n_videos must be non-negative");
  if (spec.t_frames < 1 || spec.height < 1 || spec.width < 1)
    throw ConfigError("video extents must be positive");
  if (spec.rect_h < 1 || spec.rect_w < 1 || spec.rect_h > spec.height ||
      spec.rect_w > spec.width)
    throw ConfigError("rectangle must be non-empty and fit inside the frame");
  if (spec.n_classes < 1 || spec.n_classes > 4)
    throw ConfigError("between 1 and 4 motion classes are supported");
  if (spec.intensity_levels.empty())
    throw ConfigError("at least one intensity level required");
  for (float lv : spec.intensity_levels)
    if (!(lv > 0.0f && lv <= 1.0f))
      throw ConfigError("intensity levels must lie in (0, 1]");

  static constexpr int kDx[4] = {1, -1, 0, 0};
  static constexpr int kDy[4] = {0, 0, 1, -1};

  Rng rng(spec.seed);
  Dataset ds;
  ds.videos.reserve(spec.n_videos);
  ds.labels.reserve(spec.n_videos);
  for (int v = 0; v < spec.n_videos; ++v) {
    const auto label =
        static_cast<std::uint32_t>(rng.below(spec.n_classes));
    const int x0 = static_cast<int>(rng.below(spec.width));
    const int y0 = static_cast<int>(rng.below(spec.height));
    const float level =
        spec.intensity_levels[rng.below(spec.intensity_levels.size())];

    VideoTensor video(spec.t_frames, spec.height, spec.width, 1);
    for (int tau = 0; tau < spec.t_frames; ++tau) {
      const int xt = ((x0 + kDx[label] * tau) % spec.width + spec.width) % spec.width;
      const int yt = ((y0 + kDy[label] * tau) % spec.height + spec.height) % spec.height;
      for (int dy = 0; dy < spec.rect_h; ++dy) {
        const int y = (yt + dy) % spec.height;
        for (int dx = 0; dx < spec.rect_w; ++dx)
          video.at(tau, y, (xt + dx) % spec.width) = level;
      }
    }
    ds.videos.push_back(std::move(video));
    ds.labels.push_back(label);
  }
  return ds;
}

}  // namespace maskvid
