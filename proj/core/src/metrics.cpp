#include "maskvid/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "maskvid/errors.hpp"

namespace maskvid {

double token_accuracy(const TokenGrid& pred, const TokenGrid& truth,
                      std::span<const std::uint8_t> region) {
  if (!(pred.shape == truth.shape) || pred.ids.size() != truth.ids.size())
    throw DimensionError("token grids disagree on shape");
  if (!region.empty() && region.size() != pred.ids.size())
    throw DimensionError("region mask size mismatch");
  std::size_t considered = 0, equal = 0;
  for (std::size_t i = 0; i < pred.ids.size(); ++i) {
    if (!region.empty() && !region[i]) continue;
    ++considered;
    equal += pred.ids[i] == truth.ids[i];
  }
  if (considered == 0) throw DimensionError("empty evaluation region");
  return static_cast<double>(equal) / static_cast<double>(considered);
}

double psnr(const VideoTensor& a, const VideoTensor& b) {
  if (!a.same_shape(b) || a.data.size() != b.data.size())
    throw DimensionError("videos disagree on shape");
  if (a.data.empty()) throw DimensionError("empty video");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - b.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.data.size());
  if (mse == 0.0) return 99.0;
  return std::min(99.0, 10.0 * std::log10(1.0 / mse));
}

}  // namespace maskvid
