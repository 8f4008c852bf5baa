#pragma once

#include <cstdint>
#include <span>

#include "maskvid/grid.hpp"
#include "maskvid/video.hpp"

namespace maskvid {

// Fraction of matching ids. A non-empty region mask restricts the count to
// positions where region != 0.
double token_accuracy(const TokenGrid& pred, const TokenGrid& truth,
                      std::span<const std::uint8_t> region = {});

// 10 * log10(1 / MSE) on the [0,1] value range, capped at 99 dB.
double psnr(const VideoTensor& a, const VideoTensor& b);

}  // namespace maskvid
