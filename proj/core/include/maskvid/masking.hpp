#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "maskvid/rng.hpp"
#include "maskvid/vocab.hpp"

namespace maskvid {

enum class ScheduleKind { Cosine, Uniform, Exponential };

std::string_view schedule_name(ScheduleKind kind);
ScheduleKind schedule_from_name(std::string_view name);  // throws ConfigError

// Remaining-mask fraction gamma(r) for progress ratio r in [0, 1]:
// gamma(0) = 1, gamma(1) = 0, monotone non-increasing.
struct Schedule {
  ScheduleKind kind = ScheduleKind::Cosine;
  double gamma(double r) const;
};

// Mask-selection threshold over (score, position) pairs, ordered
// lexicographically so duplicate scores resolve by position. A position is
// selected (remains maskable) when (score, index) <= (cutoff.score,
// cutoff.index).
struct Cutoff {
  double score = -std::numeric_limits<double>::infinity();
  std::int64_t index = -1;

  static Cutoff none() { return Cutoff{}; }  // selects nothing
  static Cutoff all() {
    return Cutoff{std::numeric_limits<double>::infinity(),
                  std::numeric_limits<std::int64_t>::max()};
  }
  static Cutoff threshold(double s) {
    return Cutoff{s, std::numeric_limits<std::int64_t>::max()};
  }

  bool selects(double s, std::size_t i) const {
    return s < score || (s == score && static_cast<std::int64_t>(i) <= index);
  }

  bool operator==(const Cutoff&) const = default;
};

// The (score, index) pair such that exactly k positions are selected; k = 0
// yields the none() sentinel. Throws DimensionError when k > scores.size().
Cutoff cutoff_kth_smallest(std::span<const double> scores, std::size_t k);

// Number of positions kept maskable at progress ratio r: ceil(gamma(r) * n).
std::size_t mask_count_for_ratio(const Schedule& schedule, double r,
                                 std::size_t n);

// Three-case conditional corruption. Per position i:
//   selected and condition pixels present -> condition token
//   selected and all-padding supervoxel   -> mask id
//   not selected                          -> current token
// current/cond hold visual indices; the result holds unified ids.
std::vector<std::uint32_t> conditional_mask(
    std::span<const std::uint32_t> current, std::span<const std::uint32_t> cond,
    std::span<const std::uint8_t> allpadded, std::span<const double> scores,
    Cutoff cutoff, const VocabularyLayout& vocab);

struct TrainingMask {
  std::vector<double> scores;
  Cutoff cutoff;
  std::size_t masked_count = 0;
};

// Training-time corruption draw: mask ratio gamma(r) with r ~ Uniform[0,1),
// i.i.d. uniform scores, and the cutoff selecting exactly
// ceil(gamma(r) * n) positions.
TrainingMask sample_training_mask(std::size_t n, const Schedule& schedule,
                                  Rng& rng);

}  // namespace maskvid
