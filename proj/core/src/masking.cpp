#include "maskvid/masking.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "maskvid/errors.hpp"

namespace maskvid {

std::string_view schedule_name(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Cosine: return "cosine";
    case ScheduleKind::Uniform: return "uniform";
    case ScheduleKind::Exponential: return "exponential";
  }
  return "cosine";
}

ScheduleKind schedule_from_name(std::string_view name) {
  if (name == "cosine") return ScheduleKind::Cosine;
  if (name == "uniform") return ScheduleKind::Uniform;
  if (name == "exponential") return ScheduleKind::Exponential;
  throw ConfigError("unknown schedule '" + std::string(name) +
                    "' (expected cosine, uniform or exponential)");
}

double Schedule::gamma(double r) const {
  if (!(r >= 0.0 && r <= 1.0))
    throw NumericError("schedule ratio outside [0, 1]");
  switch (kind) {
    case ScheduleKind::Cosine:
      // cos(pi/2) is ~6e-17 in floating point; the endpoint must be exact so
      // the final decoding step selects zero positions.
      return r == 1.0 ? 0.0 : std::cos(std::numbers::pi * r / 2.0);
    case ScheduleKind::Uniform:
      return 1.0 - r;
    case ScheduleKind::Exponential:
      return (std::exp(-5.0 * r) - std::exp(-5.0)) / (1.0 - std::exp(-5.0));
  }
  return 0.0;
}

Cutoff cutoff_kth_smallest(std::span<const double> scores, std::size_t k) {
  if (k > scores.size())
    throw DimensionError("cutoff rank exceeds the number of scores");
  if (k == 0) return Cutoff::none();
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::nth_element(order.begin(), order.begin() + (k - 1), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (scores[a] != scores[b]) return scores[a] < scores[b];
                     return a < b;
                   });
  const std::size_t kth = order[k - 1];
  return Cutoff{scores[kth], static_cast<std::int64_t>(kth)};
}

std::size_t mask_count_for_ratio(const Schedule& schedule, double r,
                                 std::size_t n) {
  return static_cast<std::size_t>(
      std::ceil(schedule.gamma(r) * static_cast<double>(n)));
}

std::vector<std::uint32_t> conditional_mask(
    std::span<const std::uint32_t> current, std::span<const std::uint32_t> cond,
    std::span<const std::uint8_t> allpadded, std::span<const double> scores,
    Cutoff cutoff, const VocabularyLayout& vocab) {
  const std::size_t n = current.size();
  if (cond.size() != n || allpadded.size() != n || scores.size() != n)
    throw DimensionError("conditional_mask inputs disagree on length");
  std::vector<std::uint32_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (cutoff.selects(scores[i], i))
      out[i] = allpadded[i] ? VocabularyLayout::kMaskId : vocab.visual_id(cond[i]);
    else
      out[i] = vocab.visual_id(current[i]);
  }
  return out;
}

TrainingMask sample_training_mask(std::size_t n, const Schedule& schedule,
                                  Rng& rng) {
  if (n == 0) throw DimensionError("cannot mask an empty sequence");
  TrainingMask tm;
  const double r = rng.uniform();
  tm.masked_count = mask_count_for_ratio(schedule, r, n);
  tm.scores.resize(n);
  for (double& s : tm.scores) s = rng.uniform();
  tm.cutoff = cutoff_kth_smallest(tm.scores, tm.masked_count);
  return tm;
}

}  // namespace maskvid
