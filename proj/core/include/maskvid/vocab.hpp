#pragma once

#include <cstddef>
#include <cstdint>

#include "maskvid/errors.hpp"

namespace maskvid {

// Unified id space for predictor input sequences. One contiguous layout:
//   0            mask
//   1            no-class placeholder
//   2..11        task prompt tokens
//   12..12+C-1   class tokens
//   12+C..       visual tokens, one per codebook entry
// Visual indices (raw codebook ids) and unified ids are distinct domains;
// conversions below are the only crossing points and they bounds-check.
struct VocabularyLayout {
  static constexpr std::uint32_t kMaskId = 0;
  static constexpr std::uint32_t kNoClassId = 1;
  static constexpr std::uint32_t kTaskBase = 2;
  static constexpr std::uint32_t kNumTasks = 10;
  static constexpr std::uint32_t kClassBase = kTaskBase + kNumTasks;

  std::uint32_t n_classes = 0;
  std::uint32_t v_vis = 0;

  std::uint32_t visual_base() const { return kClassBase + n_classes; }
  std::uint32_t total_vocab() const { return visual_base() + v_vis; }

  // Predictor sequence: task token, class slot, then one slot per lattice
  // site.
  std::size_t sequence_length(std::size_t n_tokens) const { return 2 + n_tokens; }

  std::uint32_t class_id(std::uint32_t label) const {
    if (label >= n_classes) throw VocabError("class label out of range");
    return kClassBase + label;
  }

  std::uint32_t visual_id(std::uint32_t index) const {
    if (index >= v_vis) throw VocabError("visual index out of range");
    return visual_base() + index;
  }

  bool is_visual(std::uint32_t id) const {
    return id >= visual_base() && id < total_vocab();
  }

  std::uint32_t visual_index(std::uint32_t id) const {
    if (!is_visual(id)) throw VocabError("id is not a visual token");
    return id - visual_base();
  }
};

}  // namespace maskvid
