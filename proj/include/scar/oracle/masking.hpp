/*
 * Copyright 2026 The scar Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "scar/error.hpp"
#include "scar/game/coalition.hpp"
#include "scar/segmentation/segment.hpp"

namespace scar::oracle {

// How an incomplete coalition is turned into text for the scorer.
//   space_fill: excluded units are overwritten in place by the filler, one
//               filler byte per source byte, so included text keeps its offsets.
//   concat:     included units joined in order with single spaces.
struct MaskingMode {
  enum class Kind { kSpaceFill, kConcat };

  Kind kind = Kind::kSpaceFill;
  char filler = ' ';

  static MaskingMode space_fill(char filler = ' ') {
    require(static_cast<unsigned char>(filler) < 0x80 && filler != '\0',
            ErrorKind::kInvalidArgument, "filler must be a single ASCII character");
    return MaskingMode{Kind::kSpaceFill, filler};
  }
  static MaskingMode concat() { return MaskingMode{Kind::kConcat, ' '}; }
};

inline std::string_view to_string(MaskingMode::Kind k) {
  return k == MaskingMode::Kind::kSpaceFill ? "space_fill" : "concat";
}

inline MaskingMode masking_from_string(std::string_view s, char filler = ' ') {
  if (s == "space_fill") return MaskingMode::space_fill(filler);
  if (s == "concat") return MaskingMode::concat();
  fail(ErrorKind::kInvalidArgument, "unknown masking mode '" + std::string(s) + "'");
}

// The candidate text y_S for coalition S. In space_fill mode an excluded
// unit's leading whitespace (its separator from the previous unit) is kept
// and the rest of its bytes become filler.
inline std::string build_coalition_text(const segmentation::SegmentationResult& units,
                                        const game::Coalition& s, const MaskingMode& mode) {
  require(s.n_players() == units.size(), ErrorKind::kInvalidArgument,
          "coalition width " + std::to_string(s.n_players()) + " does not match " +
              std::to_string(units.size()) + " units");
  if (mode.kind == MaskingMode::Kind::kSpaceFill) {
    std::string out = units.text;
    for (std::size_t i = 0; i < units.size(); ++i) {
      if (s.contains(i)) continue;
      const std::size_t end = units.units[i].char_end;
      for (std::size_t c = units.content_begin(i); c < end; ++c) out[c] = mode.filler;
    }
    return out;
  }
  std::string out;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!s.contains(i)) continue;
    const std::string_view body = segmentation::trim(units.unit_text(i));
    if (body.empty()) continue;
    if (!out.empty()) out += ' ';
    out += body;
  }
  return out;
}

}  // namespace scar::oracle
