// include/vigas/localize.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_LOCALIZE_H_
#define VIGAS_LOCALIZE_H_

#include <Eigen/Core>
#include <optional>
#include <utility>
#include <vector>

#include "vigas/waveform.h"

namespace vigas {

// Normalized image-space box, all coordinates in [0, 1].
struct BoundingBox {
  double y_min = 0.0, y_max = 0.0, x_min = 0.0, x_max = 0.0;

  bool valid() const {
    return 0.0 <= y_min && y_min <= y_max && y_max <= 1.0 && 0.0 <= x_min &&
           x_min <= x_max && x_max <= 1.0;
  }
};

// One clean mono track per participant, all equal length.
struct NearRangeSet {
  std::vector<std::pair<int, Waveform>> tracks;  // (person_id, audio)
};

// Active-speaker window at 16 kHz: 0.2 s.
constexpr Eigen::Index kActiveSpeakerWindow = 3200;

// Person id whose track has maximal energy over [t, t+dt); ties broken by
// lowest id.
int active_speaker(const NearRangeSet& tracks, Eigen::Index t, Eigen::Index dt);

// Keeps a clip only if strictly more than delta_pct percent of its candidate
// windows name the same person; returns that person and the box of the
// middle window (or the winner's box nearest to the middle when the middle
// window names someone else). 4 of 5 windows at delta_pct=80 is rejected.
std::optional<std::pair<int, BoundingBox>> dominant_speaker_filter(
    const std::vector<std::pair<int, BoundingBox>>& clip_boxes, double delta_pct);

constexpr double kDominantSpeakerDeltaPct = 80.0;

// The localization feature V_L: (y_min, y_max, x_min, x_max).
Eigen::Vector4d bbox_feature(const BoundingBox& b);

}  // namespace vigas

#endif  // VIGAS_LOCALIZE_H_
