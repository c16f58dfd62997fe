// src/localize.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/localize.h"

#include <cstdlib>
#include <map>

#include "vigas/common.h"
#include "vigas/filters.h"

namespace vigas {

int active_speaker(const NearRangeSet& tracks, Eigen::Index t, Eigen::Index dt) {
  if (tracks.tracks.empty()) throw InvalidInput("active_speaker: no tracks");
  const Eigen::Index len = tracks.tracks.front().second.frames();
  for (const auto& [id, w] : tracks.tracks) {
    if (w.frames() != len)
      throw InvalidInput("active_speaker: track lengths differ");
  }

  int best_id = 0;
  double best_energy = -1.0;
  for (const auto& [id, w] : tracks.tracks) {
    double e = energy(w, t, dt).sum();
    if (e > best_energy || (e == best_energy && id < best_id)) {
      best_energy = e;
      best_id = id;
    }
  }
  return best_id;
}

std::optional<std::pair<int, BoundingBox>> dominant_speaker_filter(
    const std::vector<std::pair<int, BoundingBox>>& clip_boxes, double delta_pct) {
  if (clip_boxes.empty()) return std::nullopt;
  const int n = static_cast<int>(clip_boxes.size());

  std::map<int, int> counts;
  for (const auto& [id, box] : clip_boxes) ++counts[id];
  int winner = counts.begin()->first;
  int winner_count = counts.begin()->second;
  for (const auto& [id, count] : counts) {
    if (count > winner_count) {
      winner = id;
      winner_count = count;
    }
  }

  // Strictly more than delta_pct of the windows must agree.
  if (100.0 * winner_count <= delta_pct * n) return std::nullopt;

  // The clip's box is the one from the middle window; if the middle window
  // names someone else, fall back to the winner's window nearest the middle.
  const int mid = n / 2;
  if (clip_boxes[mid].first == winner) return clip_boxes[mid];
  int best_idx = -1;
  for (int i = 0; i < n; ++i) {
    if (clip_boxes[i].first != winner) continue;
    if (best_idx < 0 || std::abs(i - mid) < std::abs(best_idx - mid)) best_idx = i;
  }
  return clip_boxes[best_idx];
}

Eigen::Vector4d bbox_feature(const BoundingBox& b) {
  if (!b.valid()) throw InvalidInput("bbox_feature: box violates [0,1] ordering");
  return Eigen::Vector4d(b.y_min, b.y_max, b.x_min, b.x_max);
}

}  // namespace vigas
