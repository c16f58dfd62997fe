// include/vigas/render.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_RENDER_H_
#define VIGAS_RENDER_H_

#include <optional>
#include <vector>

#include "vigas/localize.h"
#include "vigas/scene.h"

namespace vigas {

constexpr int kViewImageSize = 64;
constexpr double kFovDegrees = 120.0;
constexpr double kHeadRadius = 0.25;

// Geometric render of a viewpoint: channel 0 is ray-cast depth against the
// room box (meters), channel 1 the active-speaker mask, channel 2 the
// inactive-speaker mask. Planes are [H x W], row 0 at the top of the image.
struct ViewImage {
  int height = kViewImageSize;
  int width = kViewImageSize;
  std::vector<Eigen::ArrayXXd> planes;

  int channels() const { return static_cast<int>(planes.size()); }
};

struct RenderResult {
  ViewImage image;
  // Per-emitter normalized boxes, in scene emitter order; empty when the
  // emitter is outside the view frustum.
  std::vector<std::optional<BoundingBox>> boxes;
};

// Ray-casts a 64x64 depth+mask view through a 120-degree pinhole camera and
// derives each emitter's bounding box from its mask pixels.
RenderResult render_view(const Scene& scene, const Viewpoint& view);

// Target pose relative to the source view: translation in the source frame
// followed by (sin, cos) of the roll, pitch, and yaw differences.
Eigen::Matrix<double, 9, 1> relative_pose(const Viewpoint& src, const Viewpoint& tgt);

}  // namespace vigas

#endif  // VIGAS_RENDER_H_
