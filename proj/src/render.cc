// src/render.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/render.h"

#include <cmath>
#include <limits>

#include "vigas/common.h"

namespace vigas {

namespace {

// Distance to the box surface along a normalized ray starting inside.
double ray_box_exit(const Shoebox& room, const Vec3& origin, const Vec3& dir) {
  double t_exit = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (dir[a] > 1e-12)
      t_exit = std::min(t_exit, (room.dims[a] - origin[a]) / dir[a]);
    else if (dir[a] < -1e-12)
      t_exit = std::min(t_exit, (0.0 - origin[a]) / dir[a]);
  }
  return t_exit;
}

// Nearest positive ray-sphere intersection; negative if none.
double ray_sphere(const Vec3& origin, const Vec3& dir, const Vec3& center, double radius) {
  const Vec3 oc = origin - center;
  const double b = oc.dot(dir);
  const double c = oc.squaredNorm() - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return -1.0;
  const double sq = std::sqrt(disc);
  double t = -b - sq;
  if (t <= 0.0) t = -b + sq;
  return t > 0.0 ? t : -1.0;
}

}  // namespace

RenderResult render_view(const Scene& scene, const Viewpoint& view) {
  scene.validate();
  const int h = kViewImageSize, w = kViewImageSize;
  const double half_tan = std::tan(kFovDegrees * M_PI / 180.0 / 2.0);
  const Mat3 cam = view.rotation();
  const Vec3 fwd = forward_axis(cam), right = right_axis(cam), up = up_axis(cam);

  RenderResult out;
  out.image.planes.assign(3, Eigen::ArrayXXd::Zero(h, w));
  out.boxes.assign(scene.emitters.size(), std::nullopt);

  struct PixelRange {
    int r0 = std::numeric_limits<int>::max(), r1 = -1;
    int c0 = std::numeric_limits<int>::max(), c1 = -1;
  };
  std::vector<PixelRange> ranges(scene.emitters.size());

  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const double ndc_x = (2.0 * (j + 0.5) / w - 1.0) * half_tan;
      const double ndc_y = (1.0 - 2.0 * (i + 0.5) / h) * half_tan;
      const Vec3 dir = (fwd + ndc_x * right + ndc_y * up).normalized();
      out.image.planes[0](i, j) = ray_box_exit(scene.room, view.position, dir);
      for (size_t e = 0; e < scene.emitters.size(); ++e) {
        double t = ray_sphere(view.position, dir, scene.emitters[e].position, kHeadRadius);
        if (t <= 0.0) continue;
        int plane = (static_cast<int>(e) == scene.active_emitter) ? 1 : 2;
        out.image.planes[plane](i, j) = 1.0;
        ranges[e].r0 = std::min(ranges[e].r0, i);
        ranges[e].r1 = std::max(ranges[e].r1, i);
        ranges[e].c0 = std::min(ranges[e].c0, j);
        ranges[e].c1 = std::max(ranges[e].c1, j);
      }
    }
  }

  for (size_t e = 0; e < scene.emitters.size(); ++e) {
    if (ranges[e].r1 < 0) continue;  // not visible
    BoundingBox box;
    box.y_min = static_cast<double>(ranges[e].r0) / h;
    box.y_max = static_cast<double>(ranges[e].r1 + 1) / h;
    box.x_min = static_cast<double>(ranges[e].c0) / w;
    box.x_max = static_cast<double>(ranges[e].c1 + 1) / w;
    out.boxes[e] = box;
  }
  return out;
}

Eigen::Matrix<double, 9, 1> relative_pose(const Viewpoint& src, const Viewpoint& tgt) {
  const Vec3 delta = src.rotation().transpose() * (tgt.position - src.position);
  const double droll = tgt.roll - src.roll;
  const double dpitch = tgt.pitch - src.pitch;
  const double dyaw = tgt.yaw - src.yaw;
  Eigen::Matrix<double, 9, 1> p;
  p << delta.x(), delta.y(), delta.z(), std::sin(droll), std::cos(droll),
      std::sin(dpitch), std::cos(dpitch), std::sin(dyaw), std::cos(dyaw);
  return p;
}

}  // namespace vigas
