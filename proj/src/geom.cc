// src/geom.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/geom.h"

#include <cmath>

namespace vigas {

Mat3 rotation_zxy(double yaw, double pitch, double roll) {
  Mat3 rz, rx, ry;
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cr = std::cos(roll), sr = std::sin(roll);
  rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
  rx << 1, 0, 0, 0, cp, -sp, 0, sp, cp;
  ry << cr, 0, sr, 0, 1, 0, -sr, 0, cr;
  return rz * rx * ry;
}

double yaw_towards(const Vec3& d) { return std::atan2(-d.x(), d.y()); }

}  // namespace vigas
