// include/vigas/geom.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_GEOM_H_
#define VIGAS_GEOM_H_

#include <Eigen/Dense>

namespace vigas {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Orientation convention used for heads, emitters, and cameras:
// z is up, forward at identity is +y, roll is about +y, pitch about +x,
// yaw about +z. world_from_local = Rz(yaw) * Rx(pitch) * Ry(roll).
Mat3 rotation_zxy(double yaw, double pitch, double roll);

inline Vec3 forward_axis(const Mat3& r) { return r.col(1); }
inline Vec3 right_axis(const Mat3& r) { return r.col(0); }
inline Vec3 up_axis(const Mat3& r) { return r.col(2); }

// Yaw that points the forward axis (+y at identity) at the horizontal
// direction of `d`.
double yaw_towards(const Vec3& d);

}  // namespace vigas

#endif  // VIGAS_GEOM_H_
