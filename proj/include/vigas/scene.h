// include/vigas/scene.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_SCENE_H_
#define VIGAS_SCENE_H_

#include <vector>

#include "vigas/geom.h"
#include "vigas/rng.h"
#include "vigas/waveform.h"

namespace vigas {

// Axis-aligned room [0,Lx] x [0,Ly] x [0,Lz] with a single frequency-flat
// absorption coefficient on every surface.
struct Shoebox {
  Vec3 dims = Vec3(6.0, 5.0, 3.0);
  double absorption = 0.5;  // alpha in (0, 1]
  double speed_of_sound = 343.0;

  bool contains(const Vec3& p, double margin = 0.0) const {
    return p.x() > margin && p.x() < dims.x() - margin && p.y() > margin &&
           p.y() < dims.y() - margin && p.z() > margin && p.z() < dims.z() - margin;
  }
};

// A speaking person: head position, horizontal facing, source signal, and a
// cardioid-power directivity exponent (speech is directional).
struct Emitter {
  Vec3 position = Vec3::Zero();
  double facing_yaw = 0.0;
  Waveform signal;
  double directivity_index = 1.0;
};

// A camera+binaural-microphone pose.
struct Viewpoint {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0, pitch = 0.0, roll = 0.0;
  double ear_offset = 0.09;  // meters from head center to each ear

  Mat3 rotation() const { return rotation_zxy(yaw, pitch, roll); }
  Vec3 left_ear() const { return position - ear_offset * right_axis(rotation()); }
  Vec3 right_ear() const { return position + ear_offset * right_axis(rotation()); }
};

// Two conversing emitters, four viewpoints, one active speaker.
struct Scene {
  Shoebox room;
  std::vector<Emitter> emitters;      // exactly 2
  std::vector<Viewpoint> viewpoints;  // exactly 4
  int active_emitter = 0;

  void validate() const;  // throws InvalidInput on any violated invariant
};

// One reflection image of a point source.
struct ImageSource {
  Vec3 position;
  Vec3 facing_sign;  // per-axis +-1 flips applied to the emitter facing
  int reflections;
};

// All image sources of `src` with total reflection count <= max_order.
std::vector<ImageSource> enumerate_images(const Shoebox& room, const Vec3& src,
                                          int max_order);

// Image-source RIR between two points: taps of amplitude
// (1-alpha)^reflections / (4 pi d) at delay d/c, fractional positions
// linearly interpolated. Length covers the farthest contributing image.
Waveform image_source_rir(const Shoebox& room, const Vec3& src, const Vec3& rcv,
                          int max_order, int sample_rate = kSampleRate);

// Stereo RIR at the viewpoint's two ears. Each tap is additionally scaled by
// the source's cardioid-power directivity and by a broadband head-shadow
// gain 0.6 + 0.4*(1+cos(theta_ear))/2, where theta_ear is the angle between
// the ear's outward axis and the arrival direction.
Waveform binaural_rir(const Shoebox& room, const Emitter& src, const Viewpoint& view,
                      int max_order, int sample_rate = kSampleRate);

// Deterministic speech-like test signal: sawtooth glottal pulses with a
// drifting F0 in [85, 255] Hz, two formant resonators, syllable-rate
// amplitude bursts, and a -30 dB noise floor; peak-normalized to 0.5.
Waveform synth_speech(Rng& rng, double duration_s, int sample_rate = kSampleRate);

// Scene sampling ranges. Emitters face each other; viewpoints sit at height
// 1.5 m within `viewpoint_radius` of the emitters' midpoint, yawed to face
// that midpoint.
struct SceneSampleConfig {
  double room_min = 4.0, room_max = 8.0;        // Lx, Ly range (m)
  double room_height_min = 2.6, room_height_max = 3.4;
  double absorption_min = 0.45, absorption_max = 0.75;
  double emitter_min_sep = 0.5, emitter_max_sep = 3.0;
  double viewpoint_radius = 2.0;
  double wall_margin = 0.4;
  double min_view_emitter_dist = 0.5;
  double speaker_height = 1.5;
  double directivity_index = 1.0;
};

// Rejection-samples a scene satisfying every Scene invariant; throws
// ConfigInfeasible after 1000 failed attempts.
Scene sample_scene(Rng& rng, const SceneSampleConfig& config);

}  // namespace vigas

#endif  // VIGAS_SCENE_H_
