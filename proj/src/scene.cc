// src/scene.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/scene.h"

#include <cmath>

#include "vigas/common.h"

namespace vigas {

void Scene::validate() const {
  if (emitters.size() != 2) throw InvalidInput("scene: expected exactly 2 emitters");
  if (viewpoints.size() != 4) throw InvalidInput("scene: expected exactly 4 viewpoints");
  if (active_emitter != 0 && active_emitter != 1)
    throw InvalidInput("scene: active emitter index out of range");
  if (!(room.dims.minCoeff() > 0.0))
    throw InvalidInput("scene: room dimensions must be positive");
  if (!(room.absorption > 0.0 && room.absorption <= 1.0))
    throw InvalidInput("scene: absorption must lie in (0, 1]");
  if ((emitters[0].position - emitters[1].position).norm() > 3.0)
    throw InvalidInput("scene: emitters farther than 3 m apart");
  for (const auto& e : emitters)
    if (!room.contains(e.position)) throw InvalidInput("scene: emitter outside room");
  for (const auto& v : viewpoints)
    if (!room.contains(v.position)) throw InvalidInput("scene: viewpoint outside room");
}

std::vector<ImageSource> enumerate_images(const Shoebox& room, const Vec3& src,
                                          int max_order) {
  if (max_order < 0) throw InvalidInput("enumerate_images: max_order must be >= 0");

  // Per axis: coordinate (1-2p)*s + 2mL carries |2m - p| reflections; the
  // odd family (p=1) also mirrors the source facing along that axis.
  struct AxisImage {
    double coord;
    double sign;
    int count;
  };
  std::vector<AxisImage> axis_images[3];
  for (int a = 0; a < 3; ++a) {
    const double len = room.dims[a];
    const double s = src[a];
    for (int p = 0; p <= 1; ++p) {
      for (int m = -(max_order + 1); m <= max_order + 1; ++m) {
        int count = std::abs(2 * m - p);
        if (count > max_order) continue;
        axis_images[a].push_back({(1 - 2 * p) * s + 2.0 * m * len,
                                  p == 0 ? 1.0 : -1.0, count});
      }
    }
  }

  std::vector<ImageSource> images;
  for (const AxisImage& ix : axis_images[0]) {
    for (const AxisImage& iy : axis_images[1]) {
      if (ix.count + iy.count > max_order) continue;
      for (const AxisImage& iz : axis_images[2]) {
        int total = ix.count + iy.count + iz.count;
        if (total > max_order) continue;
        images.push_back({Vec3(ix.coord, iy.coord, iz.coord),
                          Vec3(ix.sign, iy.sign, iz.sign), total});
      }
    }
  }
  return images;
}

namespace {

struct Tap {
  double delay_samples;
  double amplitude;
};

Waveform taps_to_rir(const std::vector<std::vector<Tap>>& per_channel, int sample_rate) {
  double max_delay = 0.0;
  for (const auto& taps : per_channel)
    for (const Tap& t : taps) max_delay = std::max(max_delay, t.delay_samples);
  const auto len = static_cast<Eigen::Index>(std::ceil(max_delay)) + 2;

  Waveform rir = Waveform::zeros(static_cast<int>(per_channel.size()), len, sample_rate);
  for (size_t c = 0; c < per_channel.size(); ++c) {
    for (const Tap& t : per_channel[c]) {
      auto idx = static_cast<Eigen::Index>(std::floor(t.delay_samples));
      double frac = t.delay_samples - static_cast<double>(idx);
      rir.ch[c][idx] += t.amplitude * (1.0 - frac);
      rir.ch[c][idx + 1] += t.amplitude * frac;
    }
  }
  return rir;
}

void check_rir_args(const Shoebox& room, const Vec3& src, const Vec3& rcv) {
  if (!room.contains(src)) throw InvalidInput("rir: source outside room");
  if (!room.contains(rcv)) throw InvalidInput("rir: receiver outside room");
  if ((src - rcv).norm() < 1e-9) throw InvalidInput("rir: coincident source and receiver");
}

}  // namespace

Waveform image_source_rir(const Shoebox& room, const Vec3& src, const Vec3& rcv,
                          int max_order, int sample_rate) {
  check_rir_args(room, src, rcv);
  const double beta = 1.0 - room.absorption;
  const double fs = static_cast<double>(sample_rate);

  std::vector<std::vector<Tap>> taps(1);
  for (const ImageSource& img : enumerate_images(room, src, max_order)) {
    double gain = std::pow(beta, img.reflections);
    if (gain == 0.0 && img.reflections > 0) continue;
    double d = (img.position - rcv).norm();
    taps[0].push_back({d / room.speed_of_sound * fs, gain / (4.0 * M_PI * d)});
  }
  return taps_to_rir(taps, sample_rate);
}

Waveform binaural_rir(const Shoebox& room, const Emitter& src, const Viewpoint& view,
                      int max_order, int sample_rate) {
  check_rir_args(room, src.position, view.position);
  const double beta = 1.0 - room.absorption;
  const double fs = static_cast<double>(sample_rate);
  const Mat3 head = view.rotation();
  const Vec3 ears[2] = {view.left_ear(), view.right_ear()};
  const Vec3 ear_axes[2] = {-right_axis(head), right_axis(head)};
  const Vec3 facing = forward_axis(rotation_zxy(src.facing_yaw, 0.0, 0.0));

  std::vector<std::vector<Tap>> taps(2);
  for (const ImageSource& img : enumerate_images(room, src.position, max_order)) {
    double wall_gain = std::pow(beta, img.reflections);
    if (wall_gain == 0.0 && img.reflections > 0) continue;
    const Vec3 img_facing = img.facing_sign.cwiseProduct(facing);
    for (int e = 0; e < 2; ++e) {
      const Vec3 path = ears[e] - img.position;
      const double d = path.norm();
      const Vec3 dir = path / d;
      // Cardioid-power source directivity.
      double cos_src = img_facing.dot(dir);
      double directivity = std::pow((1.0 + cos_src) / 2.0, src.directivity_index);
      // Broadband head shadow: 1.0 facing the ear, 0.6 opposite.
      double cos_ear = ear_axes[e].dot(-dir);
      double shadow = 0.4 * (1.0 + cos_ear) / 2.0 + 0.6;
      taps[e].push_back(
          {d / room.speed_of_sound * fs, wall_gain * directivity * shadow / (4.0 * M_PI * d)});
    }
  }
  return taps_to_rir(taps, sample_rate);
}

Waveform synth_speech(Rng& rng, double duration_s, int sample_rate) {
  if (duration_s <= 0.0) throw InvalidInput("synth_speech: duration must be positive");
  const auto n = static_cast<Eigen::Index>(std::llround(duration_s * sample_rate));
  const double fs = static_cast<double>(sample_rate);

  // Glottal source: sawtooth with a slow random-walk F0 in [85, 255] Hz.
  double f0 = rng.uniform(110.0, 220.0);
  double drift = 0.0;
  double phase = 0.0;
  Eigen::ArrayXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i % 160 == 0) {  // update the contour every 10 ms
      drift = 0.9 * drift + 6.0 * rng.normal();
      f0 = std::min(255.0, std::max(85.0, f0 + drift));
    }
    phase += f0 / fs;
    phase -= std::floor(phase);
    x[i] = 2.0 * phase - 1.0;
  }

  // Two formant resonators in cascade.
  for (int stage = 0; stage < 2; ++stage) {
    double fc = stage == 0 ? rng.uniform(350.0, 800.0) : rng.uniform(1000.0, 2400.0);
    double bw = rng.uniform(80.0, 150.0);
    double r = std::exp(-M_PI * bw / fs);
    double a1 = -2.0 * r * std::cos(2.0 * M_PI * fc / fs);
    double a2 = r * r;
    double g = 1.0 - r;
    double y1 = 0.0, y2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double y = g * x[i] - a1 * y1 - a2 * y2;
      y2 = y1;
      y1 = y;
      x[i] = y;
    }
  }

  // Syllable bursts: raised-cosine on/off envelope, speech-like cadence.
  Eigen::ArrayXd env = Eigen::ArrayXd::Zero(n);
  Eigen::Index pos = 0;
  while (pos < n) {
    auto burst = static_cast<Eigen::Index>(rng.uniform(0.12, 0.30) * fs);
    auto gap = static_cast<Eigen::Index>(rng.uniform(0.03, 0.12) * fs);
    auto ramp = static_cast<Eigen::Index>(0.02 * fs);
    for (Eigen::Index i = 0; i < burst && pos + i < n; ++i) {
      double v = 1.0;
      if (i < ramp) v = 0.5 - 0.5 * std::cos(M_PI * i / ramp);
      if (burst - i <= ramp) v = 0.5 - 0.5 * std::cos(M_PI * (burst - i) / ramp);
      env[pos + i] = v;
    }
    pos += burst + gap;
  }
  x *= env;

  // Noise floor 30 dB below the signal.
  double sig_rms = std::sqrt(x.square().mean());
  double noise_rms = sig_rms * std::pow(10.0, -30.0 / 20.0);
  for (Eigen::Index i = 0; i < n; ++i) x[i] += noise_rms * rng.normal();

  double pk = x.abs().maxCoeff();
  if (pk > 0.0) x *= 0.5 / pk;

  double rms = std::sqrt(x.square().mean());
  if (rms < 0.05 || rms > 0.3)
    throw NumericalError("synth_speech: rms outside expected [0.05, 0.3] range");
  return Waveform::mono(std::move(x), sample_rate);
}

Scene sample_scene(Rng& rng, const SceneSampleConfig& config) {
  if (!(config.room_min > 0.0) || config.room_max < config.room_min)
    throw InvalidConfig("sample_scene: bad room size range");

  for (int attempt = 0; attempt < 1000; ++attempt) {
    Scene scene;
    scene.room.dims = Vec3(rng.uniform(config.room_min, config.room_max),
                           rng.uniform(config.room_min, config.room_max),
                           rng.uniform(config.room_height_min, config.room_height_max));
    scene.room.absorption = rng.uniform(config.absorption_min, config.absorption_max);

    const double m = config.wall_margin;
    const double z = config.speaker_height;
    if (z >= scene.room.dims.z() - m) continue;

    auto sample_xy = [&](double margin) {
      return Vec3(rng.uniform(margin, scene.room.dims.x() - margin),
                  rng.uniform(margin, scene.room.dims.y() - margin), z);
    };

    Vec3 p0 = sample_xy(m);
    Vec3 p1 = sample_xy(m);
    double sep = (p0 - p1).norm();
    if (sep < config.emitter_min_sep || sep > config.emitter_max_sep) continue;

    Emitter e0, e1;
    e0.position = p0;
    e1.position = p1;
    e0.facing_yaw = yaw_towards(p1 - p0);
    e1.facing_yaw = yaw_towards(p0 - p1);
    e0.directivity_index = e1.directivity_index = config.directivity_index;
    scene.emitters = {e0, e1};

    const Vec3 midpoint = 0.5 * (p0 + p1);
    bool ok = true;
    for (int v = 0; v < 4 && ok; ++v) {
      Viewpoint vp;
      bool placed = false;
      for (int inner = 0; inner < 100; ++inner) {
        double ang = rng.uniform(0.0, 2.0 * M_PI);
        double rad = rng.uniform(config.min_view_emitter_dist, config.viewpoint_radius);
        Vec3 pos = midpoint + Vec3(rad * std::cos(ang), rad * std::sin(ang), 0.0);
        pos.z() = z;
        if (!scene.room.contains(pos, m)) continue;
        if ((pos - p0).norm() < config.min_view_emitter_dist) continue;
        if ((pos - p1).norm() < config.min_view_emitter_dist) continue;
        vp.position = pos;
        vp.yaw = yaw_towards(midpoint - pos);
        placed = true;
        break;
      }
      if (!placed) ok = false;
      scene.viewpoints.push_back(vp);
    }
    if (!ok) continue;

    scene.active_emitter = static_cast<int>(rng.uniform_int(2));
    scene.validate();
    return scene;
  }
  throw ConfigInfeasible("sample_scene: rejection sampling exceeded 1000 attempts");
}

}  // namespace vigas
