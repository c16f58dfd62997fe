// src/waveform.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/waveform.h"

#include <cmath>

#include "vigas/common.h"

namespace vigas {

Waveform Waveform::zeros(int channels, Eigen::Index frames, int sample_rate) {
  Waveform w;
  w.sample_rate = sample_rate;
  w.ch.resize(channels);
  for (auto& c : w.ch) c = Eigen::ArrayXd::Zero(frames);
  return w;
}

Waveform Waveform::mono(Eigen::ArrayXd samples, int sample_rate) {
  Waveform w;
  w.sample_rate = sample_rate;
  w.ch.push_back(std::move(samples));
  return w;
}

Waveform Waveform::stereo(Eigen::ArrayXd left, Eigen::ArrayXd right, int sample_rate) {
  Waveform w;
  w.sample_rate = sample_rate;
  w.ch.push_back(std::move(left));
  w.ch.push_back(std::move(right));
  return w;
}

void Waveform::validate(const std::string& context) const {
  if (channels() < 1 || channels() > 2)
    throw InvalidInput(context + ": waveform must have 1 or 2 channels");
  if (frames() <= 0) throw InvalidInput(context + ": waveform is empty");
  for (const auto& c : ch) {
    if (c.size() != frames())
      throw InvalidInput(context + ": channel lengths differ");
    if (!c.isFinite().all())
      throw InvalidInput(context + ": waveform contains NaN/Inf");
  }
}

Waveform slice(const Waveform& w, Eigen::Index offset, Eigen::Index len) {
  if (offset < 0 || len <= 0 || offset + len > w.frames())
    throw InvalidInput("slice: window out of range");
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.ch.reserve(w.ch.size());
  for (const auto& c : w.ch) out.ch.push_back(c.segment(offset, len));
  return out;
}

Eigen::ArrayXd mix_to_mono(const Waveform& w) {
  Eigen::ArrayXd m = Eigen::ArrayXd::Zero(w.frames());
  for (const auto& c : w.ch) m += c;
  return m / static_cast<double>(w.channels());
}

double peak(const Waveform& w) {
  double p = 0.0;
  for (const auto& c : w.ch) p = std::max(p, c.abs().maxCoeff());
  return p;
}

double total_energy(const Waveform& w) {
  double e = 0.0;
  for (const auto& c : w.ch) e += c.square().sum();
  return e;
}

}  // namespace vigas
