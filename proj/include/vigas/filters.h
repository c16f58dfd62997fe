// include/vigas/filters.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_FILTERS_H_
#define VIGAS_FILTERS_H_

#include <Eigen/Core>

#include "vigas/waveform.h"

namespace vigas {

// Primary/ambient decomposition of a recording. ambient is defined as the
// residual w - primary, so primary + ambient == w sample-for-sample.
struct BandSplit {
  Waveform primary;
  Waveform ambient;
};

// Cutoffs used by the pipeline: 80 Hz for simulated data, 150 Hz for
// real-capture data.
constexpr double kSimCutoffHz = 80.0;
constexpr double kRealCutoffHz = 150.0;

// Zero-phase 4th-order Butterworth high-pass (forward-backward response,
// i.e. the squared magnitude of the bilinear-transformed filter) applied on
// an even-periodic extension of the signal, so no edge transients leak into
// the split. Requires 0 < cutoff < sample_rate/2.
BandSplit band_split(const Waveform& w, double cutoff_hz);

// Per-channel sum of squared samples over frames [t, t+dt).
Eigen::VectorXd energy(const Waveform& w, Eigen::Index t, Eigen::Index dt);

// Linear convolution of w with rir, truncated to w's length. Channel rules:
// equal channel counts convolve channel-wise; a mono side is applied against
// every channel of the other. Output has max(w.channels, rir.channels)
// channels.
Waveform fft_convolve(const Waveform& w, const Waveform& rir);

}  // namespace vigas

#endif  // VIGAS_FILTERS_H_
