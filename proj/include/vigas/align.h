// include/vigas/align.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_ALIGN_H_
#define VIGAS_ALIGN_H_

#include "vigas/waveform.h"

namespace vigas {

// Result of a GCC-PHAT time-delay estimate.
struct LagEstimate {
  Eigen::Index lag = 0;     // positive lag: b lags (is delayed relative to) a
  double peak_score = 0.0;  // whitened correlation at the peak
  bool degenerate = false;  // near-silent input, lag forced to 0
};

// Default search range: 50 ms at 16 kHz, ~17 m of acoustic path difference.
constexpr Eigen::Index kDefaultMaxLag = 800;

// Generalized cross-correlation with phase transform. Channels are averaged
// to mono before the transform. The cross-power spectrum is whitened by its
// magnitude, and the lag is the argmax of the inverse transform over
// [-max_lag, max_lag]. Sign convention: gcc_phat(x, shift(x, k)).lag == k.
// Near-silent input returns {0, 0, degenerate=true} instead of erroring so
// training never aborts on a silent clip.
LagEstimate gcc_phat(const Waveform& a, const Waveform& b, Eigen::Index max_lag);

// Integer-sample zero-padded shift, length preserved. Positive lag delays
// the signal: shift(w, k)[t] == w[t - k] where defined, 0 elsewhere.
Waveform shift(const Waveform& w, Eigen::Index lag);

}  // namespace vigas

#endif  // VIGAS_ALIGN_H_
