// include/vigas/stft.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_STFT_H_
#define VIGAS_STFT_H_

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "vigas/waveform.h"

namespace vigas {

// STFT parameters used for the training loss and the Mag metric. The
// defaults (Hann 512 / hop 128) are fixed project constants.
struct StftConfig {
  int window_len = 512;
  int hop = 128;
};

// Complex one-sided STFT, [freq_bins x time_frames] per channel.
// freq_bins == window_len/2 + 1; time_frames == ceil(frames/hop).
struct Spectrogram {
  int window_len = 0;
  int hop = 0;
  int sample_rate = kSampleRate;
  Eigen::Index orig_frames = 0;
  std::vector<Eigen::ArrayXXcd> ch;

  int channels() const { return static_cast<int>(ch.size()); }
  Eigen::Index bins() const { return ch.empty() ? 0 : ch[0].rows(); }
  Eigen::Index time_frames() const { return ch.empty() ? 0 : ch[0].cols(); }
};

// Periodic Hann window of length n.
Eigen::ArrayXd hann_window(int n);

// Hann-windowed, centered (reflect-padded) STFT per channel.
// window_len must be a power of two, hop <= window_len, and the waveform
// must be at least window_len frames long.
Spectrogram stft(const Waveform& w, int window_len, int hop);
Spectrogram stft(const Waveform& w, const StftConfig& cfg);

// Least-squares overlap-add inverse; output length equals the frame count
// recorded in s. Requires hop <= window_len/2 (full window coverage),
// otherwise InvalidConfig.
Waveform istft(const Spectrogram& s);

// Adjoint of the linear map w -> stft(w): given dL/dX (complex, layout as
// Spectrogram::ch), returns dL/dw for a signal of `frames` samples. Used by
// the training loss gradient; kept next to stft so the two stay in sync.
Waveform stft_adjoint(const std::vector<Eigen::ArrayXXcd>& bin_grad,
                      Eigen::Index frames, int window_len, int hop);

}  // namespace vigas

#endif  // VIGAS_STFT_H_
