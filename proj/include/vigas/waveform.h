// include/vigas/waveform.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_WAVEFORM_H_
#define VIGAS_WAVEFORM_H_

#include <Eigen/Core>
#include <string>
#include <vector>

namespace vigas {

// Project-wide sample rate. All audio is rendered, stored, and processed at
// 16 kHz; WAV I/O rejects anything else.
constexpr int kSampleRate = 16000;

// Multi-channel audio, 64-bit floats, nominal range [-1, 1]. One or two
// channels, equal length. Immutable by convention once handed to a consumer:
// every DSP operation returns a new Waveform.
struct Waveform {
  int sample_rate = kSampleRate;
  std::vector<Eigen::ArrayXd> ch;

  Waveform() = default;
  static Waveform zeros(int channels, Eigen::Index frames, int sample_rate = kSampleRate);
  static Waveform mono(Eigen::ArrayXd samples, int sample_rate = kSampleRate);
  static Waveform stereo(Eigen::ArrayXd left, Eigen::ArrayXd right,
                         int sample_rate = kSampleRate);

  int channels() const { return static_cast<int>(ch.size()); }
  Eigen::Index frames() const { return ch.empty() ? 0 : ch[0].size(); }

  // Throws InvalidInput unless channels in {1,2}, frames > 0, equal channel
  // lengths, and every sample finite.
  void validate(const std::string& context) const;
};

// Extract frames [offset, offset+len) from every channel.
Waveform slice(const Waveform& w, Eigen::Index offset, Eigen::Index len);

// Channel average as a mono array.
Eigen::ArrayXd mix_to_mono(const Waveform& w);

// Max absolute sample over all channels.
double peak(const Waveform& w);

// Total sum of squared samples over all channels.
double total_energy(const Waveform& w);

}  // namespace vigas

#endif  // VIGAS_WAVEFORM_H_
