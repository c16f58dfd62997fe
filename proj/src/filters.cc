// src/filters.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/filters.h"

#include <cmath>
#include <vector>

#include "vigas/common.h"
#include "vigas/fft.h"

namespace vigas {

namespace {

// Squared magnitude of the digital 4th-order Butterworth high-pass at
// normalized frequency f/fs, via the bilinear frequency map
// Omega = tan(pi f / fs). Squared because the filter runs forward-backward.
double butterworth_hp_zero_phase_gain(double f, double fs, double fc) {
  if (f <= 0.0) return 0.0;
  if (f >= fs / 2.0) return 1.0;
  const double ratio = std::tan(M_PI * fc / fs) / std::tan(M_PI * f / fs);
  const double r8 = std::pow(ratio, 8.0);  // 2 * order
  return 1.0 / (1.0 + r8);
}

}  // namespace

BandSplit band_split(const Waveform& w, double cutoff_hz) {
  w.validate("band_split");
  const double fs = static_cast<double>(w.sample_rate);
  if (!(cutoff_hz > 0.0 && cutoff_hz < fs / 2.0))
    throw InvalidInput("band_split: cutoff must lie in (0, sample_rate/2)");

  const Eigen::Index frames = w.frames();
  BandSplit out;
  out.primary = Waveform::zeros(w.channels(), frames, w.sample_rate);
  out.ambient = Waveform::zeros(w.channels(), frames, w.sample_rate);

  if (frames == 1) {
    // A single sample is pure DC; the high-pass removes all of it.
    for (int c = 0; c < w.channels(); ++c) out.ambient.ch[c] = w.ch[c];
    return out;
  }

  // Even-periodic extension [x, reverse(x[1..n-2])] of period 2n-2: the
  // extension is continuous, so circular filtering is free of wrap
  // discontinuities and a constant input stays in the DC bin exactly.
  const size_t n = static_cast<size_t>(frames);
  const size_t ext_len = 2 * n - 2;
  std::vector<cplx> buf(ext_len);
  for (int c = 0; c < w.channels(); ++c) {
    const Eigen::ArrayXd& x = w.ch[c];
    for (size_t i = 0; i < n; ++i) buf[i] = cplx(x[static_cast<Eigen::Index>(i)], 0.0);
    for (size_t i = n; i < ext_len; ++i)
      buf[i] = cplx(x[static_cast<Eigen::Index>(2 * n - 2 - i)], 0.0);
    fft(&buf);
    for (size_t k = 0; k < ext_len; ++k) {
      size_t fold = std::min(k, ext_len - k);  // two-sided bin -> frequency
      double f = fs * static_cast<double>(fold) / static_cast<double>(ext_len);
      buf[k] *= butterworth_hp_zero_phase_gain(f, fs, cutoff_hz);
    }
    ifft(&buf);
    for (size_t i = 0; i < n; ++i) {
      double v = buf[i].real() / static_cast<double>(ext_len);
      out.primary.ch[c][static_cast<Eigen::Index>(i)] = v;
      out.ambient.ch[c][static_cast<Eigen::Index>(i)] = x[static_cast<Eigen::Index>(i)] - v;
    }
  }
  return out;
}

Eigen::VectorXd energy(const Waveform& w, Eigen::Index t, Eigen::Index dt) {
  if (t < 0 || dt <= 0 || t + dt > w.frames())
    throw InvalidInput("energy: window out of range");
  Eigen::VectorXd e(w.channels());
  for (int c = 0; c < w.channels(); ++c)
    e[c] = w.ch[c].segment(t, dt).square().sum();
  return e;
}

Waveform fft_convolve(const Waveform& w, const Waveform& rir) {
  w.validate("fft_convolve: input");
  rir.validate("fft_convolve: rir");
  if (w.channels() != rir.channels() && w.channels() != 1 && rir.channels() != 1)
    throw InvalidInput("fft_convolve: channel mismatch");

  const int out_channels = std::max(w.channels(), rir.channels());
  const Eigen::Index out_len = w.frames();
  const size_t nfft = next_pow2(static_cast<size_t>(w.frames() + rir.frames() - 1));

  Waveform out = Waveform::zeros(out_channels, out_len, w.sample_rate);
  for (int c = 0; c < out_channels; ++c) {
    const Eigen::ArrayXd& x = w.ch[w.channels() == 1 ? 0 : c];
    const Eigen::ArrayXd& h = rir.ch[rir.channels() == 1 ? 0 : c];
    auto xs = rfft(x.data(), x.size(), nfft);
    auto hs = rfft(h.data(), h.size(), nfft);
    for (size_t k = 0; k < xs.size(); ++k) xs[k] *= hs[k];
    auto y = irfft(xs, nfft);
    for (Eigen::Index i = 0; i < out_len; ++i) out.ch[c][i] = y[static_cast<size_t>(i)];
  }
  return out;
}

}  // namespace vigas
