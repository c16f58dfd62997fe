// src/stft.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/stft.h"

#include <cmath>

#include "vigas/common.h"
#include "vigas/fft.h"

namespace vigas {

namespace {

// Reflect (symmetric-without-edge) index map for centered framing.
inline Eigen::Index reflect_index(Eigen::Index i, Eigen::Index n) {
  if (i < 0) i = -i;
  if (i >= n) i = 2 * n - 2 - i;
  return i;
}

void check_stft_args(const Waveform& w, int window_len, int hop) {
  if (w.channels() == 0 || w.frames() == 0) throw InvalidInput("stft: empty waveform");
  w.validate("stft");
  if (window_len <= 0 || (window_len & (window_len - 1)) != 0)
    throw InvalidInput("stft: window_len must be a power of two");
  if (hop <= 0 || hop > window_len)
    throw InvalidInput("stft: hop must satisfy 0 < hop <= window_len");
  if (w.frames() < window_len)
    throw InvalidInput("stft: waveform shorter than window");
}

}  // namespace

Eigen::ArrayXd hann_window(int n) {
  Eigen::ArrayXd w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / n);
  return w;
}

Spectrogram stft(const Waveform& w, int window_len, int hop) {
  check_stft_args(w, window_len, hop);
  const Eigen::Index n_frames = w.frames();
  const Eigen::Index pad = window_len / 2;
  const Eigen::Index n_t = (n_frames + hop - 1) / hop;  // ceil
  const Eigen::Index n_f = window_len / 2 + 1;
  const Eigen::ArrayXd win = hann_window(window_len);

  Spectrogram s;
  s.window_len = window_len;
  s.hop = hop;
  s.sample_rate = w.sample_rate;
  s.orig_frames = n_frames;
  s.ch.resize(w.channels());

  std::vector<double> frame(window_len);
  for (int c = 0; c < w.channels(); ++c) {
    s.ch[c].resize(n_f, n_t);
    const Eigen::ArrayXd& x = w.ch[c];
    for (Eigen::Index t = 0; t < n_t; ++t) {
      for (int n = 0; n < window_len; ++n) {
        Eigen::Index p = t * hop - pad + n;
        frame[n] = win[n] * x[reflect_index(p, n_frames)];
      }
      auto spec = rfft(frame.data(), window_len, window_len);
      for (Eigen::Index f = 0; f < n_f; ++f) s.ch[c](f, t) = spec[f];
    }
  }
  return s;
}

Spectrogram stft(const Waveform& w, const StftConfig& cfg) {
  return stft(w, cfg.window_len, cfg.hop);
}

Waveform istft(const Spectrogram& s) {
  if (s.channels() == 0 || s.time_frames() == 0)
    throw InvalidInput("istft: empty spectrogram");
  const int window_len = s.window_len;
  const int hop = s.hop;
  if (window_len <= 0 || (window_len & (window_len - 1)) != 0)
    throw InvalidConfig("istft: window_len must be a power of two");
  if (hop <= 0 || hop > window_len / 2)
    throw InvalidConfig("istft: hop must satisfy 0 < hop <= window_len/2 for overlap-add");
  if (s.bins() != window_len / 2 + 1)
    throw InvalidConfig("istft: bin count does not match window_len");

  const Eigen::Index n_frames = s.orig_frames;
  const Eigen::Index pad = window_len / 2;
  const Eigen::Index padded = n_frames + 2 * pad;
  const Eigen::ArrayXd win = hann_window(window_len);

  Waveform out = Waveform::zeros(s.channels(), n_frames, s.sample_rate);
  std::vector<cplx> spec(window_len / 2 + 1);
  for (int c = 0; c < s.channels(); ++c) {
    Eigen::ArrayXd num = Eigen::ArrayXd::Zero(padded);
    Eigen::ArrayXd den = Eigen::ArrayXd::Zero(padded);
    for (Eigen::Index t = 0; t < s.time_frames(); ++t) {
      for (Eigen::Index f = 0; f < s.bins(); ++f) spec[f] = s.ch[c](f, t);
      std::vector<double> y = irfft(spec, window_len);
      for (int n = 0; n < window_len; ++n) {
        Eigen::Index j = t * hop + n;  // padded coordinates
        num[j] += win[n] * y[n];
        den[j] += win[n] * win[n];
      }
    }
    for (Eigen::Index i = 0; i < n_frames; ++i)
      out.ch[c][i] = num[i + pad] / std::max(den[i + pad], 1e-12);
  }
  return out;
}

Waveform stft_adjoint(const std::vector<Eigen::ArrayXXcd>& bin_grad,
                      Eigen::Index frames, int window_len, int hop) {
  if (bin_grad.empty()) throw InvalidInput("stft_adjoint: empty gradient");
  const Eigen::Index pad = window_len / 2;
  const Eigen::Index n_t = (frames + hop - 1) / hop;
  const Eigen::Index n_f = window_len / 2 + 1;
  const Eigen::ArrayXd win = hann_window(window_len);

  Waveform grad = Waveform::zeros(static_cast<int>(bin_grad.size()), frames);
  std::vector<cplx> full(window_len);
  for (size_t c = 0; c < bin_grad.size(); ++c) {
    if (bin_grad[c].rows() != n_f || bin_grad[c].cols() != n_t)
      throw InvalidInput("stft_adjoint: gradient shape mismatch");
    Eigen::ArrayXd gpad = Eigen::ArrayXd::Zero(frames + 2 * pad);
    for (Eigen::Index t = 0; t < n_t; ++t) {
      // d/dx of sum_f Re(conj(G_f) X_f) with X_f = sum_n win[n] x[p(n)] e^{-i2pi fn/N}:
      // per frame, g[n] = win[n] * Re( sum_{f<=N/2} G_f e^{+i2pi fn/N} ).
      std::fill(full.begin(), full.end(), cplx(0.0, 0.0));
      for (Eigen::Index f = 0; f < n_f; ++f) full[f] = bin_grad[c](f, t);
      ifft(&full);  // unnormalized, e^{+i...}
      for (int n = 0; n < window_len; ++n)
        gpad[t * hop + n] += win[n] * full[n].real();
    }
    // Fold the reflect-padded borders back onto their source samples.
    for (Eigen::Index j = 0; j < gpad.size(); ++j) {
      Eigen::Index p = j - pad;
      grad.ch[c][reflect_index(p, frames)] += gpad[j];
    }
  }
  return grad;
}

}  // namespace vigas
