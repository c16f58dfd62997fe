// src/align.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/align.h"

#include <cmath>
#include <vector>

#include "vigas/common.h"
#include "vigas/fft.h"

namespace vigas {

LagEstimate gcc_phat(const Waveform& a, const Waveform& b, Eigen::Index max_lag) {
  a.validate("gcc_phat: a");
  b.validate("gcc_phat: b");
  if (a.frames() != b.frames() || a.sample_rate != b.sample_rate)
    throw InvalidInput("gcc_phat: signals must share length and sample rate");
  if (max_lag <= 0 || max_lag >= a.frames())
    throw InvalidInput("gcc_phat: max_lag must lie in (0, frames)");

  Eigen::ArrayXd xa = mix_to_mono(a);
  Eigen::ArrayXd xb = mix_to_mono(b);

  constexpr double kSilenceEps = 1e-12;
  if (xa.square().sum() < kSilenceEps || xb.square().sum() < kSilenceEps)
    return {0, 0.0, true};

  const Eigen::Index n = xa.size();
  const size_t nfft = next_pow2(static_cast<size_t>(n + max_lag + 1));
  std::vector<cplx> fa(nfft, cplx(0, 0)), fb(nfft, cplx(0, 0));
  for (Eigen::Index i = 0; i < n; ++i) {
    fa[static_cast<size_t>(i)] = cplx(xa[i], 0.0);
    fb[static_cast<size_t>(i)] = cplx(xb[i], 0.0);
  }
  fft(&fa);
  fft(&fb);

  // Whitened cross-power spectrum: conj(A).B / |conj(A).B|. The inverse
  // transform at index m is then sum_t a(t) b(t+m), so a positive peak index
  // means b is delayed.
  std::vector<cplx> cross(nfft);
  for (size_t k = 0; k < nfft; ++k) {
    cplx c = std::conj(fa[k]) * fb[k];
    double mag = std::abs(c);
    cross[k] = mag > 0.0 ? c / mag : cplx(0.0, 0.0);
  }
  ifft(&cross);

  LagEstimate best{0, -1.0, false};
  for (Eigen::Index m = -max_lag; m <= max_lag; ++m) {
    size_t idx = m >= 0 ? static_cast<size_t>(m) : nfft - static_cast<size_t>(-m);
    double score = cross[idx].real() / static_cast<double>(nfft);
    if (score > best.peak_score) {
      best.lag = m;
      best.peak_score = score;
    }
  }
  return best;
}

Waveform shift(const Waveform& w, Eigen::Index lag) {
  w.validate("shift");
  if (std::abs(static_cast<long long>(lag)) >= w.frames())
    throw InvalidInput("shift: |lag| must be smaller than the frame count");
  if (lag == 0) return w;
  Waveform out = Waveform::zeros(w.channels(), w.frames(), w.sample_rate);
  const Eigen::Index n = w.frames();
  for (int c = 0; c < w.channels(); ++c) {
    if (lag > 0)
      out.ch[c].segment(lag, n - lag) = w.ch[c].segment(0, n - lag);
    else
      out.ch[c].segment(0, n + lag) = w.ch[c].segment(-lag, n + lag);
  }
  return out;
}

}  // namespace vigas
