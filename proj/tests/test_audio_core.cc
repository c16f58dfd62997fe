// tests/test_audio_core.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "vigas/common.h"
#include "vigas/fft.h"
#include "vigas/filters.h"
#include "vigas/rng.h"
#include "vigas/stft.h"
#include "vigas/wav_io.h"
#include "vigas/waveform.h"

using namespace vigas;

namespace {

Waveform random_waveform(int channels, Eigen::Index frames, uint64_t seed) {
  Rng rng(seed);
  Waveform w = Waveform::zeros(channels, frames);
  for (int c = 0; c < channels; ++c)
    for (Eigen::Index i = 0; i < frames; ++i) w.ch[c][i] = rng.uniform(-0.5, 0.5);
  return w;
}

Eigen::ArrayXd sine(Eigen::Index frames, double freq, double fs = 16000.0) {
  Eigen::ArrayXd x(frames);
  for (Eigen::Index i = 0; i < frames; ++i) x[i] = std::sin(2.0 * M_PI * freq * i / fs);
  return x;
}

// Independent frame-level oracle: naive windowed DFT.
std::vector<cplx> naive_windowed_dft(const Eigen::ArrayXd& frame, const Eigen::ArrayXd& win) {
  const int n = static_cast<int>(frame.size());
  std::vector<cplx> out(n / 2 + 1);
  for (int f = 0; f <= n / 2; ++f) {
    cplx acc(0.0, 0.0);
    for (int i = 0; i < n; ++i)
      acc += win[i] * frame[i] * std::exp(cplx(0.0, -2.0 * M_PI * f * i / n));
    out[f] = acc;
  }
  return out;
}

}  // namespace

TEST_CASE("stft of zero input is zero") {
  Waveform w = Waveform::zeros(2, 16000);
  Spectrogram s = stft(w, 512, 128);
  CHECK(s.channels() == 2);
  CHECK(s.bins() == 257);
  CHECK(s.time_frames() == 125);  // ceil(16000/128)
  for (int c = 0; c < 2; ++c) CHECK(s.ch[c].abs().maxCoeff() == 0.0);
}

TEST_CASE("stft of unit impulse matches direct DFT of the windowed frame") {
  Waveform w = Waveform::zeros(1, 2048);
  w.ch[0][0] = 1.0;
  Spectrogram s = stft(w, 512, 128);

  // Frame 0 is centered on sample 0: the impulse sits under window index 256.
  Eigen::ArrayXd win = hann_window(512);
  for (Eigen::Index f = 0; f < s.bins(); ++f)
    CHECK(std::abs(s.ch[0](f, 0)) == doctest::Approx(win[256]).epsilon(1e-10));

  // Full-frame check against the oracle (frame 1, centered at sample 128,
  // hits the impulse plus its reflected copy).
  Eigen::ArrayXd frame = Eigen::ArrayXd::Zero(512);
  for (int n = 0; n < 512; ++n) {
    Eigen::Index p = 128 - 256 + n;
    if (p < 0) p = -p;
    frame[n] = (p == 0) ? 1.0 : 0.0;
  }
  auto oracle = naive_windowed_dft(frame, win);
  for (Eigen::Index f = 0; f < s.bins(); ++f)
    CHECK(std::abs(s.ch[0](f, 1) - oracle[static_cast<size_t>(f)]) < 1e-10);
}

TEST_CASE("stft of 1 kHz sine concentrates energy at bin 32") {
  Waveform w;
  w.ch.push_back(sine(16000, 1000.0));
  w.sample_rate = 16000;
  Spectrogram s = stft(w, 512, 128);

  Eigen::ArrayXd bin_energy = Eigen::ArrayXd::Zero(s.bins());
  for (Eigen::Index f = 0; f < s.bins(); ++f)
    bin_energy[f] = s.ch[0].row(f).abs2().sum();
  Eigen::Index peak;
  bin_energy.maxCoeff(&peak);
  CHECK(peak == 32);  // 1000/16000 * 512

  // Leakage cross-check on an interior frame against the naive DFT.
  Eigen::ArrayXd win = hann_window(512);
  const Eigen::Index t = 60;
  Eigen::ArrayXd frame(512);
  for (int n = 0; n < 512; ++n) frame[n] = w.ch[0][t * 128 - 256 + n];
  auto oracle = naive_windowed_dft(frame, win);
  for (Eigen::Index f = 0; f < s.bins(); ++f)
    CHECK(std::abs(s.ch[0](f, t) - oracle[static_cast<size_t>(f)]) < 1e-9);
}

TEST_CASE("stft rejects bad arguments") {
  CHECK_THROWS_AS(stft(Waveform{}, 512, 128), InvalidInput);
  Waveform w = Waveform::zeros(1, 256);
  CHECK_THROWS_AS(stft(w, 512, 128), InvalidInput);  // shorter than window
  Waveform w2 = Waveform::zeros(1, 4096);
  CHECK_THROWS_AS(stft(w2, 500, 128), InvalidInput);  // not a power of two
  CHECK_THROWS_AS(stft(w2, 512, 1024), InvalidInput);  // hop > window
}

TEST_CASE("istft round trip reproduces the signal") {
  Waveform w = random_waveform(2, 16000, 7);
  Waveform back = istft(stft(w, 512, 128));
  REQUIRE(back.frames() == w.frames());
  double err = 0.0;
  for (int c = 0; c < 2; ++c) err = std::max(err, (back.ch[c] - w.ch[c]).abs().maxCoeff());
  CHECK(err < 1e-6);
}

TEST_CASE("istft of zero spectrogram is zero, and scaling is linear") {
  Waveform w = random_waveform(1, 4096, 11);
  Spectrogram s = stft(w, 512, 128);
  Spectrogram zero = s;
  for (auto& c : zero.ch) c.setZero();
  CHECK(peak(istft(zero)) == 0.0);

  Spectrogram doubled = s;
  for (auto& c : doubled.ch) c *= 2.0;
  Waveform x1 = istft(s), x2 = istft(doubled);
  CHECK((x2.ch[0] - 2.0 * x1.ch[0]).abs().maxCoeff() < 1e-9);
}

TEST_CASE("istft rejects non-COLA hop") {
  Waveform w = random_waveform(1, 4096, 13);
  Spectrogram s = stft(w, 512, 512);
  CHECK_THROWS_AS(istft(s), InvalidConfig);
}

TEST_CASE("stft linearity") {
  Waveform x = random_waveform(1, 4000, 21);
  Waveform y = random_waveform(1, 4000, 22);
  const double a = 1.7, b = -0.4;
  Waveform mix = Waveform::zeros(1, 4000);
  mix.ch[0] = a * x.ch[0] + b * y.ch[0];
  Spectrogram sm = stft(mix, 512, 128), sx = stft(x, 512, 128), sy = stft(y, 512, 128);
  double err = (sm.ch[0] - (a * sx.ch[0] + b * sy.ch[0])).abs().maxCoeff();
  CHECK(err < 1e-10);
}

TEST_CASE("stft Parseval identity on an edge-free signal") {
  // Zero out the borders so reflect padding carries no energy and the
  // per-sample window normalization is exactly in its COLA plateau.
  Waveform w = random_waveform(1, 8192, 33);
  w.ch[0].head(512).setZero();
  w.ch[0].tail(512).setZero();
  const int win_len = 512, hop = 128;
  Spectrogram s = stft(w, win_len, hop);

  double bin_energy = 0.0;  // two-sided, so double the interior bins
  for (Eigen::Index t = 0; t < s.time_frames(); ++t) {
    for (Eigen::Index f = 0; f < s.bins(); ++f) {
      double e = std::norm(s.ch[0](f, t));
      bin_energy += (f == 0 || f == s.bins() - 1) ? e : 2.0 * e;
    }
  }
  bin_energy /= win_len;

  // Plateau constant of sum_t w^2[n - t*hop] at an interior sample.
  Eigen::ArrayXd win = hann_window(win_len);
  double cola = 0.0;
  for (int k = -win_len; k <= win_len; ++k) {
    int n = 256 + k * hop;
    if (n >= 0 && n < win_len) cola += win[n] * win[n];
  }

  double sig_energy = w.ch[0].square().sum();
  CHECK(bin_energy == doctest::Approx(cola * sig_energy).epsilon(1e-6));
}

TEST_CASE("band_split removes DC and keeps 1 kHz") {
  SUBCASE("DC input") {
    Waveform w = Waveform::zeros(1, 16000);
    w.ch[0].setConstant(1.0);
    BandSplit bs = band_split(w, kSimCutoffHz);
    double in_e = total_energy(w);
    CHECK(total_energy(bs.primary) < 1e-4 * in_e);
    CHECK((bs.ambient.ch[0] - w.ch[0]).abs().maxCoeff() < 1e-2);
  }
  SUBCASE("1 kHz sine") {
    Waveform w;
    w.ch.push_back(sine(16000, 1000.0));
    BandSplit bs = band_split(w, kSimCutoffHz);
    CHECK(total_energy(bs.primary) >= 0.99 * total_energy(w));
    CHECK(total_energy(bs.ambient) <= 0.01 * total_energy(w));
  }
}

TEST_CASE("band_split is an exact additive decomposition") {
  Waveform w = random_waveform(2, 16000, 44);
  for (double cutoff : {kSimCutoffHz, kRealCutoffHz}) {
    BandSplit bs = band_split(w, cutoff);
    for (int c = 0; c < 2; ++c) {
      double err = ((bs.primary.ch[c] + bs.ambient.ch[c]) - w.ch[c]).abs().maxCoeff();
      CHECK(err < 1e-12);
    }
  }
}

TEST_CASE("band_split validates the cutoff") {
  Waveform w = random_waveform(1, 1000, 5);
  CHECK_THROWS_AS(band_split(w, 0.0), InvalidInput);
  CHECK_THROWS_AS(band_split(w, 8000.0), InvalidInput);
}

TEST_CASE("energy basics") {
  Waveform zero = Waveform::zeros(2, 1000);
  CHECK(energy(zero, 0, 1000).sum() == 0.0);

  // Unit sine over a whole number of periods: energy N/2 within +-1.
  const Eigen::Index n = 1600;  // 100 periods of 1 kHz at 16 kHz
  Waveform w;
  w.ch.push_back(sine(n, 1000.0));
  double e = energy(w, 0, n)[0];
  double brute = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) brute += w.ch[0][i] * w.ch[0][i];
  CHECK(e == doctest::Approx(brute).epsilon(1e-12));
  CHECK(std::abs(e - n / 2.0) <= 1.0);

  // Homogeneity: scaling by c scales energy by c^2.
  Waveform w2 = w;
  w2.ch[0] *= 3.0;
  CHECK(energy(w2, 0, n)[0] == doctest::Approx(9.0 * e).epsilon(1e-12));

  CHECK_THROWS_AS(energy(w, 1500, 200), InvalidInput);
}

TEST_CASE("fft_convolve identity and shift kernels") {
  Waveform w = random_waveform(1, 2000, 55);
  Waveform delta = Waveform::zeros(1, 64);
  delta.ch[0][0] = 1.0;
  Waveform out = fft_convolve(w, delta);
  CHECK((out.ch[0] - w.ch[0]).abs().maxCoeff() < 1e-10);

  Waveform delayed = Waveform::zeros(1, 64);
  delayed.ch[0][7] = 1.0;
  Waveform out2 = fft_convolve(w, delayed);
  CHECK((out2.ch[0].segment(7, 1993) - w.ch[0].segment(0, 1993)).abs().maxCoeff() < 1e-10);
  CHECK(out2.ch[0].head(7).abs().maxCoeff() < 1e-10);
}

TEST_CASE("fft_convolve matches the direct time-domain oracle") {
  Rng rng(66);
  for (Eigen::Index taps : {64, 256}) {
    Waveform x = random_waveform(1, 1500, 66 + static_cast<uint64_t>(taps));
    Waveform h = Waveform::zeros(1, taps);
    for (Eigen::Index i = 0; i < taps; ++i) h.ch[0][i] = rng.uniform(-1.0, 1.0);
    Waveform fast = fft_convolve(x, h);

    Eigen::ArrayXd direct = Eigen::ArrayXd::Zero(x.frames());
    for (Eigen::Index n = 0; n < x.frames(); ++n)
      for (Eigen::Index k = 0; k < taps && k <= n; ++k)
        direct[n] += x.ch[0][n - k] * h.ch[0][k];
    CHECK((fast.ch[0] - direct).abs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("fft_convolve channel rules") {
  Waveform mono = random_waveform(1, 500, 77);
  Waveform st = random_waveform(2, 100, 78);
  Waveform out = fft_convolve(mono, st);
  CHECK(out.channels() == 2);
  Waveform out2 = fft_convolve(st, mono);
  CHECK(out2.channels() == 2);
}

TEST_CASE("wav round trip and rejection of foreign formats") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "vigas_wav_test";
  fs::create_directories(dir);
  std::string path = (dir / "rt.wav").string();

  Waveform w = random_waveform(2, 1600, 99);
  write_wav(path, w);
  Waveform back = read_wav(path);
  REQUIRE(back.channels() == 2);
  REQUIRE(back.frames() == 1600);
  for (int c = 0; c < 2; ++c)
    CHECK((back.ch[c] - w.ch[c]).abs().maxCoeff() < 1.0 / 32767.0);

  // Writing then reading is idempotent at 16-bit resolution.
  std::string path2 = (dir / "rt2.wav").string();
  write_wav(path2, back);
  Waveform again = read_wav(path2);
  for (int c = 0; c < 2; ++c)
    CHECK((again.ch[c] - back.ch[c]).abs().maxCoeff() == 0.0);

  std::string bad = (dir / "bad.wav").string();
  FILE* f = std::fopen(bad.c_str(), "wb");
  std::fputs("not a wav at all", f);
  std::fclose(f);
  CHECK_THROWS_AS(read_wav(bad), IoError);
  CHECK_THROWS_AS(read_wav((dir / "missing.wav").string()), IoError);
  fs::remove_all(dir);
}
