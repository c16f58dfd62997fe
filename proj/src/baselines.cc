// src/baselines.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/baselines.h"

#include <cmath>
#include <map>

#include "vigas/common.h"
#include "vigas/fft.h"
#include "vigas/metrics.h"

namespace vigas {

Waveform baseline_input_copy(const Waveform& source) { return source; }

TransferFunction tf_estimate(const Waveform& src, const Waveform& tgt,
                             const StftConfig& cfg) {
  src.validate("tf_estimate: src");
  tgt.validate("tf_estimate: tgt");
  if (src.channels() != tgt.channels() || src.frames() != tgt.frames())
    throw InvalidInput("tf_estimate: aligned equal-length clips required");
  const int n = cfg.window_len;
  const int hop = n / 2;
  if (src.frames() < n) throw InvalidInput("tf_estimate: clip shorter than the window");

  Eigen::ArrayXd win = hann_window(n);
  const auto n_seg = static_cast<Eigen::Index>((src.frames() - n) / hop) + 1;

  TransferFunction tf;
  tf.window_len = n;
  for (int c = 0; c < src.channels(); ++c) {
    Eigen::ArrayXd sxx = Eigen::ArrayXd::Zero(n / 2 + 1);
    Eigen::ArrayXcd sxy = Eigen::ArrayXcd::Zero(n / 2 + 1);
    std::vector<double> frame(n);
    for (Eigen::Index s = 0; s < n_seg; ++s) {
      for (int i = 0; i < n; ++i) frame[i] = win[i] * src.ch[c][s * hop + i];
      auto xs = rfft(frame.data(), n, n);
      for (int i = 0; i < n; ++i) frame[i] = win[i] * tgt.ch[c][s * hop + i];
      auto ys = rfft(frame.data(), n, n);
      for (Eigen::Index k = 0; k < sxx.size(); ++k) {
        sxx[k] += std::norm(xs[static_cast<size_t>(k)]);
        sxy[k] += std::conj(xs[static_cast<size_t>(k)]) * ys[static_cast<size_t>(k)];
      }
    }
    sxx /= static_cast<double>(n_seg);
    sxy /= static_cast<double>(n_seg);
    double lambda = 1e-3 * sxx.mean();
    if (!(lambda > 0.0)) throw EstimationFailed("tf_estimate: silent source");
    tf.ch.push_back(sxy / (sxx + lambda));
  }
  return tf;
}

Waveform tf_apply(const TransferFunction& tf, const Waveform& src, const StftConfig& cfg) {
  if (tf.window_len != cfg.window_len)
    throw InvalidInput("tf_apply: transfer function bins do not match the STFT config");
  if (static_cast<int>(tf.ch.size()) != src.channels())
    throw InvalidInput("tf_apply: channel count mismatch");
  Spectrogram s = stft(src, cfg);
  for (int c = 0; c < s.channels(); ++c)
    s.ch[c].colwise() *= tf.ch[c];
  return istft(s);
}

Eigen::VectorXd tf_db_key(const ClipRecord& rec, bool relative_only) {
  if (relative_only) return rec.pose;
  auto pose_block = [](const Viewpoint& v) {
    Eigen::VectorXd p(9);
    p << v.position.x(), v.position.y(), v.position.z(), std::sin(v.yaw), std::cos(v.yaw),
        std::sin(v.pitch), std::cos(v.pitch), std::sin(v.roll), std::cos(v.roll);
    return p;
  };
  Eigen::VectorXd key(3 + 9 + 9);
  key.head<3>() = rec.speaker_position;
  key.segment<9>(3) = pose_block(rec.src_viewpoint);
  key.tail<9>() = pose_block(rec.tgt_viewpoint);
  return key;
}

std::vector<TransferFunctionEntry> tf_build_database(const std::vector<ClipRecord>& clips,
                                                     const StftConfig& cfg,
                                                     bool relative_only) {
  // One averaged response per distinct key: clips of the same pair share
  // identical geometry, so exact key equality groups them.
  struct Accum {
    Eigen::VectorXd key;
    std::vector<Eigen::ArrayXcd> sum;
    int count = 0;
  };
  std::map<std::string, Accum> groups;
  for (const auto& rec : clips) {
    Eigen::VectorXd key = tf_db_key(rec, relative_only);
    std::string id(reinterpret_cast<const char*>(key.data()),
                   sizeof(double) * static_cast<size_t>(key.size()));
    TransferFunction tf;
    try {
      tf = tf_estimate(rec.source_audio, rec.target_audio, cfg);
    } catch (const EstimationFailed&) {
      continue;  // silent clip contributes nothing
    }
    auto& acc = groups[id];
    if (acc.count == 0) {
      acc.key = key;
      acc.sum.assign(tf.ch.begin(), tf.ch.end());
    } else {
      for (size_t c = 0; c < tf.ch.size(); ++c) acc.sum[c] += tf.ch[c];
    }
    ++acc.count;
  }

  std::vector<TransferFunctionEntry> db;
  for (auto& [id, acc] : groups) {
    TransferFunctionEntry entry;
    entry.key = acc.key;
    entry.tf.window_len = cfg.window_len;
    for (auto& s : acc.sum) entry.tf.ch.push_back(s / static_cast<double>(acc.count));
    db.push_back(std::move(entry));
  }
  return db;
}

const TransferFunctionEntry& tf_nearest_neighbor(
    const std::vector<TransferFunctionEntry>& db, const Eigen::VectorXd& key) {
  if (db.empty()) throw InvalidInput("tf_nearest_neighbor: empty database");
  size_t best = 0;
  double best_dist = (db[0].key - key).squaredNorm();
  for (size_t i = 1; i < db.size(); ++i) {
    double d = (db[i].key - key).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return db[best];
}

Waveform baseline_dsp(const ClipRecord& rec, double gain) {
  if (rec.source_audio.channels() != 2)
    throw InvalidInput("dsp baseline: stereo source required");
  if (!rec.room.contains(rec.speaker_position))
    throw InvalidInput("dsp baseline: geometry missing or inconsistent");

  Emitter em;
  em.position = rec.speaker_position;
  em.facing_yaw = rec.speaker_facing;
  em.directivity_index = rec.directivity_index;
  Waveform d_src = binaural_rir(rec.room, em, rec.src_viewpoint, 0);
  Waveform d_tgt = binaural_rir(rec.room, em, rec.tgt_viewpoint, 0);

  const Eigen::Index frames = rec.source_audio.frames();
  const size_t nfft =
      next_pow2(static_cast<size_t>(frames + std::max(d_src.frames(), d_tgt.frames())));

  // Regularized per-channel inverse of the source ear response, averaged to
  // a mono speech estimate.
  std::vector<cplx> speech(nfft / 2 + 1, cplx(0.0, 0.0));
  for (int c = 0; c < 2; ++c) {
    auto xs = rfft(rec.source_audio.ch[c].data(), frames, nfft);
    auto ds = rfft(d_src.ch[c].data(), d_src.frames(), nfft);
    double peak2 = 0.0;
    for (const auto& v : ds) peak2 = std::max(peak2, std::norm(v));
    double lambda = 1e-3 * peak2;
    if (!(lambda > 0.0)) throw InvalidInput("dsp baseline: degenerate source response");
    for (size_t k = 0; k < speech.size(); ++k)
      speech[k] += 0.5 * xs[k] * std::conj(ds[k]) / (std::norm(ds[k]) + lambda);
  }

  Waveform out = Waveform::zeros(2, frames, rec.source_audio.sample_rate);
  for (int c = 0; c < 2; ++c) {
    auto dt = rfft(d_tgt.ch[c].data(), d_tgt.frames(), nfft);
    std::vector<cplx> prod(speech.size());
    for (size_t k = 0; k < speech.size(); ++k) prod[k] = speech[k] * dt[k];
    auto y = irfft(prod, nfft);
    for (Eigen::Index i = 0; i < frames; ++i)
      out.ch[c][i] = gain * y[static_cast<size_t>(i)];
  }
  return out;
}

double dsp_search_gain(const std::vector<ClipRecord>& validation_clips,
                       const StftConfig& cfg) {
  if (validation_clips.empty())
    throw InvalidInput("dsp_search_gain: no validation clips");

  // |STFT(g*x)| = g*|STFT(x)|, so precompute unit-gain magnitudes once and
  // search over the scalar only.
  std::vector<std::vector<Eigen::ArrayXXd>> pred_mag, tgt_mag;
  for (const auto& rec : validation_clips) {
    Waveform unit = baseline_dsp(rec, 1.0);
    Spectrogram ps = stft(unit, cfg), ts = stft(rec.target_audio, cfg);
    std::vector<Eigen::ArrayXXd> pm, tm;
    for (const auto& c : ps.ch) pm.push_back(c.abs());
    for (const auto& c : ts.ch) tm.push_back(c.abs());
    pred_mag.push_back(std::move(pm));
    tgt_mag.push_back(std::move(tm));
  }

  auto mean_mag = [&](double g) {
    double total = 0.0;
    for (size_t i = 0; i < pred_mag.size(); ++i) {
      double clip = 0.0, count = 0.0;
      for (size_t c = 0; c < pred_mag[i].size(); ++c) {
        clip += (g * pred_mag[i][c] - tgt_mag[i][c]).abs().sum();
        count += static_cast<double>(pred_mag[i][c].size());
      }
      total += clip / count;
    }
    return total / static_cast<double>(pred_mag.size());
  };

  // Golden-section search on log-gain over [0.01, 100]; the objective is
  // convex in the gain.
  double lo = std::log(0.01), hi = std::log(100.0);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = mean_mag(std::exp(x1)), f2 = mean_mag(std::exp(x2));
  for (int it = 0; it < 20; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = mean_mag(std::exp(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = mean_mag(std::exp(x2));
    }
  }
  return std::exp(0.5 * (lo + hi));
}

}  // namespace vigas
