// src/metrics.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/metrics.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "vigas/baselines.h"
#include "vigas/checkpoint.h"
#include "vigas/common.h"
#include "vigas/fft.h"
#include "vigas/filters.h"
#include "vigas/threading.h"

namespace vigas {

double mag_distance(const Waveform& pred, const Waveform& gt, const StftConfig& cfg) {
  if (pred.channels() != gt.channels() || pred.frames() != gt.frames())
    throw InvalidInput("mag_distance: shape mismatch");
  Spectrogram gs = stft(gt, cfg);
  std::vector<Eigen::ArrayXXd> target_mag;
  target_mag.reserve(gs.ch.size());
  for (const auto& c : gs.ch) target_mag.push_back(c.abs());
  return magnitude_l1(pred, target_mag, cfg, nullptr);
}

namespace {

// noinline: keeps the compiler from FMA-contracting the trailing multiply
// into the caller's subtraction, so equal inputs give a bit-identical ratio
// and lre(x, x) is exactly zero.
__attribute__((noinline)) double lr_ratio_db(const Waveform& w) {
  constexpr double kFloor = 1e-12;
  double l = std::max(w.ch[0].square().sum(), kFloor);
  double r = std::max(w.ch[1].square().sum(), kFloor);
  return 10.0 * std::log10(l / r);
}

}  // namespace

double lre(const Waveform& pred, const Waveform& gt) {
  if (pred.channels() != 2 || gt.channels() != 2)
    throw InvalidInput("lre: stereo inputs required");
  return std::abs(lr_ratio_db(pred) - lr_ratio_db(gt));
}

namespace {

// Schroeder backward integration of an energy sequence, T20 line fit over
// the -5..-25 dB segment, extrapolated to 60 dB.
double rt60_from_energy(const Eigen::ArrayXd& h2, int sample_rate) {
  const Eigen::Index n = h2.size();
  Eigen::ArrayXd edc(n);
  double acc = 0.0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    acc += h2[i];
    edc[i] = acc;
  }
  if (edc[0] <= 0.0) throw EstimationFailed("rt60: silent impulse response");

  Eigen::ArrayXd db = 10.0 * (edc / edc[0]).max(1e-30).log10();

  Eigen::Index t5 = -1, t25 = -1;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (t5 < 0 && db[i] <= -5.0) t5 = i;
    if (t25 < 0 && db[i] <= -25.0) {
      t25 = i;
      break;
    }
  }
  if (t5 < 0 || t25 < 0 || t25 <= t5 + 1)
    throw EstimationFailed("rt60: decay curve never spans -5 to -25 dB");
  // A fit segment at the very tail measures the truncation of the backward
  // integral, not a decay.
  if (t25 > (n * 49) / 50)
    throw EstimationFailed("rt60: non-decaying response (tail-truncation artifact)");

  const auto len = static_cast<double>(t25 - t5 + 1);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (Eigen::Index i = t5; i <= t25; ++i) {
    double x = static_cast<double>(i);
    sx += x;
    sy += db[i];
    sxx += x * x;
    sxy += x * db[i];
  }
  double denom = len * sxx - sx * sx;
  double slope = (len * sxy - sx * sy) / denom;  // dB per sample
  if (!(slope < 0.0)) throw EstimationFailed("rt60: non-decaying curve");
  return 60.0 / (-slope) / static_cast<double>(sample_rate);
}

}  // namespace

double rt60_schroeder(const Waveform& rir) {
  rir.validate("rt60_schroeder");
  Eigen::ArrayXd h2 = Eigen::ArrayXd::Zero(rir.frames());
  for (const auto& c : rir.ch) h2 += c.square();
  return rt60_from_energy(h2, rir.sample_rate);
}

double rte(double pred_rt60, double gt_rt60) {
  if (!std::isfinite(pred_rt60) || !std::isfinite(gt_rt60))
    throw InvalidInput("rte: non-finite input");
  return std::abs(pred_rt60 - gt_rt60);
}

double rt60_from_clip(const Waveform& output, const Waveform& clean_emitter) {
  // A long-window Wiener estimate gives a response covering ~0.5 s, enough
  // for desk-scale reverberation tails.
  StftConfig cfg;
  cfg.window_len = 8192;
  cfg.hop = 1024;
  Waveform clean = clean_emitter;
  if (clean.channels() == 1 && output.channels() == 2)
    clean = Waveform::stereo(clean.ch[0], clean.ch[0], clean.sample_rate);
  TransferFunction tf = tf_estimate(clean, output, cfg);

  Eigen::ArrayXd h2 = Eigen::ArrayXd::Zero(cfg.window_len);
  for (const auto& ch : tf.ch) {
    std::vector<cplx> spec(ch.data(), ch.data() + ch.size());
    std::vector<double> h = irfft(spec, cfg.window_len);
    for (int i = 0; i < cfg.window_len; ++i)
      h2[i] += h[static_cast<size_t>(i)] * h[static_cast<size_t>(i)];
  }

  // The deconvolution is noisy: keep a causal window around the response
  // peak and subtract the estimation noise floor before integrating.
  Eigen::Index peak;
  h2.maxCoeff(&peak);
  const Eigen::Index start = std::max<Eigen::Index>(0, peak - 32);
  const Eigen::Index len =
      std::min<Eigen::Index>(h2.size() - start, static_cast<Eigen::Index>(0.4 * 16000));
  Eigen::ArrayXd win = h2.segment(start, len);
  const Eigen::Index tail = std::max<Eigen::Index>(1, len / 6);
  double noise = win.tail(tail).mean();
  win = (win - noise).max(0.0);
  return rt60_from_energy(win, output.sample_rate);
}

std::string method_name(EvalMethod m) {
  switch (m) {
    case EvalMethod::kGroundTruth: return "ground-truth";
    case EvalMethod::kInputCopy: return "input-copy";
    case EvalMethod::kTfEstimator: return "tf-estimator";
    case EvalMethod::kDsp: return "dsp";
    case EvalMethod::kVigas: return "vigas";
  }
  return "unknown";
}

EvalReport evaluate(EvalMethod method, const Manifest& manifest, const EvalOptions& opts) {
  auto entries = manifest.split(opts.split);
  if (entries.empty()) throw InvalidInput("evaluate: split '" + opts.split + "' is empty");

  std::vector<ClipRecord> clips(entries.size());
  parallel_for(entries.size(),
               [&](size_t i) { clips[i] = load_clip(manifest, *entries[i]); });

  // Method-specific one-time setup.
  std::vector<TransferFunctionEntry> tf_db;
  double dsp_gain = 1.0;
  NetParams params;
  if (method == EvalMethod::kTfEstimator) {
    auto fit_entries = manifest.split(opts.tf_fit_split);
    if (fit_entries.empty())
      throw InvalidInput("evaluate: tf fit split '" + opts.tf_fit_split + "' is empty");
    std::vector<ClipRecord> fit(fit_entries.size());
    parallel_for(fit_entries.size(),
                 [&](size_t i) { fit[i] = load_clip(manifest, *fit_entries[i]); });
    tf_db = tf_build_database(fit, opts.stft);
  } else if (method == EvalMethod::kDsp) {
    auto gain_entries = manifest.split(opts.dsp_gain_split);
    std::vector<ClipRecord> gain_clips(gain_entries.size());
    parallel_for(gain_entries.size(),
                 [&](size_t i) { gain_clips[i] = load_clip(manifest, *gain_entries[i]); });
    dsp_gain = gain_clips.empty() ? 1.0 : dsp_search_gain(gain_clips, opts.stft);
  } else if (method == EvalMethod::kVigas) {
    if (opts.checkpoint.empty())
      throw InvalidInput("evaluate: vigas method requires a checkpoint");
    params = load_checkpoint(opts.checkpoint);
  }

  EvalReport report;
  report.method = method_name(method);
  report.split = opts.split;
  report.rows.resize(clips.size());

  parallel_for(clips.size(), [&](size_t i) {
    const ClipRecord& rec = clips[i];
    Waveform pred;
    switch (method) {
      case EvalMethod::kGroundTruth:
        pred = rec.target_audio;
        break;
      case EvalMethod::kInputCopy:
        pred = baseline_input_copy(rec.source_audio);
        break;
      case EvalMethod::kTfEstimator: {
        const auto& entry = tf_nearest_neighbor(tf_db, tf_db_key(rec));
        pred = tf_apply(entry.tf, rec.source_audio, opts.stft);
        break;
      }
      case EvalMethod::kDsp:
        pred = baseline_dsp(rec, dsp_gain);
        break;
      case EvalMethod::kVigas: {
        Eigen::Vector4d v_l = Eigen::Vector4d::Zero();
        if (rec.bbox) v_l = bbox_feature(*rec.bbox);
        pred = synthesize(rec.source_audio, rec.source_img, v_l, rec.pose, params,
                          opts.cutoff_hz);
        break;
      }
    }

    EvalClipRow row;
    row.clip_id = rec.clip_id;
    row.mag = mag_distance(pred, rec.target_audio, opts.stft);
    row.lre = lre(pred, rec.target_audio);
    try {
      row.rte = rte(rt60_from_clip(pred, rec.clean_emitter_audio), rec.gt_rt60);
      row.has_rte = true;
    } catch (const EstimationFailed&) {
      row.has_rte = false;
    }
    report.rows[i] = std::move(row);
  });

  double mag_sum = 0.0, lre_sum = 0.0, rte_sum = 0.0;
  int rte_n = 0;
  for (const auto& r : report.rows) {
    mag_sum += r.mag;
    lre_sum += r.lre;
    if (r.has_rte) {
      rte_sum += r.rte;
      ++rte_n;
    }
  }
  const auto n = static_cast<double>(report.rows.size());
  report.mean_mag = mag_sum / n;
  report.mean_lre = lre_sum / n;
  report.mean_rte = rte_n > 0 ? rte_sum / rte_n : 0.0;
  report.rte_rows = rte_n;
  return report;
}

void write_report_csv(const std::string& path, const std::vector<EvalReport>& reports) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError(path + ": cannot open for writing");
  f << "method,split,clip_id,mag,lre,rte\n";
  char buf[256];
  for (const auto& rep : reports) {
    for (const auto& r : rep.rows) {
      if (r.has_rte)
        std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.6f,%.6f,%.6f\n", rep.method.c_str(),
                      rep.split.c_str(), r.clip_id.c_str(), r.mag, r.lre, r.rte);
      else
        std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.6f,%.6f,\n", rep.method.c_str(),
                      rep.split.c_str(), r.clip_id.c_str(), r.mag, r.lre);
      f << buf;
    }
  }
  if (!f) throw IoError(path + ": write failed");
}

std::string format_report_table(const std::vector<EvalReport>& reports) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-16s %-6s %8s %8s %8s %6s\n", "method", "split",
                "Mag", "LRE", "RTE", "clips");
  out += buf;
  out += std::string(56, '-') + "\n";
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof(buf), "%-16s %-6s %8.4f %8.4f %8.4f %6zu\n",
                  r.method.c_str(), r.split.c_str(), r.mean_mag, r.mean_lre, r.mean_rte,
                  r.rows.size());
    out += buf;
  }
  return out;
}

}  // namespace vigas
