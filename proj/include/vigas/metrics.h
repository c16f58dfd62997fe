// include/vigas/metrics.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_METRICS_H_
#define VIGAS_METRICS_H_

#include <string>
#include <vector>

#include "vigas/dataset.h"
#include "vigas/net.h"
#include "vigas/stft.h"
#include "vigas/waveform.h"

namespace vigas {

// Magnitude spectrogram distance: the same mean-L1 computation as the
// training loss, on the two waveforms' STFT magnitudes.
double mag_distance(const Waveform& pred, const Waveform& gt, const StftConfig& cfg);

// Left-right energy ratio error in dB, energies floored at 1e-12.
double lre(const Waveform& pred, const Waveform& gt);

// RT60 via backward (Schroeder) integration of the squared RIR: dB decay
// curve, least-squares line over the -5..-25 dB segment, extrapolated to 60
// dB. Throws EstimationFailed when the curve never reaches -25 dB.
double rt60_schroeder(const Waveform& rir);

double rte(double pred_rt60, double gt_rt60);

// Recovers a method's effective response by Wiener-deconvolving its output
// clip against the clean emitter signal, then estimates RT60 from it.
// Throws EstimationFailed when the decay curve is unusable.
double rt60_from_clip(const Waveform& output, const Waveform& clean_emitter);

enum class EvalMethod {
  kGroundTruth,  // oracle: prediction == target (sanity rows)
  kInputCopy,
  kTfEstimator,
  kDsp,
  kVigas,
};

std::string method_name(EvalMethod m);

struct EvalClipRow {
  std::string clip_id;
  double mag = 0.0;
  double lre = 0.0;
  double rte = 0.0;
  bool has_rte = false;
};

struct EvalReport {
  std::string method;
  std::string split;
  std::vector<EvalClipRow> rows;
  double mean_mag = 0.0;
  double mean_lre = 0.0;
  double mean_rte = 0.0;  // over rows with a recoverable response
  int rte_rows = 0;
};

struct EvalOptions {
  StftConfig stft;
  double cutoff_hz = kSimCutoffHz;
  std::string split = "test";
  // Checkpoint path for EvalMethod::kVigas.
  std::string checkpoint;
  // Splits used to fit the non-learned baselines.
  std::string tf_fit_split = "train";
  std::string dsp_gain_split = "val";
};

// Runs one method over every clip of the split; deterministic given the
// method, checkpoint, and split.
EvalReport evaluate(EvalMethod method, const Manifest& manifest, const EvalOptions& opts);

// CSV with method,split,clip_id,mag,lre,rte columns (one file per run) and
// an aligned aggregate table.
void write_report_csv(const std::string& path, const std::vector<EvalReport>& reports);
std::string format_report_table(const std::vector<EvalReport>& reports);

}  // namespace vigas

#endif  // VIGAS_METRICS_H_
