// include/vigas/baselines.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_BASELINES_H_
#define VIGAS_BASELINES_H_

#include <complex>
#include <vector>

#include "vigas/dataset.h"
#include "vigas/stft.h"
#include "vigas/waveform.h"

namespace vigas {

// Baseline 1: copy the input to the output.
Waveform baseline_input_copy(const Waveform& source);

// Per-channel complex frequency response, window_len/2+1 bins.
struct TransferFunction {
  int window_len = 0;
  std::vector<Eigen::ArrayXcd> ch;
};

// Welch-averaged Wiener estimate H = S_xy / (S_xx + lambda) per channel,
// lambda = 1e-3 * mean(S_xx). Throws EstimationFailed on a silent source.
TransferFunction tf_estimate(const Waveform& src, const Waveform& tgt,
                             const StftConfig& cfg);

// Applies a transfer function by STFT multiplication and inversion.
Waveform tf_apply(const TransferFunction& tf, const Waveform& src, const StftConfig& cfg);

struct TransferFunctionEntry {
  Eigen::VectorXd key;  // positions plus sin/cos-embedded angles
  TransferFunction tf;
};

// Key for the single-environment protocol: speaker position, source pose,
// target pose (angles embedded as sin/cos). With relative_only, just the
// 9-dim relative pose (novel-environment protocol).
Eigen::VectorXd tf_db_key(const ClipRecord& rec, bool relative_only = false);

// Builds one averaged entry per distinct key from the given clips.
std::vector<TransferFunctionEntry> tf_build_database(
    const std::vector<ClipRecord>& clips, const StftConfig& cfg,
    bool relative_only = false);

// Euclidean nearest entry; throws InvalidInput on an empty database.
const TransferFunctionEntry& tf_nearest_neighbor(
    const std::vector<TransferFunctionEntry>& db, const Eigen::VectorXd& key);

// Baseline 3: deconvolve the source by the analytic direct-path ear response
// of the source geometry, re-convolve with the target geometry's response,
// and scale by `gain`.
Waveform baseline_dsp(const ClipRecord& rec, double gain);

// 20-iteration golden-section search over log-gain in [0.01, 100] that
// minimizes the mean Mag of baseline_dsp on the given clips.
double dsp_search_gain(const std::vector<ClipRecord>& validation_clips,
                       const StftConfig& cfg);

}  // namespace vigas

#endif  // VIGAS_BASELINES_H_
