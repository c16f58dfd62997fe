// include/vigas/train.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_TRAIN_H_
#define VIGAS_TRAIN_H_

#include <string>
#include <vector>

#include "vigas/align.h"
#include "vigas/dataset.h"
#include "vigas/net.h"
#include "vigas/stft.h"

namespace vigas {

struct TrainConfig {
  double learning_rate = 0.001;
  int epochs = 200;
  int batch_size = 16;
  StftConfig loss_stft;
  double cutoff_hz = kSimCutoffHz;
  uint64_t seed = 0;
  bool align = true;
  bool enhancement_mode = false;
  int checkpoint_every = 10;
  Eigen::Index max_lag = kDefaultMaxLag;

  void validate() const;
};

// Eq.-style loss surface: mean L1 between the STFT magnitudes of the
// aligned prediction and the target's primary band.
double loss(const Waveform& a_l, const Waveform& a_t_primary, const StftConfig& cfg);

// Adam with beta1=0.9, beta2=0.999, eps=1e-8; a zero gradient leaves the
// parameters unchanged.
struct AdamState {
  Eigen::VectorXd m, v;
  int64_t steps = 0;

  void init(Eigen::Index n);
  void step(Eigen::VectorXd* params, const Eigen::VectorXd& grad, double lr);
};

// In enhancement mode the training target is the active speaker's clean
// near-range signal (duplicated to both channels); throws InvalidInput when
// the clean track is missing.
Waveform enhancement_target(const ClipRecord& rec);

// Preprocesses one clip: primary band of the source, target primary
// magnitudes, GCC-PHAT alignment lag (when enabled), conditioning features.
// In enhancement mode the pose is the emitter's pose relative to the source
// view.
TrainExample make_train_example(const ClipRecord& rec, const TrainConfig& cfg);

// One optimizer step on a batch; returns the batch loss.
double train_step(NetParams* params, AdamState* opt,
                  const std::vector<const TrainExample*>& batch, const TrainConfig& cfg);

struct TrainResult {
  int epochs_run = 0;
  double final_train_loss = 0.0;
  double best_val_loss = 0.0;
  int best_epoch = -1;
  std::string best_checkpoint;
  std::string last_checkpoint;
  std::string log_csv;
};

// Full training loop: seeded shuffling, periodic validation, best-by-val
// and last checkpoints, CSV loss log, resume from the last saved state.
TrainResult train(const TrainConfig& cfg, const NetConfig& net_cfg,
                  const Manifest& manifest, const std::string& out_dir);

}  // namespace vigas

#endif  // VIGAS_TRAIN_H_
