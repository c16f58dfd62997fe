// src/train.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/train.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vigas/checkpoint.h"
#include "vigas/common.h"
#include "vigas/filters.h"
#include "vigas/localize.h"
#include "vigas/rng.h"
#include "vigas/threading.h"

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "train state i/o assumes a little-endian host");

namespace vigas {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidConfig("train: learning_rate must be positive");
  if (epochs <= 0) throw InvalidConfig("train: epochs must be positive");
  if (batch_size <= 0) throw InvalidConfig("train: batch_size must be positive");
  if (checkpoint_every <= 0) throw InvalidConfig("train: checkpoint_every must be positive");
  if (max_lag <= 0) throw InvalidConfig("train: max_lag must be positive");
}

double loss(const Waveform& a_l, const Waveform& a_t_primary, const StftConfig& cfg) {
  if (a_l.channels() != a_t_primary.channels() || a_l.frames() != a_t_primary.frames())
    throw InvalidInput("loss: shape mismatch");
  Spectrogram ts = stft(a_t_primary, cfg);
  std::vector<Eigen::ArrayXXd> target_mag;
  for (const auto& c : ts.ch) target_mag.push_back(c.abs());
  return magnitude_l1(a_l, target_mag, cfg, nullptr);
}

void AdamState::init(Eigen::Index n) {
  m = Eigen::VectorXd::Zero(n);
  v = Eigen::VectorXd::Zero(n);
  steps = 0;
}

void AdamState::step(Eigen::VectorXd* params, const Eigen::VectorXd& grad, double lr) {
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  if (m.size() != params->size()) throw InvalidInput("adam: state size mismatch");
  if (grad.size() != params->size()) throw InvalidInput("adam: gradient size mismatch");
  ++steps;
  m = kBeta1 * m + (1.0 - kBeta1) * grad;
  v = kBeta2 * v + (1.0 - kBeta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(steps));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(steps));
  params->array() -=
      lr * (m.array() / c1) / ((v.array() / c2).sqrt() + kEps);
}

Waveform enhancement_target(const ClipRecord& rec) {
  if (rec.clean_emitter_audio.channels() == 0 || rec.clean_emitter_audio.frames() == 0)
    throw InvalidInput("enhancement_target: clean emitter track missing for clip " +
                       rec.clip_id);
  const Eigen::ArrayXd& mono = rec.clean_emitter_audio.ch[0];
  return Waveform::stereo(mono, mono, rec.clean_emitter_audio.sample_rate);
}

TrainExample make_train_example(const ClipRecord& rec, const TrainConfig& cfg) {
  TrainExample ex;
  ex.clip_id = rec.clip_id;
  ex.a_c = band_split(rec.source_audio, cfg.cutoff_hz).primary;
  ex.image = rec.source_img;
  if (rec.bbox) ex.v_l = bbox_feature(*rec.bbox);

  Waveform target = cfg.enhancement_mode ? enhancement_target(rec) : rec.target_audio;
  if (cfg.enhancement_mode) {
    // The "viewpoint" to synthesize is the speaker itself.
    Viewpoint speaker;
    speaker.position = rec.speaker_position;
    speaker.yaw = rec.speaker_facing;
    ex.p_t = relative_pose(rec.src_viewpoint, speaker);
  } else {
    ex.p_t = rec.pose;
  }

  Waveform target_primary = band_split(target, cfg.cutoff_hz).primary;
  Spectrogram ts = stft(target_primary, cfg.loss_stft);
  for (const auto& c : ts.ch) ex.target_mag.push_back(c.abs());

  if (cfg.align) {
    LagEstimate est = gcc_phat(rec.source_audio, target, cfg.max_lag);
    ex.align_lag = est.degenerate ? 0 : est.lag;
  }
  return ex;
}

double train_step(NetParams* params, AdamState* opt,
                  const std::vector<const TrainExample*>& batch, const TrainConfig& cfg) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params->flat.size());
  double batch_loss = batch_loss_and_gradient(*params, batch, cfg.loss_stft, &grad);
  if (!grad.allFinite())
    throw NumericalError("train_step: non-finite gradient; aborting epoch");
  opt->step(&params->flat, grad, cfg.learning_rate);
  return batch_loss;
}

namespace {

constexpr char kStateMagic[8] = {'V', 'G', 'A', 'S', 'T', 'R', 'N', '1'};

uint64_t fnv1a(const uint8_t* data, size_t n) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct TrainState {
  int32_t next_epoch = 0;
  double best_val = std::numeric_limits<double>::infinity();
  int32_t best_epoch = -1;
  AdamState adam;
};

void save_train_state(const std::string& path, const TrainState& st) {
  std::vector<uint8_t> buf;
  buf.insert(buf.end(), kStateMagic, kStateMagic + 8);
  auto put = [&](const void* p, size_t n) {
    const auto* b = static_cast<const uint8_t*>(p);
    buf.insert(buf.end(), b, b + n);
  };
  put(&st.next_epoch, sizeof(st.next_epoch));
  put(&st.best_val, sizeof(st.best_val));
  put(&st.best_epoch, sizeof(st.best_epoch));
  put(&st.adam.steps, sizeof(st.adam.steps));
  uint64_t n = static_cast<uint64_t>(st.adam.m.size());
  put(&n, sizeof(n));
  put(st.adam.m.data(), sizeof(double) * n);
  put(st.adam.v.data(), sizeof(double) * n);
  uint64_t sum = fnv1a(buf.data(), buf.size());
  put(&sum, sizeof(sum));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path + ": cannot open for writing");
  f.write(reinterpret_cast<const char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (!f) throw IoError(path + ": write failed");
}

TrainState load_train_state(const std::string& path, Eigen::Index expected_params) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path + ": cannot open for reading");
  std::vector<uint8_t> buf((std::istreambuf_iterator<char>(f)),
                           std::istreambuf_iterator<char>());
  if (buf.size() < 8 + sizeof(uint64_t) || std::memcmp(buf.data(), kStateMagic, 8) != 0)
    throw IoError(path + ": not a training state file");
  size_t payload = buf.size() - sizeof(uint64_t);
  uint64_t stored;
  std::memcpy(&stored, buf.data() + payload, sizeof(stored));
  if (fnv1a(buf.data(), payload) != stored)
    throw IoError(path + ": training state checksum mismatch");

  size_t pos = 8;
  auto get = [&](void* p, size_t n) {
    if (pos + n > payload) throw IoError(path + ": truncated training state");
    std::memcpy(p, buf.data() + pos, n);
    pos += n;
  };
  TrainState st;
  get(&st.next_epoch, sizeof(st.next_epoch));
  get(&st.best_val, sizeof(st.best_val));
  get(&st.best_epoch, sizeof(st.best_epoch));
  get(&st.adam.steps, sizeof(st.adam.steps));
  uint64_t n;
  get(&n, sizeof(n));
  if (static_cast<Eigen::Index>(n) != expected_params)
    throw IoError(path + ": training state does not match the network size");
  st.adam.m.resize(static_cast<Eigen::Index>(n));
  st.adam.v.resize(static_cast<Eigen::Index>(n));
  get(st.adam.m.data(), sizeof(double) * n);
  get(st.adam.v.data(), sizeof(double) * n);
  return st;
}

// Rewrites the loss log keeping only rows for epochs < next_epoch, so a
// resumed run appends cleanly.
void trim_loss_log(const std::string& path, int next_epoch) {
  std::ifstream in(path);
  if (!in) return;
  std::vector<std::string> keep;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("epoch,", 0) == 0) {
      keep.push_back(line);
      continue;
    }
    std::istringstream ss(line);
    int epoch;
    char comma;
    if (ss >> epoch >> comma && epoch < next_epoch) keep.push_back(line);
  }
  in.close();
  std::ofstream out(path, std::ios::trunc);
  for (const auto& l : keep) out << l << "\n";
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const NetConfig& net_cfg,
                  const Manifest& manifest, const std::string& out_dir) {
  cfg.validate();
  net_cfg.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir + ": cannot create output directory");

  const std::string last_path = out_dir + "/ckpt_last.ckpt";
  const std::string best_path = out_dir + "/ckpt_best.ckpt";
  const std::string state_path = out_dir + "/train_state.bin";
  const std::string log_path = out_dir + "/loss_log.csv";

  // Load and preprocess the training and validation examples up front.
  auto load_examples = [&](const std::string& split) {
    auto entries = manifest.split(split);
    std::vector<TrainExample> out(entries.size());
    parallel_for(entries.size(), [&](size_t i) {
      out[i] = make_train_example(load_clip(manifest, *entries[i]), cfg);
    });
    return out;
  };
  std::vector<TrainExample> train_set = load_examples("train");
  std::vector<TrainExample> val_set = load_examples("val");
  if (train_set.empty()) throw InvalidInput("train: no clips in the train split");

  NetParams params;
  TrainState st;
  bool resumed = false;
  if (fs::exists(state_path) && fs::exists(last_path)) {
    params = load_checkpoint(last_path);
    if (params.flat.size() != param_count(net_cfg))
      throw InvalidConfig("train: checkpoint in " + out_dir +
                          " does not match the requested network config");
    st = load_train_state(state_path, params.flat.size());
    resumed = true;
  } else {
    params = NetParams::init(net_cfg, cfg.seed);
    st.adam.init(params.flat.size());
  }

  if (resumed)
    trim_loss_log(log_path, st.next_epoch);
  else {
    std::ofstream log(log_path, std::ios::trunc);
    if (!log) throw IoError(log_path + ": cannot open for writing");
    log << "epoch,train_loss,val_loss\n";
  }

  auto val_loss_of = [&](const NetParams& p) {
    if (val_set.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> losses(val_set.size());
    parallel_for(val_set.size(),
                 [&](size_t i) { losses[i] = example_loss(p, val_set[i], cfg.loss_stft); });
    double sum = 0.0;
    for (double l : losses) sum += l;
    return sum / static_cast<double>(losses.size());
  };

  TrainResult result;
  result.best_val_loss = st.best_val;
  result.best_epoch = st.best_epoch;

  std::vector<size_t> order(train_set.size());
  for (int epoch = st.next_epoch; epoch < cfg.epochs; ++epoch) {
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(cfg.seed, "shuffle", static_cast<uint64_t>(epoch));
    shuffle_rng.shuffle(order.begin(), order.end());

    double epoch_loss = 0.0;
    size_t seen = 0;
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      size_t end = std::min(order.size(), start + cfg.batch_size);
      std::vector<const TrainExample*> batch;
      batch.reserve(end - start);
      for (size_t i = start; i < end; ++i) batch.push_back(&train_set[order[i]]);
      double batch_loss = train_step(&params, &st.adam, batch, cfg);
      epoch_loss += batch_loss * static_cast<double>(batch.size());
      seen += batch.size();
    }
    epoch_loss /= static_cast<double>(seen);

    double vloss = val_loss_of(params);
    double tracked = std::isnan(vloss) ? epoch_loss : vloss;
    {
      std::ofstream log(log_path, std::ios::app);
      char buf[128];
      std::snprintf(buf, sizeof(buf), "%d,%.8f,%.8f\n", epoch, epoch_loss, tracked);
      log << buf;
    }

    if (tracked < st.best_val) {
      st.best_val = tracked;
      st.best_epoch = epoch;
      save_checkpoint(best_path, params);
    }
    st.next_epoch = epoch + 1;
    if ((epoch + 1) % cfg.checkpoint_every == 0 || epoch + 1 == cfg.epochs) {
      save_checkpoint(last_path, params);
      save_train_state(state_path, st);
    }
    result.final_train_loss = epoch_loss;
    result.epochs_run = epoch + 1;
  }

  // Cover the resume-complete case where the loop body never ran.
  if (!fs::exists(last_path)) save_checkpoint(last_path, params);
  if (!fs::exists(best_path)) save_checkpoint(best_path, params);

  result.best_val_loss = st.best_val;
  result.best_epoch = st.best_epoch;
  result.best_checkpoint = best_path;
  result.last_checkpoint = last_path;
  result.log_csv = log_path;
  return result;
}

}  // namespace vigas
