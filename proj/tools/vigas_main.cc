// tools/vigas_main.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Command-line front end: dataset generation, training, evaluation,
// single-clip inference, enhancement mode, and plot emission.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "vigas/baselines.h"
#include "vigas/checkpoint.h"
#include "vigas/common.h"
#include "vigas/config.h"
#include "vigas/dataset.h"
#include "vigas/metrics.h"
#include "vigas/net.h"
#include "vigas/plot.h"
#include "vigas/threading.h"
#include "vigas/train.h"
#include "vigas/wav_io.h"

namespace fs = std::filesystem;
using namespace vigas;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

std::string join_keys(const std::vector<std::string>& keys) {
  std::string out;
  for (const auto& k : keys) out += (out.empty() ? "" : ", ") + k;
  return out;
}

KeyValueConfig load_config_file(const std::string& path) {
  if (path.empty()) return KeyValueConfig::from_string("");
  return KeyValueConfig::load(path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError(path + ": cannot open for writing");
  f << text;
}

int cmd_gen_data(const std::string& config_path, const std::string& out_dir,
                 std::optional<uint64_t> seed, std::optional<int> scenes,
                 std::optional<int> clips_per_scene, std::optional<double> duration,
                 std::optional<std::string> split_mode, bool verbose) {
  DatasetConfig config;
  apply_config(load_config_file(config_path), &config);
  if (seed) config.seed = *seed;
  if (scenes) config.num_scenes = *scenes;
  if (clips_per_scene) config.clips_per_scene = *clips_per_scene;
  if (duration) config.speech_duration_s = *duration;
  if (split_mode) config.split_mode = *split_mode;

  std::cout << "# resolved gen-data config\n" << dump_config(config);
  Manifest manifest = generate_dataset(config, out_dir);
  write_text(out_dir + "/resolved.cfg", dump_config(config));

  size_t n_train = manifest.split("train").size();
  size_t n_val = manifest.split("val").size();
  size_t n_test = manifest.split("test").size();
  std::printf("dataset: %d scenes, %zu clips (train %zu / val %zu / test %zu) -> %s\n",
              manifest.num_scenes, manifest.clips.size(), n_train, n_val, n_test,
              out_dir.c_str());
  if (verbose)
    for (const auto& c : manifest.clips)
      std::printf("  %s scene=%d %d->%d offset=%lld split=%s\n", c.clip_id.c_str(),
                  c.scene_id, c.src_view, c.tgt_view,
                  static_cast<long long>(c.frame_offset), c.split.c_str());
  return kExitOk;
}

int cmd_train(const std::string& config_path, const std::string& data_dir,
              const std::string& out_dir, std::optional<uint64_t> seed,
              std::optional<int> epochs, std::optional<double> lr,
              std::optional<int> batch, bool ablate_visual, bool enhance) {
  TrainConfig cfg;
  NetConfig net_cfg;
  apply_config(load_config_file(config_path), &cfg, &net_cfg);
  if (seed) cfg.seed = *seed;
  if (epochs) cfg.epochs = *epochs;
  if (lr) cfg.learning_rate = *lr;
  if (batch) cfg.batch_size = *batch;
  if (enhance) cfg.enhancement_mode = true;
  if (ablate_visual) {
    net_cfg.use_visual = false;
    net_cfg.use_bbox = false;
  }

  Manifest manifest = load_manifest(data_dir);
  std::cout << "# resolved train config\n" << dump_config(cfg, net_cfg);
  fs::create_directories(out_dir);
  write_text(out_dir + "/resolved.cfg", dump_config(cfg, net_cfg));

  TrainResult result = train(cfg, net_cfg, manifest, out_dir);
  std::printf("trained %d epochs; final train loss %.6f; best val %.6f (epoch %d)\n",
              result.epochs_run, result.final_train_loss, result.best_val_loss,
              result.best_epoch);
  std::printf("checkpoints: %s (best), %s (last); log: %s\n",
              result.best_checkpoint.c_str(), result.last_checkpoint.c_str(),
              result.log_csv.c_str());
  return kExitOk;
}

int cmd_eval(const std::string& config_path, const std::string& data_dir,
             const std::string& out_dir, const std::string& methods_csv,
             const std::string& checkpoint, const std::string& checkpoint_novis,
             const std::string& split, bool assert_ordering) {
  TrainConfig cfg;
  NetConfig net_cfg;
  apply_config(load_config_file(config_path), &cfg, &net_cfg);

  Manifest manifest = load_manifest(data_dir);
  EvalOptions opts;
  opts.stft = cfg.loss_stft;
  opts.cutoff_hz = manifest.cutoff_hz;
  opts.split = split;

  std::vector<EvalReport> reports;
  std::istringstream ss(methods_csv);
  std::string name;
  while (std::getline(ss, name, ',')) {
    EvalOptions m_opts = opts;
    EvalMethod method;
    if (name == "gt") {
      method = EvalMethod::kGroundTruth;
    } else if (name == "input") {
      method = EvalMethod::kInputCopy;
    } else if (name == "tf") {
      method = EvalMethod::kTfEstimator;
    } else if (name == "dsp") {
      method = EvalMethod::kDsp;
    } else if (name == "vigas") {
      method = EvalMethod::kVigas;
      m_opts.checkpoint = checkpoint;
    } else if (name == "vigas-novis") {
      method = EvalMethod::kVigas;
      m_opts.checkpoint = checkpoint_novis;
    } else {
      throw InvalidInput("unknown eval method '" + name +
                         "' (expected gt,input,tf,dsp,vigas,vigas-novis)");
    }
    EvalReport rep = evaluate(method, manifest, m_opts);
    if (name == "vigas-novis") rep.method = "vigas-novis";
    reports.push_back(std::move(rep));
  }

  std::string table = format_report_table(reports);
  std::cout << table;
  fs::create_directories(out_dir);
  write_report_csv(out_dir + "/report.csv", reports);
  write_text(out_dir + "/report.txt", table);

  if (assert_ordering) {
    const EvalReport* vigas_rep = nullptr;
    const EvalReport* input_rep = nullptr;
    for (const auto& r : reports) {
      if (r.method == "vigas") vigas_rep = &r;
      if (r.method == "input-copy") input_rep = &r;
    }
    if (!vigas_rep || !input_rep)
      throw InvalidInput("--assert-ordering needs both 'vigas' and 'input' methods");
    bool ok = vigas_rep->mean_mag < input_rep->mean_mag &&
              vigas_rep->mean_lre < input_rep->mean_lre;
    std::printf("ordering: vigas Mag %.4f %s input %.4f; vigas LRE %.4f %s input %.4f\n",
                vigas_rep->mean_mag, ok ? "<" : "!<", input_rep->mean_mag,
                vigas_rep->mean_lre, ok ? "<" : "!<", input_rep->mean_lre);
    if (!ok) {
      std::fprintf(stderr, "ordering assertion failed\n");
      return kExitRuntime;
    }
  }
  return kExitOk;
}

int cmd_infer(const std::string& config_path, const std::string& data_dir,
              const std::string& clip_id, const std::string& checkpoint,
              const std::string& out_wav, bool plot) {
  TrainConfig cfg;
  NetConfig net_cfg;
  apply_config(load_config_file(config_path), &cfg, &net_cfg);

  Manifest manifest = load_manifest(data_dir);
  const ClipEntry* entry = nullptr;
  for (const auto& c : manifest.clips)
    if (c.clip_id == clip_id) entry = &c;
  if (!entry) throw InvalidInput("clip '" + clip_id + "' not found in manifest");

  ClipRecord rec = load_clip(manifest, *entry);
  NetParams params = load_checkpoint(checkpoint);
  Eigen::Vector4d v_l = Eigen::Vector4d::Zero();
  if (rec.bbox) v_l = bbox_feature(*rec.bbox);
  Waveform pred = synthesize(rec.source_audio, rec.source_img, v_l, rec.pose, params,
                             manifest.cutoff_hz);
  write_wav(out_wav, pred);
  std::printf("wrote %s (clip %s, mag vs target %.6f)\n", out_wav.c_str(),
              clip_id.c_str(), mag_distance(pred, rec.target_audio, cfg.loss_stft));

  if (plot) {
    std::string base = out_wav;
    if (base.size() > 4 && base.substr(base.size() - 4) == ".wav")
      base = base.substr(0, base.size() - 4);
    plot_waveforms(base + ".png", {{"prediction", pred}, {"target", rec.target_audio}});
    plot_spectrogram(base + "_spec.png", pred, cfg.loss_stft);
    std::printf("wrote %s.png and %s_spec.png\n", base.c_str(), base.c_str());
  }
  return kExitOk;
}

int cmd_plot(const std::string& loss_csv, const std::string& wav,
             const std::string& out_png, bool spectrogram) {
  if (!loss_csv.empty()) {
    plot_loss_curves(out_png, loss_csv);
  } else if (!wav.empty()) {
    Waveform w = read_wav(wav);
    if (spectrogram)
      plot_spectrogram(out_png, w, StftConfig{});
    else
      plot_waveforms(out_png, {{"wav", w}});
  } else {
    throw InvalidInput("plot: provide --loss-csv or --wav");
  }
  std::printf("wrote %s\n", out_png.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vigas: desk-scale novel-view acoustic synthesis pipeline"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads,
                 "worker thread cap (default: hardware, or VIGAS_THREADS)");

  std::string config_path, out_dir, data_dir;
  std::optional<uint64_t> seed;
  bool verbose = false;

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a simulated dataset");
  std::optional<int> g_scenes, g_clips;
  std::optional<double> g_duration;
  std::optional<std::string> g_split;
  gen->add_option("--config", config_path,
                  "key=value config file; keys: " + join_keys(dataset_config_keys()));
  gen->add_option("--out", out_dir, "output dataset directory")->required();
  gen->add_option("--seed", seed, "root seed (overrides config)");
  gen->add_option("--scenes", g_scenes, "number of scenes");
  gen->add_option("--clips-per-scene", g_clips, "clips sampled per scene");
  gen->add_option("--duration", g_duration, "speech duration per scene, seconds");
  gen->add_option("--split-mode", g_split, "'scene' or 'clip' split assignment");
  gen->add_flag("-v,--verbose", verbose, "list every clip");

  // train / enhance
  auto add_train_opts = [&](CLI::App* cmd, std::optional<int>& epochs,
                            std::optional<double>& lr, std::optional<int>& batch,
                            bool& ablate) {
    cmd->add_option("--config", config_path,
                    "key=value config file; keys: " + join_keys(train_config_keys()));
    cmd->add_option("--data", data_dir, "dataset directory")->required();
    cmd->add_option("--out", out_dir, "run output directory")->required();
    cmd->add_option("--seed", seed, "root seed (overrides config)");
    cmd->add_option("--epochs", epochs, "training epochs");
    cmd->add_option("--lr", lr, "learning rate");
    cmd->add_option("--batch", batch, "batch size");
    cmd->add_flag("--ablate-visual", ablate,
                  "train without visual features or speaker boxes");
  };
  auto* tr = app.add_subcommand("train", "train the synthesis network");
  std::optional<int> t_epochs, t_batch;
  std::optional<double> t_lr;
  bool t_ablate = false, t_enhance = false;
  add_train_opts(tr, t_epochs, t_lr, t_batch, t_ablate);
  tr->add_flag("--enhance", t_enhance, "speech-enhancement targets");

  auto* enh = app.add_subcommand("enhance", "train in speech-enhancement mode");
  std::optional<int> e_epochs, e_batch;
  std::optional<double> e_lr;
  bool e_ablate = false;
  add_train_opts(enh, e_epochs, e_lr, e_batch, e_ablate);

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate methods on a split");
  std::string methods = "input,vigas", checkpoint, checkpoint_novis, split = "test";
  bool assert_ordering = false;
  ev->add_option("--config", config_path,
                 "key=value config file; keys: " + join_keys(train_config_keys()));
  ev->add_option("--data", data_dir, "dataset directory")->required();
  ev->add_option("--out", out_dir, "report output directory")->required();
  ev->add_option("--methods", methods, "comma list: gt,input,tf,dsp,vigas,vigas-novis");
  ev->add_option("--checkpoint", checkpoint, "checkpoint for the 'vigas' method");
  ev->add_option("--checkpoint-novis", checkpoint_novis,
                 "checkpoint for the 'vigas-novis' method");
  ev->add_option("--split", split, "manifest split to evaluate");
  ev->add_flag("--assert-ordering", assert_ordering,
               "exit nonzero unless vigas beats input-copy on Mag and LRE");

  // infer
  auto* in = app.add_subcommand("infer", "synthesize one clip with a checkpoint");
  std::string clip_id, out_wav = "prediction.wav";
  bool do_plot = false;
  in->add_option("--config", config_path, "key=value config file");
  in->add_option("--data", data_dir, "dataset directory")->required();
  in->add_option("--clip", clip_id, "clip id from the manifest")->required();
  in->add_option("--checkpoint", checkpoint, "trained checkpoint")->required();
  in->add_option("--out-wav", out_wav, "output wav path");
  in->add_flag("--plot", do_plot, "also write waveform/spectrogram PNGs");

  // plot
  auto* pl = app.add_subcommand("plot", "render PNG plots");
  std::string loss_csv, wav_path, out_png = "plot.png";
  bool spec = false;
  pl->add_option("--loss-csv", loss_csv, "loss_log.csv from a training run");
  pl->add_option("--wav", wav_path, "wav file to plot");
  pl->add_option("--out", out_png, "output png path");
  pl->add_flag("--spectrogram", spec, "plot a spectrogram instead of waveforms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  set_max_threads(threads);
  try {
    if (gen->parsed())
      return cmd_gen_data(config_path, out_dir, seed, g_scenes, g_clips, g_duration,
                          g_split, verbose);
    if (tr->parsed())
      return cmd_train(config_path, data_dir, out_dir, seed, t_epochs, t_lr, t_batch,
                       t_ablate, t_enhance);
    if (enh->parsed())
      return cmd_train(config_path, data_dir, out_dir, seed, e_epochs, e_lr, e_batch,
                       e_ablate, /*enhance=*/true);
    if (ev->parsed())
      return cmd_eval(config_path, data_dir, out_dir, methods, checkpoint,
                      checkpoint_novis, split, assert_ordering);
    if (in->parsed())
      return cmd_infer(config_path, data_dir, clip_id, checkpoint, out_wav, do_plot);
    if (pl->parsed()) return cmd_plot(loss_csv, wav_path, out_png, spec);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
