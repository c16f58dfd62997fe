// src/config.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/config.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "vigas/common.h"

namespace vigas {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError(path + ": cannot open config file");
  std::stringstream ss;
  ss << f.rdbuf();
  return from_string(ss.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
  KeyValueConfig kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidConfig("config line " + std::to_string(lineno) +
                          ": expected key=value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw InvalidConfig("config line " + std::to_string(lineno) + ": empty key");
    kv.entries_[key] = value;
  }
  return kv;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    size_t used;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw InvalidConfig("config key '" + key + "': not a number: '" + it->second + "'");
  }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    size_t used;
    int v = std::stoi(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw InvalidConfig("config key '" + key + "': not an integer: '" + it->second + "'");
  }
}

uint64_t KeyValueConfig::get_uint64(const std::string& key, uint64_t fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    size_t used;
    uint64_t v = std::stoull(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw InvalidConfig("config key '" + key + "': not an integer: '" + it->second + "'");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidConfig("config key '" + key + "': not a boolean: '" + v + "'");
}

void KeyValueConfig::check_known(const std::vector<std::string>& known) const {
  std::string bad;
  for (const auto& [key, value] : entries_) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      bad += (bad.empty() ? "" : ", ") + key;
  }
  if (!bad.empty()) throw InvalidConfig("unknown config keys: " + bad);
}

std::vector<std::string> train_config_keys() {
  return {"learning_rate", "epochs",           "batch_size",
          "stft_window",   "stft_hop",         "cutoff_hz",
          "seed",          "align",            "enhancement_mode",
          "checkpoint_every", "max_lag",
          "net.channels",  "net.num_layers",   "net.num_blocks",
          "net.dilation_base", "net.kernel",   "net.fusion_hidden",
          "net.fusion_out", "net.visual_reduce_channels", "net.image_size",
          "net.use_visual", "net.use_bbox"};
}

std::vector<std::string> dataset_config_keys() {
  return {"scenes",        "clips_per_scene", "speech_duration_s",
          "max_order",     "seed",            "cutoff_hz",
          "split_mode",    "train_frac",      "val_frac",
          "room_min",      "room_max",        "room_height_min",
          "room_height_max", "absorption_min", "absorption_max",
          "emitter_min_sep", "emitter_max_sep", "viewpoint_radius",
          "wall_margin",   "min_view_emitter_dist", "directivity_index"};
}

void apply_config(const KeyValueConfig& kv, TrainConfig* train, NetConfig* net) {
  kv.check_known(train_config_keys());
  train->learning_rate = kv.get_double("learning_rate", train->learning_rate);
  train->epochs = kv.get_int("epochs", train->epochs);
  train->batch_size = kv.get_int("batch_size", train->batch_size);
  train->loss_stft.window_len = kv.get_int("stft_window", train->loss_stft.window_len);
  train->loss_stft.hop = kv.get_int("stft_hop", train->loss_stft.hop);
  train->cutoff_hz = kv.get_double("cutoff_hz", train->cutoff_hz);
  train->seed = kv.get_uint64("seed", train->seed);
  train->align = kv.get_bool("align", train->align);
  train->enhancement_mode = kv.get_bool("enhancement_mode", train->enhancement_mode);
  train->checkpoint_every = kv.get_int("checkpoint_every", train->checkpoint_every);
  train->max_lag = kv.get_int("max_lag", static_cast<int>(train->max_lag));
  net->channels = kv.get_int("net.channels", net->channels);
  net->num_layers = kv.get_int("net.num_layers", net->num_layers);
  net->num_blocks = kv.get_int("net.num_blocks", net->num_blocks);
  net->dilation_base = kv.get_int("net.dilation_base", net->dilation_base);
  net->kernel = kv.get_int("net.kernel", net->kernel);
  net->fusion_hidden = kv.get_int("net.fusion_hidden", net->fusion_hidden);
  net->fusion_out = kv.get_int("net.fusion_out", net->fusion_out);
  net->visual_reduce_channels =
      kv.get_int("net.visual_reduce_channels", net->visual_reduce_channels);
  net->image_size = kv.get_int("net.image_size", net->image_size);
  net->use_visual = kv.get_bool("net.use_visual", net->use_visual);
  net->use_bbox = kv.get_bool("net.use_bbox", net->use_bbox);
}

void apply_config(const KeyValueConfig& kv, DatasetConfig* d) {
  kv.check_known(dataset_config_keys());
  d->num_scenes = kv.get_int("scenes", d->num_scenes);
  d->clips_per_scene = kv.get_int("clips_per_scene", d->clips_per_scene);
  d->speech_duration_s = kv.get_double("speech_duration_s", d->speech_duration_s);
  d->max_order = kv.get_int("max_order", d->max_order);
  d->seed = kv.get_uint64("seed", d->seed);
  d->cutoff_hz = kv.get_double("cutoff_hz", d->cutoff_hz);
  d->split_mode = kv.get_string("split_mode", d->split_mode);
  d->train_frac = kv.get_double("train_frac", d->train_frac);
  d->val_frac = kv.get_double("val_frac", d->val_frac);
  d->scene.room_min = kv.get_double("room_min", d->scene.room_min);
  d->scene.room_max = kv.get_double("room_max", d->scene.room_max);
  d->scene.room_height_min = kv.get_double("room_height_min", d->scene.room_height_min);
  d->scene.room_height_max = kv.get_double("room_height_max", d->scene.room_height_max);
  d->scene.absorption_min = kv.get_double("absorption_min", d->scene.absorption_min);
  d->scene.absorption_max = kv.get_double("absorption_max", d->scene.absorption_max);
  d->scene.emitter_min_sep = kv.get_double("emitter_min_sep", d->scene.emitter_min_sep);
  d->scene.emitter_max_sep = kv.get_double("emitter_max_sep", d->scene.emitter_max_sep);
  d->scene.viewpoint_radius = kv.get_double("viewpoint_radius", d->scene.viewpoint_radius);
  d->scene.wall_margin = kv.get_double("wall_margin", d->scene.wall_margin);
  d->scene.min_view_emitter_dist =
      kv.get_double("min_view_emitter_dist", d->scene.min_view_emitter_dist);
  d->scene.directivity_index =
      kv.get_double("directivity_index", d->scene.directivity_index);
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string dump_config(const TrainConfig& t, const NetConfig& n) {
  std::string out;
  out += "learning_rate = " + fmt_double(t.learning_rate) + "\n";
  out += "epochs = " + std::to_string(t.epochs) + "\n";
  out += "batch_size = " + std::to_string(t.batch_size) + "\n";
  out += "stft_window = " + std::to_string(t.loss_stft.window_len) + "\n";
  out += "stft_hop = " + std::to_string(t.loss_stft.hop) + "\n";
  out += "cutoff_hz = " + fmt_double(t.cutoff_hz) + "\n";
  out += "seed = " + std::to_string(t.seed) + "\n";
  out += std::string("align = ") + (t.align ? "true" : "false") + "\n";
  out += std::string("enhancement_mode = ") + (t.enhancement_mode ? "true" : "false") + "\n";
  out += "checkpoint_every = " + std::to_string(t.checkpoint_every) + "\n";
  out += "max_lag = " + std::to_string(t.max_lag) + "\n";
  out += "net.channels = " + std::to_string(n.channels) + "\n";
  out += "net.num_layers = " + std::to_string(n.num_layers) + "\n";
  out += "net.num_blocks = " + std::to_string(n.num_blocks) + "\n";
  out += "net.dilation_base = " + std::to_string(n.dilation_base) + "\n";
  out += "net.kernel = " + std::to_string(n.kernel) + "\n";
  out += "net.fusion_hidden = " + std::to_string(n.fusion_hidden) + "\n";
  out += "net.fusion_out = " + std::to_string(n.fusion_out) + "\n";
  out += "net.visual_reduce_channels = " + std::to_string(n.visual_reduce_channels) + "\n";
  out += "net.image_size = " + std::to_string(n.image_size) + "\n";
  out += std::string("net.use_visual = ") + (n.use_visual ? "true" : "false") + "\n";
  out += std::string("net.use_bbox = ") + (n.use_bbox ? "true" : "false") + "\n";
  return out;
}

std::string dump_config(const DatasetConfig& d) {
  std::string out;
  out += "scenes = " + std::to_string(d.num_scenes) + "\n";
  out += "clips_per_scene = " + std::to_string(d.clips_per_scene) + "\n";
  out += "speech_duration_s = " + fmt_double(d.speech_duration_s) + "\n";
  out += "max_order = " + std::to_string(d.max_order) + "\n";
  out += "seed = " + std::to_string(d.seed) + "\n";
  out += "cutoff_hz = " + fmt_double(d.cutoff_hz) + "\n";
  out += "split_mode = " + d.split_mode + "\n";
  out += "train_frac = " + fmt_double(d.train_frac) + "\n";
  out += "val_frac = " + fmt_double(d.val_frac) + "\n";
  out += "room_min = " + fmt_double(d.scene.room_min) + "\n";
  out += "room_max = " + fmt_double(d.scene.room_max) + "\n";
  out += "room_height_min = " + fmt_double(d.scene.room_height_min) + "\n";
  out += "room_height_max = " + fmt_double(d.scene.room_height_max) + "\n";
  out += "absorption_min = " + fmt_double(d.scene.absorption_min) + "\n";
  out += "absorption_max = " + fmt_double(d.scene.absorption_max) + "\n";
  out += "emitter_min_sep = " + fmt_double(d.scene.emitter_min_sep) + "\n";
  out += "emitter_max_sep = " + fmt_double(d.scene.emitter_max_sep) + "\n";
  out += "viewpoint_radius = " + fmt_double(d.scene.viewpoint_radius) + "\n";
  out += "wall_margin = " + fmt_double(d.scene.wall_margin) + "\n";
  out += "min_view_emitter_dist = " + fmt_double(d.scene.min_view_emitter_dist) + "\n";
  out += "directivity_index = " + fmt_double(d.scene.directivity_index) + "\n";
  return out;
}

}  // namespace vigas
