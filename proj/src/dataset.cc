// src/dataset.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/dataset.h"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "vigas/common.h"
#include "vigas/filters.h"
#include "vigas/metrics.h"
#include "vigas/threading.h"
#include "vigas/wav_io.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace vigas {

namespace {

// Received audio is scaled by this fixed gain so 16-bit WAVs use a sensible
// range (1/(4 pi d) is a few percent at conversation distance).
constexpr double kReceivedGain = 5.0;

std::string scene_dir(const std::string& root, int scene_id) {
  return root + "/scenes/scene_" + std::to_string(scene_id);
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
Vec3 vec3_from_json(const json& j) { return Vec3(j[0], j[1], j[2]); }

struct SceneOutput {
  std::vector<ClipEntry> clips;
};

SceneOutput generate_scene(const DatasetConfig& config, const std::string& out_dir,
                           int scene_id) {
  Rng scene_rng(config.seed, "scene", static_cast<uint64_t>(scene_id));
  Scene scene = sample_scene(scene_rng, config.scene);

  Rng speech_rng(config.seed, "speech", static_cast<uint64_t>(scene_id));
  Waveform speech = synth_speech(speech_rng, config.speech_duration_s);
  const Eigen::Index frames = speech.frames();

  const std::string dir = scene_dir(out_dir, scene_id);
  fs::create_directories(dir);

  // Near-range tracks: the active emitter speaks, the other is silent.
  for (size_t e = 0; e < scene.emitters.size(); ++e) {
    Waveform track = static_cast<int>(e) == scene.active_emitter
                         ? speech
                         : Waveform::zeros(1, frames);
    write_wav(dir + "/emitter" + std::to_string(e) + ".wav", track);
  }

  SceneMeta meta;
  meta.room = scene.room;
  for (const auto& e : scene.emitters) {
    meta.emitter_positions.push_back(e.position);
    meta.emitter_facings.push_back(e.facing_yaw);
  }
  meta.directivity_index = config.scene.directivity_index;
  meta.active_emitter = scene.active_emitter;
  meta.viewpoints = scene.viewpoints;
  meta.frames = frames;
  meta.max_order = config.max_order;
  meta.boxes.resize(scene.viewpoints.size());
  meta.rt60.assign(scene.emitters.size(),
                   std::vector<double>(scene.viewpoints.size(), 0.0));

  for (size_t k = 0; k < scene.viewpoints.size(); ++k) {
    const Viewpoint& vp = scene.viewpoints[k];
    Waveform rir = binaural_rir(scene.room, scene.emitters[scene.active_emitter], vp,
                                config.max_order);
    Waveform received = fft_convolve(speech, rir);
    for (auto& c : received.ch) c *= kReceivedGain;
    write_wav(dir + "/view" + std::to_string(k) + ".wav", received);

    RenderResult render = render_view(scene, vp);
    write_view_image(dir + "/view" + std::to_string(k) + ".img", render.image);
    meta.boxes[k] = render.boxes;

    for (size_t e = 0; e < scene.emitters.size(); ++e) {
      Waveform pair_rir =
          binaural_rir(scene.room, scene.emitters[e], vp, config.max_order);
      meta.rt60[e][k] = rt60_schroeder(pair_rir);
    }
  }

  json j;
  j["room"] = {{"dims", vec3_to_json(scene.room.dims)},
               {"absorption", scene.room.absorption},
               {"speed_of_sound", scene.room.speed_of_sound}};
  json emitters = json::array();
  for (size_t e = 0; e < scene.emitters.size(); ++e)
    emitters.push_back({{"position", vec3_to_json(scene.emitters[e].position)},
                        {"facing_yaw", scene.emitters[e].facing_yaw}});
  j["emitters"] = emitters;
  j["directivity_index"] = meta.directivity_index;
  j["active_emitter"] = scene.active_emitter;
  json views = json::array();
  for (const auto& vp : scene.viewpoints)
    views.push_back({{"position", vec3_to_json(vp.position)},
                     {"yaw", vp.yaw},
                     {"pitch", vp.pitch},
                     {"roll", vp.roll},
                     {"ear_offset", vp.ear_offset}});
  j["viewpoints"] = views;
  json boxes = json::array();
  for (const auto& per_view : meta.boxes) {
    json row = json::array();
    for (const auto& b : per_view) {
      if (b)
        row.push_back(json::array({b->y_min, b->y_max, b->x_min, b->x_max}));
      else
        row.push_back(nullptr);
    }
    boxes.push_back(row);
  }
  j["boxes"] = boxes;
  j["rt60"] = meta.rt60;
  j["frames"] = frames;
  j["max_order"] = config.max_order;
  std::ofstream mf(dir + "/meta.json", std::ios::trunc);
  if (!mf) throw IoError(dir + "/meta.json: cannot open for writing");
  mf << j.dump(2) << "\n";

  // Candidate clips: ordered (source, target) pairs times 1 s slices,
  // shuffled, kept only when the active speaker passes the dominant-speaker
  // filter in the source view and the target slice is not silent.
  const auto n_views = static_cast<int>(scene.viewpoints.size());
  const Eigen::Index n_slices = frames / kClipFrames;
  std::vector<std::pair<int, Eigen::Index>> combos;  // (pair index, slice)
  for (int s = 0; s < n_views; ++s)
    for (int t = 0; t < n_views; ++t)
      for (Eigen::Index sl = 0; sl < n_slices; ++sl)
        if (s != t) combos.emplace_back(s * n_views + t, sl);
  Rng clip_rng(config.seed, "clips", static_cast<uint64_t>(scene_id));
  clip_rng.shuffle(combos.begin(), combos.end());

  std::vector<Waveform> received(n_views);
  for (int k = 0; k < n_views; ++k)
    received[k] = read_wav(dir + "/view" + std::to_string(k) + ".wav");

  SceneOutput out;
  for (const auto& [pair, sl] : combos) {
    if (static_cast<int>(out.clips.size()) >= config.clips_per_scene) break;
    int src = pair / n_views, tgt = pair % n_views;

    // Five candidate windows over the clip; the simulator's speaker is
    // constant within a clip, so this acts as a visibility gate.
    const auto& box = meta.boxes[src][scene.active_emitter];
    if (!box) continue;
    std::vector<std::pair<int, BoundingBox>> windows(5, {scene.active_emitter, *box});
    if (!dominant_speaker_filter(windows, kDominantSpeakerDeltaPct)) continue;

    Eigen::Index off = sl * kClipFrames;
    if (energy(received[tgt], off, kClipFrames).sum() < 1e-8) continue;

    ClipEntry entry;
    entry.scene_id = scene_id;
    entry.src_view = src;
    entry.tgt_view = tgt;
    entry.frame_offset = off;
    entry.clip_id =
        "s" + std::to_string(scene_id) + "_c" + std::to_string(out.clips.size());
    out.clips.push_back(entry);
  }
  return out;
}

}  // namespace

std::vector<const ClipEntry*> Manifest::split(const std::string& name) const {
  std::vector<const ClipEntry*> out;
  for (const auto& c : clips)
    if (c.split == name) out.push_back(&c);
  return out;
}

Manifest generate_dataset(const DatasetConfig& config, const std::string& out_dir) {
  if (config.num_scenes <= 0 || config.clips_per_scene <= 0)
    throw InvalidConfig("gen-data: scenes and clips-per-scene must be positive");
  if (config.speech_duration_s * kSampleRate < kClipFrames)
    throw InvalidConfig("gen-data: speech duration must cover at least one clip");
  if (config.train_frac < 0 || config.val_frac < 0 ||
      config.train_frac + config.val_frac > 1.0)
    throw InvalidConfig("gen-data: split fractions must be non-negative and sum <= 1");
  if (config.split_mode != "scene" && config.split_mode != "clip")
    throw InvalidConfig("gen-data: split_mode must be 'scene' or 'clip'");

  std::error_code ec;
  fs::create_directories(out_dir + "/scenes", ec);
  if (ec) throw IoError(out_dir + ": cannot create dataset directory");

  std::vector<SceneOutput> outputs(config.num_scenes);
  parallel_for(static_cast<size_t>(config.num_scenes), [&](size_t i) {
    outputs[i] = generate_scene(config, out_dir, static_cast<int>(i));
  });

  Manifest manifest;
  manifest.root = out_dir;
  manifest.seed = config.seed;
  manifest.cutoff_hz = config.cutoff_hz;
  manifest.split_mode = config.split_mode;
  manifest.num_scenes = config.num_scenes;
  for (auto& o : outputs)
    manifest.clips.insert(manifest.clips.end(), o.clips.begin(), o.clips.end());

  // Deterministic split assignment: shuffle units, then cut by fractions.
  Rng split_rng(config.seed, "split");
  auto assign = [&](size_t n, auto set_split) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    split_rng.shuffle(order.begin(), order.end());
    auto n_train = static_cast<size_t>(std::llround(config.train_frac * n));
    auto n_val = static_cast<size_t>(std::llround(config.val_frac * n));
    for (size_t r = 0; r < n; ++r) {
      const char* split = r < n_train ? "train" : (r < n_train + n_val ? "val" : "test");
      set_split(order[r], split);
    }
  };
  if (config.split_mode == "scene") {
    std::vector<std::string> scene_split(config.num_scenes);
    assign(static_cast<size_t>(config.num_scenes),
           [&](size_t i, const char* s) { scene_split[i] = s; });
    for (auto& c : manifest.clips) c.split = scene_split[c.scene_id];
  } else {
    assign(manifest.clips.size(),
           [&](size_t i, const char* s) { manifest.clips[i].split = s; });
  }

  json j;
  j["seed"] = manifest.seed;
  j["sample_rate"] = kSampleRate;
  j["clip_frames"] = kClipFrames;
  j["cutoff_hz"] = manifest.cutoff_hz;
  j["split_mode"] = manifest.split_mode;
  j["num_scenes"] = manifest.num_scenes;
  json clips = json::array();
  for (const auto& c : manifest.clips)
    clips.push_back({{"clip_id", c.clip_id},
                     {"scene_id", c.scene_id},
                     {"src_view", c.src_view},
                     {"tgt_view", c.tgt_view},
                     {"frame_offset", c.frame_offset},
                     {"split", c.split}});
  j["clips"] = clips;
  std::ofstream f(out_dir + "/clips.json", std::ios::trunc);
  if (!f) throw IoError(out_dir + "/clips.json: cannot open for writing");
  f << j.dump(2) << "\n";
  return manifest;
}

Manifest load_manifest(const std::string& dataset_dir) {
  std::string path = dataset_dir + "/clips.json";
  std::ifstream f(path);
  if (!f) throw IoError(path + ": cannot open manifest");
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw IoError(path + ": " + std::string(e.what()));
  }
  Manifest m;
  m.root = dataset_dir;
  m.seed = j.at("seed");
  m.cutoff_hz = j.at("cutoff_hz");
  m.split_mode = j.at("split_mode");
  m.num_scenes = j.at("num_scenes");
  for (const auto& c : j.at("clips")) {
    ClipEntry e;
    e.clip_id = c.at("clip_id");
    e.scene_id = c.at("scene_id");
    e.src_view = c.at("src_view");
    e.tgt_view = c.at("tgt_view");
    e.frame_offset = c.at("frame_offset");
    e.split = c.at("split");
    m.clips.push_back(e);
  }
  return m;
}

SceneMeta load_scene_meta(const std::string& dataset_dir, int scene_id) {
  std::string path = scene_dir(dataset_dir, scene_id) + "/meta.json";
  std::ifstream f(path);
  if (!f) throw IoError(path + ": cannot open scene metadata");
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw IoError(path + ": " + std::string(e.what()));
  }
  SceneMeta meta;
  meta.room.dims = vec3_from_json(j.at("room").at("dims"));
  meta.room.absorption = j.at("room").at("absorption");
  meta.room.speed_of_sound = j.at("room").at("speed_of_sound");
  for (const auto& e : j.at("emitters")) {
    meta.emitter_positions.push_back(vec3_from_json(e.at("position")));
    meta.emitter_facings.push_back(e.at("facing_yaw"));
  }
  meta.directivity_index = j.at("directivity_index");
  meta.active_emitter = j.at("active_emitter");
  for (const auto& v : j.at("viewpoints")) {
    Viewpoint vp;
    vp.position = vec3_from_json(v.at("position"));
    vp.yaw = v.at("yaw");
    vp.pitch = v.at("pitch");
    vp.roll = v.at("roll");
    vp.ear_offset = v.at("ear_offset");
    meta.viewpoints.push_back(vp);
  }
  for (const auto& row : j.at("boxes")) {
    std::vector<std::optional<BoundingBox>> per_view;
    for (const auto& b : row) {
      if (b.is_null()) {
        per_view.push_back(std::nullopt);
      } else {
        BoundingBox box;
        box.y_min = b[0];
        box.y_max = b[1];
        box.x_min = b[2];
        box.x_max = b[3];
        per_view.push_back(box);
      }
    }
    meta.boxes.push_back(std::move(per_view));
  }
  meta.rt60 = j.at("rt60").get<std::vector<std::vector<double>>>();
  meta.frames = j.at("frames");
  meta.max_order = j.at("max_order");
  return meta;
}

ClipRecord load_clip(const Manifest& manifest, const ClipEntry& entry) {
  const std::string dir = scene_dir(manifest.root, entry.scene_id);
  SceneMeta meta = load_scene_meta(manifest.root, entry.scene_id);

  ClipRecord rec;
  rec.clip_id = entry.clip_id;
  rec.scene_id = entry.scene_id;
  Waveform src_full = read_wav(dir + "/view" + std::to_string(entry.src_view) + ".wav");
  Waveform tgt_full = read_wav(dir + "/view" + std::to_string(entry.tgt_view) + ".wav");
  rec.source_audio = slice(src_full, entry.frame_offset, kClipFrames);
  rec.target_audio = slice(tgt_full, entry.frame_offset, kClipFrames);
  rec.source_img =
      read_view_image(dir + "/view" + std::to_string(entry.src_view) + ".img");
  rec.bbox = meta.boxes.at(entry.src_view).at(meta.active_emitter);

  rec.src_viewpoint = meta.viewpoints.at(entry.src_view);
  rec.tgt_viewpoint = meta.viewpoints.at(entry.tgt_view);
  rec.pose = relative_pose(rec.src_viewpoint, rec.tgt_viewpoint);

  Waveform clean =
      read_wav(dir + "/emitter" + std::to_string(meta.active_emitter) + ".wav");
  rec.clean_emitter_audio = slice(clean, entry.frame_offset, kClipFrames);
  rec.gt_rt60 = meta.rt60.at(meta.active_emitter).at(entry.tgt_view);

  rec.speaker_position = meta.emitter_positions.at(meta.active_emitter);
  rec.speaker_facing = meta.emitter_facings.at(meta.active_emitter);
  rec.directivity_index = meta.directivity_index;
  rec.room = meta.room;
  return rec;
}

void write_view_image(const std::string& path, const ViewImage& img) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path + ": cannot open for writing");
  int32_t header[3] = {img.height, img.width, img.channels()};
  f.write(reinterpret_cast<const char*>(header), sizeof(header));
  for (const auto& plane : img.planes) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        auto v = static_cast<float>(plane(y, x));
        f.write(reinterpret_cast<const char*>(&v), sizeof(float));
      }
    }
  }
  if (!f) throw IoError(path + ": write failed");
}

ViewImage read_view_image(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path + ": cannot open for reading");
  int32_t header[3];
  f.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!f || header[0] <= 0 || header[1] <= 0 || header[2] <= 0)
    throw IoError(path + ": bad image header");
  ViewImage img;
  img.height = header[0];
  img.width = header[1];
  img.planes.assign(header[2], Eigen::ArrayXXd::Zero(img.height, img.width));
  for (auto& plane : img.planes) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        float v;
        f.read(reinterpret_cast<char*>(&v), sizeof(float));
        plane(y, x) = v;
      }
    }
  }
  if (!f) throw IoError(path + ": truncated image file");
  return img;
}

}  // namespace vigas
