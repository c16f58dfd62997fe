// include/vigas/dataset.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_DATASET_H_
#define VIGAS_DATASET_H_

#include <optional>
#include <string>
#include <vector>

#include "vigas/filters.h"
#include "vigas/localize.h"
#include "vigas/render.h"
#include "vigas/scene.h"

namespace vigas {

constexpr Eigen::Index kClipFrames = 16000;  // 1 s clips at 16 kHz

// Dataset generation parameters. Clips are (source view, target view, slice)
// combinations sampled per scene; splits are assigned by scene (novel
// environments at test time) or by clip (held-out clips from seen scenes,
// the single-environment protocol).
struct DatasetConfig {
  int num_scenes = 8;
  int clips_per_scene = 8;
  double speech_duration_s = 2.0;
  int max_order = 6;
  uint64_t seed = 0;
  double cutoff_hz = kSimCutoffHz;
  std::string split_mode = "scene";  // "scene" | "clip"
  double train_frac = 0.8;
  double val_frac = 0.1;
  SceneSampleConfig scene;
};

struct ClipEntry {
  std::string clip_id;
  int scene_id = 0;
  int src_view = 0;
  int tgt_view = 0;
  Eigen::Index frame_offset = 0;
  std::string split;  // "train" | "val" | "test"
};

struct Manifest {
  std::string root;  // dataset directory
  uint64_t seed = 0;
  double cutoff_hz = kSimCutoffHz;
  std::string split_mode;
  int num_scenes = 0;
  std::vector<ClipEntry> clips;

  std::vector<const ClipEntry*> split(const std::string& name) const;
};

// Everything stored per scene, reloadable from meta.json.
struct SceneMeta {
  Shoebox room;
  std::vector<Vec3> emitter_positions;
  std::vector<double> emitter_facings;
  double directivity_index = 1.0;
  int active_emitter = 0;
  std::vector<Viewpoint> viewpoints;
  // boxes[view][emitter]; empty optional when not visible.
  std::vector<std::vector<std::optional<BoundingBox>>> boxes;
  // rt60[emitter][view], Schroeder ground truth from the generated RIR.
  std::vector<std::vector<double>> rt60;
  Eigen::Index frames = 0;
  int max_order = 6;
};

// One loadable training/eval sample.
struct ClipRecord {
  std::string clip_id;
  int scene_id = 0;
  Waveform source_audio;   // stereo, kClipFrames
  Waveform target_audio;   // stereo, kClipFrames
  ViewImage source_img;
  std::optional<BoundingBox> bbox;  // active speaker in the source view
  Eigen::Matrix<double, 9, 1> pose = Eigen::Matrix<double, 9, 1>::Zero();
  Waveform clean_emitter_audio;  // mono, the active emitter's dry signal
  double gt_rt60 = 0.0;           // active emitter -> target viewpoint
  // Geometry for the DSP baseline and the TF-estimator keys.
  Vec3 speaker_position = Vec3::Zero();
  double speaker_facing = 0.0;
  double directivity_index = 1.0;
  Viewpoint src_viewpoint, tgt_viewpoint;
  Shoebox room;
};

// Renders, simulates, filters, and writes a full dataset under out_dir:
// scenes/scene_<i>/{view<k>.wav, view<k>.img, emitter<j>.wav, meta.json}
// plus clips.json at the root. Byte-identical when rerun with the same
// config and seed.
Manifest generate_dataset(const DatasetConfig& config, const std::string& out_dir);

Manifest load_manifest(const std::string& dataset_dir);
SceneMeta load_scene_meta(const std::string& dataset_dir, int scene_id);
ClipRecord load_clip(const Manifest& manifest, const ClipEntry& entry);

// Binary image file: int32 H, W, C then C*H*W float32s, plane-major.
void write_view_image(const std::string& path, const ViewImage& img);
ViewImage read_view_image(const std::string& path);

}  // namespace vigas

#endif  // VIGAS_DATASET_H_
