// tests/test_cli.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// End-to-end exercises of the command-line tool, run as subprocesses.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "vigas/dataset.h"
#include "vigas/wav_io.h"

using namespace vigas;
namespace fs = std::filesystem;

namespace {

const char* kCli = VIGAS_CLI_PATH;

int run(const std::string& args) {
  std::string cmd = std::string(kCli) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& sub) const { return (path / sub).string(); }
};

}  // namespace

TEST_CASE("cli exit codes: help ok, usage errors, runtime errors") {
  CHECK(run("--help") == 0);
  CHECK(run("gen-data --help") == 0);
  CHECK(run("frobnicate") == 1);
  CHECK(run("gen-data --no-such-flag x") == 1);
  CHECK(run("gen-data") == 1);  // missing required --out
  // Valid usage but missing dataset: runtime failure.
  CHECK(run("train --data /nonexistent-dataset --out /tmp/vigas_cli_nowhere") == 2);
}

TEST_CASE("cli pipeline: gen-data, train, eval, infer, plot") {
  TempDir tmp("vigas_cli_test");
  std::string data = tmp / "data";

  // Deterministic generation: same seed, byte-identical manifests.
  CHECK(run("gen-data --out " + data + " --seed 3 --scenes 2 --clips-per-scene 4 " +
            "--split-mode clip --duration 2") == 0);
  std::string data2 = tmp / "data2";
  CHECK(run("gen-data --out " + data2 + " --seed 3 --scenes 2 --clips-per-scene 4 " +
            "--split-mode clip --duration 2") == 0);
  CHECK(file_bytes(data + "/clips.json") == file_bytes(data2 + "/clips.json"));

  Manifest manifest = load_manifest(data);
  CHECK(manifest.clips.size() == 8);  // 2 scenes x 4 clips
  ClipRecord rec = load_clip(manifest, manifest.clips.front());
  CHECK(rec.source_audio.frames() == 16000);  // 1 s at 16 kHz
  CHECK(rec.source_audio.sample_rate == 16000);
  CHECK(rec.source_audio.channels() == 2);

  // A tiny network config so CLI training finishes in seconds.
  std::string cfg_path = tmp / "tiny.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "net.channels = 8\nnet.num_layers = 3\nnet.num_blocks = 3\n"
        << "epochs = 2\nbatch_size = 4\ncheckpoint_every = 1\n";
  }
  std::string run_dir = tmp / "run";
  CHECK(run("train --data " + data + " --out " + run_dir + " --config " + cfg_path +
            " --seed 1") == 0);
  CHECK(fs::exists(run_dir + "/ckpt_best.ckpt"));
  CHECK(fs::exists(run_dir + "/ckpt_last.ckpt"));
  CHECK(fs::exists(run_dir + "/loss_log.csv"));
  CHECK(fs::exists(run_dir + "/resolved.cfg"));

  // Resume keeps going without redoing epochs.
  {
    std::ofstream cfg(cfg_path);
    cfg << "net.channels = 8\nnet.num_layers = 3\nnet.num_blocks = 3\n"
        << "epochs = 3\nbatch_size = 4\ncheckpoint_every = 1\n";
  }
  CHECK(run("train --data " + data + " --out " + run_dir + " --config " + cfg_path +
            " --seed 1") == 0);
  {
    std::ifstream log(run_dir + "/loss_log.csv");
    std::string line;
    int rows = -1;  // header
    while (std::getline(log, line)) ++rows;
    CHECK(rows == 3);
  }

  // Ablated training shares the pipeline.
  std::string run_novis = tmp / "run_novis";
  CHECK(run("train --data " + data + " --out " + run_novis + " --config " + cfg_path +
            " --seed 1 --ablate-visual") == 0);

  // Enhancement mode (alias subcommand).
  std::string run_enh = tmp / "run_enh";
  CHECK(run("enhance --data " + data + " --out " + run_enh + " --config " + cfg_path +
            " --seed 1") == 0);

  // Evaluation: 4-row table for 4 methods, oracle zeros for gt.
  std::string eval_dir = tmp / "eval";
  CHECK(run("eval --data " + data + " --out " + eval_dir +
            " --methods gt,input,vigas,vigas-novis --checkpoint " + run_dir +
            "/ckpt_best.ckpt --checkpoint-novis " + run_novis + "/ckpt_best.ckpt" +
            " --split test") == 0);
  {
    std::ifstream rpt(eval_dir + "/report.txt");
    std::string text((std::istreambuf_iterator<char>(rpt)),
                     std::istreambuf_iterator<char>());
    CHECK(text.find("ground-truth") != std::string::npos);
    CHECK(text.find("input-copy") != std::string::npos);
    CHECK(text.find("vigas") != std::string::npos);
    CHECK(text.find("vigas-novis") != std::string::npos);
    int method_rows = 0;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line))
      if (!line.empty() && line.find("method") == std::string::npos &&
          line.find("---") == std::string::npos)
        ++method_rows;
    CHECK(method_rows == 4);
    // The oracle row reports zeros.
    CHECK(text.find(" 0.0000   0.0000") != std::string::npos);
  }
  CHECK(fs::exists(eval_dir + "/report.csv"));

  // Inference is bit-deterministic given the same checkpoint.
  std::string clip = manifest.clips.front().clip_id;
  std::string wav1 = tmp / "pred1.wav";
  std::string wav2 = tmp / "pred2.wav";
  CHECK(run("infer --data " + data + " --clip " + clip + " --checkpoint " + run_dir +
            "/ckpt_best.ckpt --out-wav " + wav1 + " --plot") == 0);
  CHECK(run("infer --data " + data + " --clip " + clip + " --checkpoint " + run_dir +
            "/ckpt_best.ckpt --out-wav " + wav2) == 0);
  CHECK(file_bytes(wav1) == file_bytes(wav2));
  Waveform pred = read_wav(wav1);
  CHECK(pred.channels() == 2);
  CHECK(pred.frames() == 16000);
  CHECK(fs::exists(tmp / "pred1.png"));
  CHECK(fs::exists(tmp / "pred1_spec.png"));

  // Plot subcommand: loss curves and waveforms.
  CHECK(run("plot --loss-csv " + run_dir + "/loss_log.csv --out " + (tmp / "loss.png")) ==
        0);
  CHECK(run("plot --wav " + wav1 + " --out " + (tmp / "wave.png")) == 0);
  CHECK(run("plot --wav " + wav1 + " --spectrogram --out " + (tmp / "spec.png")) == 0);
  CHECK(fs::exists(tmp / "loss.png"));
  CHECK(fs::exists(tmp / "wave.png"));
  CHECK(fs::exists(tmp / "spec.png"));

  // PNG signature sanity.
  std::string png = file_bytes(tmp / "loss.png");
  REQUIRE(png.size() > 8);
  CHECK(static_cast<unsigned char>(png[0]) == 0x89);
  CHECK(png.substr(1, 3) == "PNG");

  // Unknown clip id is a runtime error.
  CHECK(run("infer --data " + data + " --clip nope --checkpoint " + run_dir +
            "/ckpt_best.ckpt --out-wav " + (tmp / "x.wav")) == 2);
}
