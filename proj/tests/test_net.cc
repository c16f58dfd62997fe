// tests/test_net.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "vigas/checkpoint.h"
#include "vigas/common.h"
#include "vigas/filters.h"
#include "vigas/net.h"
#include "vigas/rng.h"
#include "vigas/stft.h"

using namespace vigas;

namespace {

NetConfig tiny_config() {
  NetConfig cfg;
  cfg.channels = 8;
  cfg.num_layers = 3;
  cfg.num_blocks = 3;
  return cfg;
}

ViewImage random_image(uint64_t seed) {
  Rng rng(seed);
  ViewImage img;
  img.planes.assign(3, Eigen::ArrayXXd::Zero(64, 64));
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      img.planes[0](y, x) = rng.uniform(0.5, 8.0);
      img.planes[1](y, x) = rng.uniform() < 0.05 ? 1.0 : 0.0;
      img.planes[2](y, x) = rng.uniform() < 0.05 ? 1.0 : 0.0;
    }
  return img;
}

Waveform random_stereo(Eigen::Index frames, uint64_t seed) {
  Rng rng(seed);
  Waveform w = Waveform::zeros(2, frames);
  for (int c = 0; c < 2; ++c)
    for (Eigen::Index i = 0; i < frames; ++i) w.ch[c][i] = rng.uniform(-0.4, 0.4);
  return w;
}

TrainExample make_example(const NetConfig& cfg, Eigen::Index frames, uint64_t seed) {
  Rng rng(seed);
  TrainExample ex;
  ex.a_c = random_stereo(frames, seed + 1);
  ex.image = random_image(seed + 2);
  ex.v_l = Eigen::Vector4d(0.2, 0.6, 0.3, 0.5);
  for (int i = 0; i < 9; ++i) ex.p_t[i] = rng.uniform(-1.0, 1.0);
  Waveform target = random_stereo(frames, seed + 3);
  Spectrogram ts = stft(target, StftConfig{});
  for (auto& c : ts.ch) ex.target_mag.push_back(c.abs());
  ex.align_lag = 3;
  ex.clip_id = "test-clip";
  return ex;
}

void zero_group(NetParams* p, const std::string& suffix) {
  for (const auto& g : param_groups(p->config))
    if (g.name.size() >= suffix.size() &&
        g.name.compare(g.name.size() - suffix.size(), suffix.size(), suffix) == 0)
      p->flat.segment(g.offset, g.size).setZero();
}

}  // namespace

TEST_CASE("param_count matches a hand count on the tiny config") {
  NetConfig cfg = tiny_config();
  const Eigen::Index c = 8, vc = 256;
  Eigen::Index enc = c * 2 + c;
  Eigen::Index per_layer = (c * 3 * c + c) * 2   // pa, qa
                           + (c * vc + c) * 2    // pv, qv
                           + (c * c + c) * 2;    // res, skip
  Eigen::Index dec = 2 * c + 2;
  Eigen::Index vis = 16 * 27 + 16 + 32 * 144 + 32 + 64 * 288 + 64 + 8 * 64 + 8;
  Eigen::Index fus = 512 * (4 + 9 + 512) + 512 + 256 * 512 + 256;
  CHECK(param_count(cfg) == enc + 3 * per_layer + dec + vis + fus);

  // Flat vector round trip is lossless by construction; verify the groups
  // tile the vector exactly.
  auto groups = param_groups(cfg);
  Eigen::Index covered = 0;
  for (const auto& g : groups) {
    CHECK(g.offset == covered);
    covered += g.size;
  }
  CHECK(covered == param_count(cfg));
}

TEST_CASE("config validation") {
  NetConfig cfg = tiny_config();
  cfg.num_layers = 4;  // not divisible by 3 blocks
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg = tiny_config();
  cfg.kernel = 2;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  CHECK(NetConfig{}.visual_feature_dim() == 512);  // 8 * 8 * 8 for 64x64 input
}

TEST_CASE("dilations grow exponentially within each block") {
  NetConfig cfg;  // 30 layers, 3 blocks, base 3
  CHECK(cfg.dilation(0) == 1);
  CHECK(cfg.dilation(1) == 3);
  CHECK(cfg.dilation(9) == 19683);
  CHECK(cfg.dilation(10) == 1);  // new block
  CHECK(cfg.dilation(29) == 19683);
}

TEST_CASE("visual_encode shape and zero behavior") {
  NetConfig cfg = tiny_config();
  NetParams params = NetParams::init(cfg, 1);

  ViewImage zero;
  zero.planes.assign(3, Eigen::ArrayXXd::Zero(64, 64));
  // Biases are zero-initialized, so a zero image encodes to zero.
  Eigen::VectorXd vf = visual_encode(zero, params);
  CHECK(vf.size() == 512);
  CHECK(vf.cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd vf2 = visual_encode(random_image(3), params);
  CHECK(vf2.size() == 512);
  CHECK(vf2.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("fuse output dimension and sensitivity") {
  NetConfig cfg = tiny_config();
  NetParams params = NetParams::init(cfg, 2);

  FusionInput fin;
  fin.v_f = visual_encode(random_image(4), params);
  fin.v_l = Eigen::Vector4d(0.1, 0.5, 0.2, 0.6);
  fin.p_t.setZero();
  fin.p_t[4] = fin.p_t[6] = fin.p_t[8] = 1.0;  // identity pose
  Eigen::VectorXd v_c = fuse(fin, params);
  CHECK(v_c.size() == 256);

  // Zero parameters give zero output regardless of input.
  NetParams zero = params;
  zero.flat.setZero();
  CHECK(fuse(fin, zero).cwiseAbs().maxCoeff() == 0.0);

  // Perturbing the pose moves the conditioning vector.
  FusionInput fin2 = fin;
  fin2.p_t[0] += 0.25;
  CHECK((fuse(fin2, params) - v_c).cwiseAbs().maxCoeff() > 1e-8);
}

TEST_CASE("gated layer matches a straight-line scalar oracle") {
  NetConfig cfg = tiny_config();
  const int C = cfg.channels, T = 16, K = cfg.kernel;
  NetParams params = NetParams::init(cfg, 5);
  Rng rng(6);
  Eigen::MatrixXd a_f(C, T);
  for (int i = 0; i < C; ++i)
    for (int t = 0; t < T; ++t) a_f(i, t) = rng.uniform(-1.0, 1.0);
  Eigen::VectorXd v_c(cfg.fusion_out);
  for (int i = 0; i < cfg.fusion_out; ++i) v_c[i] = rng.uniform(-1.0, 1.0);

  const int layer = 1;
  auto [a_next, skip] = gated_layer(a_f, v_c, params, layer);
  REQUIRE(a_next.rows() == C);
  REQUIRE(a_next.cols() == T);

  // Naive reimplementation straight from the definitions.
  auto groups = param_groups(cfg);
  auto seg = [&](const std::string& name) {
    for (const auto& g : groups)
      if (g.name == "layer" + std::to_string(layer) + "." + name)
        return params.flat.segment(g.offset, g.size);
    throw std::runtime_error("missing group");
  };
  const int dil = cfg.dilation(layer);
  auto w3 = [&](const Eigen::VectorXd& w, int out, int in, int tap) {
    return w[tap * C * C + in * C + out];  // [C x K*C] column-major
  };
  auto w1 = [&](const Eigen::VectorXd& w, int out, int in) { return w[in * C + out]; };

  Eigen::VectorXd pa = seg("pa_w"), pab = seg("pa_b"), qa = seg("qa_w"), qab = seg("qa_b");
  Eigen::VectorXd pv = seg("pv_w"), pvb = seg("pv_b"), qv = seg("qv_w"), qvb = seg("qv_b");
  Eigen::VectorXd rw = seg("res_w"), rb = seg("res_b"), sw = seg("skip_w"), sb = seg("skip_b");

  // s = sin(tanh(u) * sigmoid(w)) per channel and frame, then res/skip.
  Eigen::MatrixXd s(C, T);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < C; ++i) {
      double cond_u = pab[i] + pvb[i], cond_w = qab[i] + qvb[i];
      for (int j = 0; j < cfg.fusion_out; ++j) {
        cond_u += pv[j * C + i] * v_c[j];
        cond_w += qv[j * C + i] * v_c[j];
      }
      double u = cond_u, w = cond_w;
      for (int tap = 0; tap < K; ++tap) {
        int src = t + (tap - 1) * dil;
        if (src < 0 || src >= T) continue;
        for (int in = 0; in < C; ++in) {
          u += w3(pa, i, in, tap) * a_f(in, src);
          w += w3(qa, i, in, tap) * a_f(in, src);
        }
      }
      s(i, t) = std::sin(std::tanh(u) / (1.0 + std::exp(-w)));
    }
  }
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < C; ++i) {
      double res = rb[i], skp = sb[i];
      for (int in = 0; in < C; ++in) {
        res += w1(rw, i, in) * s(in, t);
        skp += w1(sw, i, in) * s(in, t);
      }
      CHECK(a_next(i, t) == doctest::Approx(a_f(i, t) + res).epsilon(1e-12));
      CHECK(skip(i, t) == doctest::Approx(skp).epsilon(1e-12));
    }
  }
}

TEST_CASE("zero-gate identity through every layer") {
  NetConfig cfg;  // full default config, M=30
  cfg.validate();
  NetParams params = NetParams::init(cfg, 7);
  for (const char* s : {"pa_w", "pa_b", "qa_w", "qa_b", "pv_w", "pv_b", "qv_w", "qv_b"})
    zero_group(&params, s);

  Rng rng(8);
  Eigen::MatrixXd latent(cfg.channels, 200);
  for (Eigen::Index i = 0; i < latent.size(); ++i)
    latent.data()[i] = rng.uniform(-1.0, 1.0);
  Eigen::VectorXd v_c = Eigen::VectorXd::Constant(cfg.fusion_out, 0.3);

  Eigen::MatrixXd x = latent;
  for (int k = 0; k < cfg.num_layers; ++k) {
    auto [next, skip] = gated_layer(x, v_c, params, k);
    CHECK((next - x).cwiseAbs().maxCoeff() == 0.0);  // res_b is zero from init
    CHECK(skip.cwiseAbs().maxCoeff() == 0.0);        // sin(0) through zero gates
    x = next;
  }
}

TEST_CASE("forward shape preservation and determinism") {
  NetConfig cfg = tiny_config();
  NetParams params = NetParams::init(cfg, 9);
  Eigen::VectorXd v_c = Eigen::VectorXd::Constant(cfg.fusion_out, 0.1);

  for (Eigen::Index t : {16L, 700L, 1600L}) {
    Waveform in = random_stereo(t, 10 + static_cast<uint64_t>(t));
    Waveform out = forward(in, v_c, params);
    CHECK(out.channels() == 2);
    CHECK(out.frames() == t);
  }

  Waveform in = random_stereo(1600, 11);
  Waveform o1 = forward(in, v_c, params);
  Waveform o2 = forward(in, v_c, params);
  CHECK((o1.ch[0] - o2.ch[0]).abs().maxCoeff() == 0.0);
  CHECK((o1.ch[1] - o2.ch[1]).abs().maxCoeff() == 0.0);

  NetParams zero = params;
  zero.flat.setZero();
  Waveform oz = forward(in, v_c, zero);
  CHECK(peak(oz) == 0.0);

  Waveform mono = Waveform::zeros(1, 1600);
  mono.ch[0].setConstant(0.1);
  CHECK_THROWS_AS(forward(mono, v_c, params), InvalidInput);
}

TEST_CASE("synthesize with zero params is an ambient passthrough") {
  NetConfig cfg = tiny_config();
  NetParams zero = NetParams::init(cfg, 12);
  zero.flat.setZero();
  Waveform a_s = random_stereo(1600, 13);
  ViewImage img = random_image(14);
  Waveform out = synthesize(a_s, img, Eigen::Vector4d(0, 1, 0, 1),
                            Eigen::Matrix<double, 9, 1>::Zero(), zero, kSimCutoffHz);
  REQUIRE(out.frames() == a_s.frames());
  BandSplit split = band_split(a_s, kSimCutoffHz);
  for (int c = 0; c < 2; ++c)
    CHECK((out.ch[c] - split.ambient.ch[c]).abs().maxCoeff() < 1e-15);
}

TEST_CASE("analytic gradient matches central finite differences") {
  NetConfig cfg = tiny_config();
  NetParams params = NetParams::init(cfg, 2024);
  TrainExample ex = make_example(cfg, 1600, 31);
  StftConfig loss_cfg;

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(param_count(cfg));
  double base = example_loss_and_gradient(params, ex, loss_cfg, &grad);
  CHECK(std::isfinite(base));

  const double eps = 1e-4;
  Rng pick(77);
  double max_rel = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    auto i = static_cast<Eigen::Index>(pick.uniform_int(
        static_cast<uint64_t>(param_count(cfg))));
    NetParams p = params;
    p.flat[i] += eps;
    double up = example_loss(p, ex, loss_cfg);
    p.flat[i] -= 2 * eps;
    double down = example_loss(p, ex, loss_cfg);
    double fd = (up - down) / (2 * eps);
    double rel = std::abs(fd - grad[i]) / std::max({std::abs(fd), std::abs(grad[i]), 1e-8});
    max_rel = std::max(max_rel, rel);
  }
  CHECK(max_rel < 1e-4);
}

TEST_CASE("ablated visual branch receives exactly zero gradient") {
  NetConfig cfg = tiny_config();
  cfg.use_visual = false;
  cfg.use_bbox = false;
  NetParams params = NetParams::init(cfg, 15);
  TrainExample ex = make_example(cfg, 1600, 32);

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(param_count(cfg));
  example_loss_and_gradient(params, ex, StftConfig{}, &grad);

  for (const auto& g : param_groups(cfg)) {
    double norm = grad.segment(g.offset, g.size).cwiseAbs().maxCoeff();
    bool visual = g.name.rfind("vis", 0) == 0 || g.name.rfind("red", 0) == 0;
    if (visual)
      CHECK(norm == 0.0);
    else if (g.name.rfind("fus", 0) == 0 || g.name == "dec_b")
      CHECK(norm >= 0.0);  // may be zero or not; just finite
    CHECK(std::isfinite(norm));
  }

  // The bbox columns of the first fusion layer also stay untouched.
  auto groups = param_groups(cfg);
  for (const auto& g : groups) {
    if (g.name != "fus1_w") continue;
    // Column-major [hidden x in_dim]: the first 4 columns belong to v_l.
    double bbox_cols = grad.segment(g.offset, 4 * cfg.fusion_hidden).cwiseAbs().maxCoeff();
    CHECK(bbox_cols == 0.0);
  }
}

TEST_CASE("batch gradient equals the mean of example gradients") {
  NetConfig cfg = tiny_config();
  NetParams params = NetParams::init(cfg, 16);
  TrainExample e1 = make_example(cfg, 1600, 41);
  TrainExample e2 = make_example(cfg, 1600, 42);

  Eigen::VectorXd g1 = Eigen::VectorXd::Zero(param_count(cfg));
  Eigen::VectorXd g2 = Eigen::VectorXd::Zero(param_count(cfg));
  double l1 = example_loss_and_gradient(params, e1, StftConfig{}, &g1);
  double l2 = example_loss_and_gradient(params, e2, StftConfig{}, &g2);

  Eigen::VectorXd gb = Eigen::VectorXd::Zero(param_count(cfg));
  double lb = batch_loss_and_gradient(params, {&e1, &e2}, StftConfig{}, &gb);
  CHECK(lb == doctest::Approx(0.5 * (l1 + l2)).epsilon(1e-12));
  CHECK((gb - 0.5 * (g1 + g2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("checkpoint round trip is bit-exact and corruption is rejected") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "vigas_ckpt_test";
  fs::create_directories(dir);
  std::string path = (dir / "net.ckpt").string();

  NetConfig cfg = tiny_config();
  cfg.use_visual = true;
  cfg.use_bbox = false;
  NetParams params = NetParams::init(cfg, 99);
  save_checkpoint(path, params);
  NetParams back = load_checkpoint(path);
  CHECK(back.config.channels == cfg.channels);
  CHECK(back.config.use_bbox == false);
  REQUIRE(back.flat.size() == params.flat.size());
  CHECK((back.flat - params.flat).cwiseAbs().maxCoeff() == 0.0);

  // Flip one payload byte: the checksum must catch it.
  {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(64);
    char b;
    f.seekg(64);
    f.get(b);
    b ^= 0x40;
    f.seekp(64);
    f.put(b);
  }
  CHECK_THROWS_AS(load_checkpoint(path), IoError);
  CHECK_THROWS_AS(load_checkpoint((dir / "missing.ckpt").string()), IoError);
  fs::remove_all(dir);
}
