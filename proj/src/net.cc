// src/net.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Forward pass and hand-written reverse-mode gradients of the synthesis
// network. Parameters live in one flat vector; every layer addresses a slice
// of it through the Layout table, so the optimizer and the checkpoint format
// see a single contiguous array.

#include "vigas/net.h"

#include <cmath>
#include <memory>
#include <utility>

#include "vigas/align.h"
#include "vigas/common.h"
#include "vigas/filters.h"
#include "vigas/rng.h"
#include "vigas/threading.h"

namespace vigas {

void NetConfig::validate() const {
  if (channels <= 0 || num_layers <= 0 || num_blocks <= 0)
    throw InvalidConfig("net: channels/layers/blocks must be positive");
  if (num_layers % num_blocks != 0)
    throw InvalidConfig("net: num_layers must be divisible by num_blocks");
  if (kernel <= 0 || kernel % 2 == 0) throw InvalidConfig("net: kernel must be odd");
  if (dilation_base <= 0) throw InvalidConfig("net: dilation_base must be positive");
  if (fusion_hidden <= 0 || fusion_out <= 0 || visual_reduce_channels <= 0)
    throw InvalidConfig("net: fusion dims must be positive");
  if (image_size <= 0 || image_size % 8 != 0)
    throw InvalidConfig("net: image_size must be a positive multiple of 8");
  if (pose_dim != 9 || bbox_dim != 4)
    throw InvalidConfig("net: pose_dim must be 9 and bbox_dim 4");
}

int NetConfig::dilation(int layer) const {
  int j = layer % layers_per_block();
  int d = 1;
  for (int i = 0; i < j; ++i) d *= dilation_base;
  return d;
}

int NetConfig::visual_feature_dim() const {
  int grid = image_size / 8;
  return visual_reduce_channels * grid * grid;
}

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMap = Eigen::Map<const Mat>;
using MMap = Eigen::Map<Mat>;
using CVMap = Eigen::Map<const Vec>;
using MVMap = Eigen::Map<Vec>;

struct Seg {
  Eigen::Index off = 0, rows = 0, cols = 0;
  Eigen::Index size() const { return rows * cols; }
};

// Parameter layout. Order: audio encoder, per-layer gate/cond/res/skip
// convs, decoder, visual encoder, fusion MLP. Conv1d weights of kernel k are
// stored [out x k*in] with tap-major column blocks; conv2d weights likewise
// [out x 9*in].
struct Layout {
  struct LayerSegs {
    Seg pa_w, pa_b, qa_w, qa_b, pv_w, pv_b, qv_w, qv_b, res_w, res_b, skip_w, skip_b;
  };

  Seg enc_w, enc_b, dec_w, dec_b;
  std::vector<LayerSegs> layers;
  Seg vis_w[3], vis_b[3], red_w, red_b;
  Seg fus1_w, fus1_b, fus2_w, fus2_b;
  Eigen::Index total = 0;

  explicit Layout(const NetConfig& cfg) {
    cfg.validate();
    const int c = cfg.channels;
    enc_w = alloc(c, 2);
    enc_b = alloc(c, 1);
    layers.resize(cfg.num_layers);
    for (auto& l : layers) {
      l.pa_w = alloc(c, cfg.kernel * c);
      l.pa_b = alloc(c, 1);
      l.qa_w = alloc(c, cfg.kernel * c);
      l.qa_b = alloc(c, 1);
      l.pv_w = alloc(c, cfg.fusion_out);
      l.pv_b = alloc(c, 1);
      l.qv_w = alloc(c, cfg.fusion_out);
      l.qv_b = alloc(c, 1);
      l.res_w = alloc(c, c);
      l.res_b = alloc(c, 1);
      l.skip_w = alloc(c, c);
      l.skip_b = alloc(c, 1);
    }
    dec_w = alloc(2, c);
    dec_b = alloc(2, 1);
    int in_ch = 3;
    for (int s = 0; s < 3; ++s) {
      vis_w[s] = alloc(kVisChannels[s], 9 * in_ch);
      vis_b[s] = alloc(kVisChannels[s], 1);
      in_ch = kVisChannels[s];
    }
    red_w = alloc(cfg.visual_reduce_channels, kVisChannels[2]);
    red_b = alloc(cfg.visual_reduce_channels, 1);
    fus1_w = alloc(cfg.fusion_hidden, cfg.fusion_in_dim());
    fus1_b = alloc(cfg.fusion_hidden, 1);
    fus2_w = alloc(cfg.fusion_out, cfg.fusion_hidden);
    fus2_b = alloc(cfg.fusion_out, 1);
  }

 private:
  Seg alloc(Eigen::Index rows, Eigen::Index cols) {
    Seg s{total, rows, cols};
    total += rows * cols;
    return s;
  }
};

CMap mat(const Vec& flat, const Seg& s) { return {flat.data() + s.off, s.rows, s.cols}; }
MMap mat(Vec* flat, const Seg& s) { return {flat->data() + s.off, s.rows, s.cols}; }
CVMap vec(const Vec& flat, const Seg& s) { return {flat.data() + s.off, s.size()}; }
MVMap vec(Vec* flat, const Seg& s) { return {flat->data() + s.off, s.size()}; }

// y += W (*) x with a centered dilated kernel: y[:,t] += sum_j W_j x[:,t+(j-h)d].
void dilated_conv_add(const CMap& w, const Mat& x, int kernel, int dil, Mat* y) {
  const Eigen::Index c = x.rows(), t = x.cols();
  const int half = (kernel - 1) / 2;
  for (int j = 0; j < kernel; ++j) {
    const Eigen::Index o = static_cast<Eigen::Index>(j - half) * dil;
    if (std::abs(o) >= t) continue;
    const Eigen::Index a = std::max<Eigen::Index>(0, -o);
    const Eigen::Index len = t - std::abs(o);
    y->middleCols(a, len).noalias() += w.middleCols(j * c, c) * x.middleCols(a + o, len);
  }
}

// Accumulates dW and dX for the convolution above.
void dilated_conv_backward(const CMap& w, const Mat& x, const Mat& dy, int kernel,
                           int dil, MMap* dw, Mat* dx) {
  const Eigen::Index c = x.rows(), t = x.cols();
  const int half = (kernel - 1) / 2;
  for (int j = 0; j < kernel; ++j) {
    const Eigen::Index o = static_cast<Eigen::Index>(j - half) * dil;
    if (std::abs(o) >= t) continue;
    const Eigen::Index a = std::max<Eigen::Index>(0, -o);
    const Eigen::Index len = t - std::abs(o);
    dw->middleCols(j * c, c).noalias() +=
        dy.middleCols(a, len) * x.middleCols(a + o, len).transpose();
    dx->middleCols(a + o, len).noalias() +=
        w.middleCols(j * c, c).transpose() * dy.middleCols(a, len);
  }
}

// conv2d, kernel 3, stride 2, pad 1, on [channels x h*w] feature maps.
Mat conv2d_s2(const CMap& w, const CVMap& b, const Mat& in, int h_in, int w_in) {
  const Eigen::Index c_in = in.rows();
  const int h_out = h_in / 2, w_out = w_in / 2;
  Mat out = b.replicate(1, static_cast<Eigen::Index>(h_out) * w_out);
  for (int y = 0; y < h_out; ++y) {
    for (int x = 0; x < w_out; ++x) {
      const Eigen::Index opix = static_cast<Eigen::Index>(y) * w_out + x;
      for (int ky = 0; ky < 3; ++ky) {
        const int iy = 2 * y + ky - 1;
        if (iy < 0 || iy >= h_in) continue;
        for (int kx = 0; kx < 3; ++kx) {
          const int ix = 2 * x + kx - 1;
          if (ix < 0 || ix >= w_in) continue;
          out.col(opix).noalias() +=
              w.middleCols((ky * 3 + kx) * c_in, c_in) *
              in.col(static_cast<Eigen::Index>(iy) * w_in + ix);
        }
      }
    }
  }
  return out;
}

void conv2d_s2_backward(const CMap& w, const Mat& in, const Mat& dout, int h_in,
                        int w_in, MMap* dw, MVMap* db, Mat* din) {
  const Eigen::Index c_in = in.rows();
  const int h_out = h_in / 2, w_out = w_in / 2;
  *db += dout.rowwise().sum();
  for (int y = 0; y < h_out; ++y) {
    for (int x = 0; x < w_out; ++x) {
      const Eigen::Index opix = static_cast<Eigen::Index>(y) * w_out + x;
      for (int ky = 0; ky < 3; ++ky) {
        const int iy = 2 * y + ky - 1;
        if (iy < 0 || iy >= h_in) continue;
        for (int kx = 0; kx < 3; ++kx) {
          const int ix = 2 * x + kx - 1;
          if (ix < 0 || ix >= w_in) continue;
          const Eigen::Index ipix = static_cast<Eigen::Index>(iy) * w_in + ix;
          dw->middleCols((ky * 3 + kx) * c_in, c_in).noalias() +=
              dout.col(opix) * in.col(ipix).transpose();
          if (din)
            din->col(ipix).noalias() +=
                w.middleCols((ky * 3 + kx) * c_in, c_in).transpose() * dout.col(opix);
        }
      }
    }
  }
}

Mat image_to_matrix(const ViewImage& img) {
  if (img.channels() != 3) throw InvalidConfig("visual_encode: expected 3 image planes");
  const int h = img.height, w = img.width;
  Mat m(3, static_cast<Eigen::Index>(h) * w);
  for (int c = 0; c < 3; ++c) {
    double scale = c == 0 ? kDepthScale : 1.0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        m(c, static_cast<Eigen::Index>(y) * w + x) = scale * img.planes[c](y, x);
  }
  return m;
}

// Cached activations of one clip's forward pass; z and s are recomputed from
// t and g during the backward pass to keep the cache at three tensors per
// layer.
struct LayerCache {
  Mat x;  // layer input latent
  Mat t;  // tanh gate
  Mat g;  // sigmoid gate
};

struct Cache {
  Mat a_c;
  std::vector<LayerCache> layers;
  Mat skip_mean;
  // Conditioning path.
  Vec concat, hidden, v_c;
  bool visual_used = false;
  Mat vis_in;
  Mat vis_out[3];  // post-ReLU maps
};

Mat visual_forward(const NetConfig& cfg, const Layout& lay, const Vec& flat,
                   const ViewImage& img, Cache* cache) {
  if (img.height != cfg.image_size || img.width != cfg.image_size)
    throw InvalidConfig("visual_encode: image size does not match config");
  Mat cur = image_to_matrix(img);
  if (cache) cache->vis_in = cur;
  int side = cfg.image_size;
  for (int s = 0; s < 3; ++s) {
    cur = conv2d_s2(mat(flat, lay.vis_w[s]), vec(flat, lay.vis_b[s]), cur, side, side);
    cur = cur.cwiseMax(0.0);  // ReLU
    side /= 2;
    if (cache) cache->vis_out[s] = cur;
  }
  Mat red = mat(flat, lay.red_w) * cur;
  red.colwise() += vec(flat, lay.red_b);
  return red;
}

Vec flatten_channel_major(const Mat& m) {
  Vec out(m.size());
  for (Eigen::Index c = 0; c < m.rows(); ++c)
    out.segment(c * m.cols(), m.cols()) = m.row(c).transpose();
  return out;
}

Vec fuse_forward(const NetConfig& cfg, const Layout& lay, const Vec& flat,
                 const Eigen::Vector4d& v_l, const Eigen::Matrix<double, 9, 1>& p_t,
                 const Vec& v_f, Cache* cache) {
  Vec concat = Vec::Zero(cfg.fusion_in_dim());
  if (cfg.use_bbox) concat.head<4>() = v_l;
  concat.segment<9>(4) = p_t;
  if (cfg.use_visual) {
    if (v_f.size() != cfg.visual_feature_dim())
      throw InvalidConfig("fuse: visual feature size mismatch");
    concat.tail(cfg.visual_feature_dim()) = v_f;
  }
  Vec pre = mat(flat, lay.fus1_w) * concat + vec(flat, lay.fus1_b);
  Vec hidden = pre.cwiseMax(0.0);
  Vec v_c = mat(flat, lay.fus2_w) * hidden + vec(flat, lay.fus2_b);
  if (cache) {
    cache->concat = std::move(concat);
    cache->hidden = std::move(hidden);
    cache->v_c = v_c;
  }
  return v_c;
}

Vec condition_forward(const NetConfig& cfg, const Layout& lay, const Vec& flat,
                      const ViewImage& img, const Eigen::Vector4d& v_l,
                      const Eigen::Matrix<double, 9, 1>& p_t, Cache* cache) {
  Vec v_f;
  if (cfg.use_visual) {
    Mat red = visual_forward(cfg, lay, flat, img, cache);
    v_f = flatten_channel_major(red);
    if (cache) cache->visual_used = true;
  } else {
    v_f = Vec::Zero(cfg.visual_feature_dim());
  }
  return fuse_forward(cfg, lay, flat, v_l, p_t, v_f, cache);
}

void gated_layer_forward(const NetConfig& cfg, const Layout::LayerSegs& l,
                         const Vec& flat, const Vec& v_c, int dil, Mat* x,
                         Mat* skip_sum, LayerCache* lc) {
  const Eigen::Index t_len = x->cols();
  // Time-invariant conditioning terms, broadcast over frames; the gate conv
  // biases ride along.
  Vec cond_p = mat(flat, l.pv_w) * v_c + vec(flat, l.pv_b) + vec(flat, l.pa_b);
  Vec cond_q = mat(flat, l.qv_w) * v_c + vec(flat, l.qv_b) + vec(flat, l.qa_b);

  Mat u = cond_p.replicate(1, t_len);
  dilated_conv_add(mat(flat, l.pa_w), *x, cfg.kernel, dil, &u);
  Mat w = cond_q.replicate(1, t_len);
  dilated_conv_add(mat(flat, l.qa_w), *x, cfg.kernel, dil, &w);

  Mat t = u.array().tanh().matrix();
  Mat g = (1.0 + (-w.array()).exp()).inverse().matrix();
  Mat s = (t.array() * g.array()).sin().matrix();

  if (skip_sum->size() == 0)
    skip_sum->noalias() = mat(flat, l.skip_w) * s;
  else
    skip_sum->noalias() += mat(flat, l.skip_w) * s;
  skip_sum->colwise() += vec(flat, l.skip_b);

  if (lc) {
    lc->x = *x;
    lc->t = std::move(t);
    lc->g = std::move(g);
  }
  Mat delta = mat(flat, l.res_w) * s;
  delta.colwise() += vec(flat, l.res_b);
  *x += delta;
}

Mat audio_forward(const NetConfig& cfg, const Layout& lay, const Vec& flat,
                  const Mat& a_c, const Vec& v_c, Cache* cache) {
  if (a_c.rows() != 2) throw InvalidInput("forward: expected stereo input");
  if (v_c.size() != cfg.fusion_out)
    throw InvalidInput("forward: conditioning vector size mismatch");
  Mat x = mat(flat, lay.enc_w) * a_c;
  x.colwise() += vec(flat, lay.enc_b);

  if (cache) {
    cache->a_c = a_c;
    cache->layers.resize(cfg.num_layers);
  }
  Mat skip_sum;
  for (int k = 0; k < cfg.num_layers; ++k)
    gated_layer_forward(cfg, lay.layers[k], flat, v_c, cfg.dilation(k), &x, &skip_sum,
                        cache ? &cache->layers[k] : nullptr);
  skip_sum /= static_cast<double>(cfg.num_layers);
  if (cache) cache->skip_mean = skip_sum;

  Mat a_o = mat(flat, lay.dec_w) * skip_sum;
  a_o.colwise() += vec(flat, lay.dec_b);
  return a_o;
}

void audio_backward(const NetConfig& cfg, const Layout& lay, const Vec& flat,
                    const Cache& cache, const Mat& da_o, Vec* grad, Vec* dv_c_out) {
  const double inv_m = 1.0 / static_cast<double>(cfg.num_layers);

  mat(grad, lay.dec_w).noalias() += da_o * cache.skip_mean.transpose();
  vec(grad, lay.dec_b) += da_o.rowwise().sum();
  // Every layer's skip receives the same gradient.
  Mat dk = (mat(flat, lay.dec_w).transpose() * da_o) * inv_m;

  Vec dv_c = Vec::Zero(cfg.fusion_out);
  Mat dx = Mat::Zero(cfg.channels, cache.a_c.cols());

  for (int k = cfg.num_layers - 1; k >= 0; --k) {
    const auto& l = lay.layers[k];
    const LayerCache& lc = cache.layers[k];

    Eigen::ArrayXXd z = lc.t.array() * lc.g.array();
    Mat s = z.sin().matrix();

    mat(grad, l.res_w).noalias() += dx * s.transpose();
    vec(grad, l.res_b) += dx.rowwise().sum();
    mat(grad, l.skip_w).noalias() += dk * s.transpose();
    vec(grad, l.skip_b) += dk.rowwise().sum();

    Mat ds = mat(flat, l.res_w).transpose() * dx;
    ds.noalias() += mat(flat, l.skip_w).transpose() * dk;

    Eigen::ArrayXXd dz = ds.array() * z.cos();
    Mat du = (dz * lc.g.array() * (1.0 - lc.t.array().square())).matrix();
    Mat dwt = (dz * lc.t.array() * lc.g.array() * (1.0 - lc.g.array())).matrix();

    Vec dcu = du.rowwise().sum();
    Vec dcw = dwt.rowwise().sum();
    mat(grad, l.pv_w).noalias() += dcu * cache.v_c.transpose();
    vec(grad, l.pv_b) += dcu;
    vec(grad, l.pa_b) += dcu;
    mat(grad, l.qv_w).noalias() += dcw * cache.v_c.transpose();
    vec(grad, l.qv_b) += dcw;
    vec(grad, l.qa_b) += dcw;
    dv_c.noalias() += mat(flat, l.pv_w).transpose() * dcu;
    dv_c.noalias() += mat(flat, l.qv_w).transpose() * dcw;

    // Residual passthrough stays in dx; the conv paths add into it.
    auto dpa_w = mat(grad, l.pa_w);
    auto dqa_w = mat(grad, l.qa_w);
    dilated_conv_backward(mat(flat, l.pa_w), lc.x, du, cfg.kernel, cfg.dilation(k),
                          &dpa_w, &dx);
    dilated_conv_backward(mat(flat, l.qa_w), lc.x, dwt, cfg.kernel, cfg.dilation(k),
                          &dqa_w, &dx);
  }

  mat(grad, lay.enc_w).noalias() += dx * cache.a_c.transpose();
  vec(grad, lay.enc_b) += dx.rowwise().sum();
  *dv_c_out = std::move(dv_c);
}

void condition_backward(const NetConfig& cfg, const Layout& lay, const Vec& flat,
                        const Cache& cache, const Vec& dv_c, Vec* grad) {
  mat(grad, lay.fus2_w).noalias() += dv_c * cache.hidden.transpose();
  vec(grad, lay.fus2_b) += dv_c;
  Vec dhidden = mat(flat, lay.fus2_w).transpose() * dv_c;
  Vec dpre = (cache.hidden.array() > 0.0).select(dhidden.array(), 0.0);
  mat(grad, lay.fus1_w).noalias() += dpre * cache.concat.transpose();
  vec(grad, lay.fus1_b) += dpre;

  if (!cache.visual_used) return;  // ablated branch: gradient stays zero

  Vec dconcat = mat(flat, lay.fus1_w).transpose() * dpre;
  const int grid = cfg.image_size / 8;
  const Eigen::Index pix = static_cast<Eigen::Index>(grid) * grid;
  Vec dv_f = dconcat.tail(cfg.visual_feature_dim());
  Mat dred(cfg.visual_reduce_channels, pix);
  for (int c = 0; c < cfg.visual_reduce_channels; ++c)
    dred.row(c) = dv_f.segment(c * pix, pix).transpose();

  mat(grad, lay.red_w).noalias() += dred * cache.vis_out[2].transpose();
  vec(grad, lay.red_b) += dred.rowwise().sum();
  Mat dcur = mat(flat, lay.red_w).transpose() * dred;

  int side = grid;
  for (int s = 2; s >= 0; --s) {
    dcur = (cache.vis_out[s].array() > 0.0).select(dcur.array(), 0.0).matrix();
    const Mat& input = s == 0 ? cache.vis_in : cache.vis_out[s - 1];
    const int in_side = side * 2;
    Mat din = Mat::Zero(input.rows(), input.cols());
    auto dw = mat(grad, lay.vis_w[s]);
    auto db = vec(grad, lay.vis_b[s]);
    conv2d_s2_backward(mat(flat, lay.vis_w[s]), input, dcur, in_side, in_side, &dw, &db,
                       s == 0 ? nullptr : &din);
    dcur = std::move(din);
    side = in_side;
  }
}

Mat waveform_to_matrix(const Waveform& w) {
  Mat m(w.channels(), w.frames());
  for (int c = 0; c < w.channels(); ++c) m.row(c) = w.ch[c].matrix().transpose();
  return m;
}

Waveform matrix_to_waveform(const Mat& m, int sample_rate) {
  Waveform w;
  w.sample_rate = sample_rate;
  for (Eigen::Index c = 0; c < m.rows(); ++c)
    w.ch.push_back(m.row(c).array().transpose());
  return w;
}

}  // namespace

double magnitude_l1(const Waveform& pred, const std::vector<Eigen::ArrayXXd>& target_mag,
                    const StftConfig& cfg, Waveform* dpred) {
  Spectrogram s = stft(pred, cfg);
  if (static_cast<size_t>(s.channels()) != target_mag.size())
    throw InvalidInput("loss: channel count mismatch");
  double total = 0.0;
  const double count = static_cast<double>(s.channels()) *
                       static_cast<double>(s.bins()) *
                       static_cast<double>(s.time_frames());
  std::vector<Eigen::ArrayXXcd> bin_grad;
  if (dpred) bin_grad.resize(s.ch.size());

  for (int c = 0; c < s.channels(); ++c) {
    if (target_mag[c].rows() != s.bins() || target_mag[c].cols() != s.time_frames())
      throw InvalidInput("loss: target magnitude shape mismatch");
    Eigen::ArrayXXd m = s.ch[c].abs();
    Eigen::ArrayXXd diff = m - target_mag[c];
    total += diff.abs().sum();
    if (dpred) {
      // d|X|/dX = X/|X| with the subgradient 0 at the origin, and
      // dL/d|X| = sign(diff)/count (sign(0) = 0).
      Eigen::ArrayXXd dm = diff.sign() / count;
      Eigen::ArrayXXd safe = (m > 0.0).select(m, 1.0);
      bin_grad[c] = s.ch[c] * (dm / safe);
    }
  }
  if (dpred) *dpred = stft_adjoint(bin_grad, pred.frames(), cfg.window_len, cfg.hop);
  return total / count;
}

namespace {

const Layout& layout_for(const NetConfig& cfg) {
  thread_local std::vector<std::pair<NetConfig, std::unique_ptr<Layout>>> cache;
  for (auto& [c, l] : cache) {
    if (c.channels == cfg.channels && c.num_layers == cfg.num_layers &&
        c.num_blocks == cfg.num_blocks && c.dilation_base == cfg.dilation_base &&
        c.kernel == cfg.kernel && c.fusion_hidden == cfg.fusion_hidden &&
        c.fusion_out == cfg.fusion_out &&
        c.visual_reduce_channels == cfg.visual_reduce_channels &&
        c.image_size == cfg.image_size)
      return *l;
  }
  cache.emplace_back(cfg, std::make_unique<Layout>(cfg));
  if (cache.size() > 8) cache.erase(cache.begin());
  return *cache.back().second;
}

void check_params(const NetParams& params, const Layout& lay) {
  if (params.flat.size() != lay.total)
    throw InvalidConfig("net: parameter vector size does not match config");
}

}  // namespace

Eigen::Index param_count(const NetConfig& cfg) { return Layout(cfg).total; }

std::vector<ParamGroup> param_groups(const NetConfig& cfg) {
  Layout lay(cfg);
  std::vector<ParamGroup> groups;
  auto add = [&](const std::string& name, const Seg& s) {
    groups.push_back({name, s.off, s.size()});
  };
  add("enc_w", lay.enc_w);
  add("enc_b", lay.enc_b);
  for (int k = 0; k < cfg.num_layers; ++k) {
    const auto& l = lay.layers[k];
    const std::string p = "layer" + std::to_string(k) + ".";
    add(p + "pa_w", l.pa_w);
    add(p + "pa_b", l.pa_b);
    add(p + "qa_w", l.qa_w);
    add(p + "qa_b", l.qa_b);
    add(p + "pv_w", l.pv_w);
    add(p + "pv_b", l.pv_b);
    add(p + "qv_w", l.qv_w);
    add(p + "qv_b", l.qv_b);
    add(p + "res_w", l.res_w);
    add(p + "res_b", l.res_b);
    add(p + "skip_w", l.skip_w);
    add(p + "skip_b", l.skip_b);
  }
  add("dec_w", lay.dec_w);
  add("dec_b", lay.dec_b);
  for (int s = 0; s < 3; ++s) {
    add("vis" + std::to_string(s) + "_w", lay.vis_w[s]);
    add("vis" + std::to_string(s) + "_b", lay.vis_b[s]);
  }
  add("red_w", lay.red_w);
  add("red_b", lay.red_b);
  add("fus1_w", lay.fus1_w);
  add("fus1_b", lay.fus1_b);
  add("fus2_w", lay.fus2_w);
  add("fus2_b", lay.fus2_b);
  return groups;
}

NetParams NetParams::init(const NetConfig& cfg, uint64_t seed) {
  Layout lay(cfg);
  NetParams p;
  p.config = cfg;
  p.flat = Vec::Zero(lay.total);
  Rng rng(seed, "init");

  auto fill = [&](const Seg& s, Eigen::Index fan_in) {
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    auto m = vec(&p.flat, s);
    for (Eigen::Index i = 0; i < m.size(); ++i) m[i] = rng.uniform(-bound, bound);
  };

  fill(lay.enc_w, 2);
  for (int k = 0; k < cfg.num_layers; ++k) {
    const auto& l = lay.layers[k];
    fill(l.pa_w, cfg.kernel * cfg.channels);
    fill(l.qa_w, cfg.kernel * cfg.channels);
    fill(l.pv_w, cfg.fusion_out);
    fill(l.qv_w, cfg.fusion_out);
    fill(l.res_w, cfg.channels);
    fill(l.skip_w, cfg.channels);
  }
  fill(lay.dec_w, cfg.channels);
  int in_ch = 3;
  for (int s = 0; s < 3; ++s) {
    fill(lay.vis_w[s], 9 * in_ch);
    in_ch = kVisChannels[s];
  }
  fill(lay.red_w, kVisChannels[2]);
  fill(lay.fus1_w, cfg.fusion_in_dim());
  fill(lay.fus2_w, cfg.fusion_hidden);
  return p;
}

Eigen::VectorXd visual_encode(const ViewImage& img, const NetParams& params) {
  const Layout& lay = layout_for(params.config);
  check_params(params, lay);
  Mat red = visual_forward(params.config, lay, params.flat, img, nullptr);
  return flatten_channel_major(red);
}

Eigen::VectorXd fuse(const FusionInput& fin, const NetParams& params) {
  const Layout& lay = layout_for(params.config);
  check_params(params, lay);
  Vec v_f = fin.v_f;
  if (v_f.size() == 0 && !params.config.use_visual)
    v_f = Vec::Zero(params.config.visual_feature_dim());
  return fuse_forward(params.config, lay, params.flat, fin.v_l, fin.p_t, v_f, nullptr);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> gated_layer(const Eigen::MatrixXd& a_f,
                                                        const Eigen::VectorXd& v_c,
                                                        const NetParams& params,
                                                        int layer) {
  const Layout& lay = layout_for(params.config);
  check_params(params, lay);
  if (layer < 0 || layer >= params.config.num_layers)
    throw InvalidInput("gated_layer: layer index out of range");
  Mat x = a_f;
  Mat skip_sum;
  gated_layer_forward(params.config, lay.layers[layer], params.flat, v_c,
                      params.config.dilation(layer), &x, &skip_sum, nullptr);
  return {std::move(x), std::move(skip_sum)};
}

Waveform forward(const Waveform& a_c, const Eigen::VectorXd& v_c, const NetParams& params) {
  a_c.validate("forward");
  if (a_c.channels() != 2) throw InvalidInput("forward: input must be stereo");
  const Layout& lay = layout_for(params.config);
  check_params(params, lay);
  Mat out =
      audio_forward(params.config, lay, params.flat, waveform_to_matrix(a_c), v_c, nullptr);
  return matrix_to_waveform(out, a_c.sample_rate);
}

Waveform synthesize(const Waveform& a_s, const ViewImage& img,
                    const Eigen::Vector4d& bbox, const Eigen::Matrix<double, 9, 1>& pose,
                    const NetParams& params, double cutoff_hz) {
  BandSplit split = band_split(a_s, cutoff_hz);
  const Layout& lay = layout_for(params.config);
  check_params(params, lay);
  Vec v_c = condition_forward(params.config, lay, params.flat, img, bbox, pose, nullptr);
  Waveform a_o = forward(split.primary, v_c, params);
  for (int c = 0; c < a_o.channels(); ++c) a_o.ch[c] += split.ambient.ch[c];
  return a_o;
}

double example_loss(const NetParams& params, const TrainExample& ex,
                    const StftConfig& loss_stft) {
  const Layout& lay = layout_for(params.config);
  check_params(params, lay);
  Vec v_c =
      condition_forward(params.config, lay, params.flat, ex.image, ex.v_l, ex.p_t, nullptr);
  Mat a_o = audio_forward(params.config, lay, params.flat, waveform_to_matrix(ex.a_c),
                          v_c, nullptr);
  Waveform pred = matrix_to_waveform(a_o, ex.a_c.sample_rate);
  if (ex.align_lag != 0) pred = shift(pred, ex.align_lag);
  double loss = magnitude_l1(pred, ex.target_mag, loss_stft, nullptr);
  if (!std::isfinite(loss)) throw NumericalError("non-finite loss on clip " + ex.clip_id);
  return loss;
}

double example_loss_and_gradient(const NetParams& params, const TrainExample& ex,
                                 const StftConfig& loss_stft, Eigen::VectorXd* grad) {
  const Layout& lay = layout_for(params.config);
  check_params(params, lay);
  if (grad->size() != lay.total) throw InvalidInput("gradient: output vector size mismatch");

  Cache cache;
  Vec v_c =
      condition_forward(params.config, lay, params.flat, ex.image, ex.v_l, ex.p_t, &cache);
  Mat a_o = audio_forward(params.config, lay, params.flat, waveform_to_matrix(ex.a_c),
                          v_c, &cache);
  Waveform pred = matrix_to_waveform(a_o, ex.a_c.sample_rate);
  if (ex.align_lag != 0) pred = shift(pred, ex.align_lag);

  Waveform dpred;
  double loss = magnitude_l1(pred, ex.target_mag, loss_stft, &dpred);
  if (!std::isfinite(loss)) throw NumericalError("non-finite loss on clip " + ex.clip_id);

  // Adjoint of the alignment shift.
  Waveform da_o = ex.align_lag != 0 ? shift(dpred, -ex.align_lag) : dpred;
  Vec dv_c;
  audio_backward(params.config, lay, params.flat, cache, waveform_to_matrix(da_o), grad,
                 &dv_c);
  condition_backward(params.config, lay, params.flat, cache, dv_c, grad);
  return loss;
}

double batch_loss_and_gradient(const NetParams& params,
                               const std::vector<const TrainExample*>& batch,
                               const StftConfig& loss_stft, Eigen::VectorXd* grad) {
  if (batch.empty()) throw InvalidInput("gradient: empty batch");
  const Layout& lay = layout_for(params.config);
  check_params(params, lay);

  std::vector<Vec> grads(batch.size());
  std::vector<double> losses(batch.size());
  parallel_for(batch.size(), [&](size_t i) {
    grads[i] = Vec::Zero(lay.total);
    losses[i] = example_loss_and_gradient(params, *batch[i], loss_stft, &grads[i]);
  });

  // Fixed-order reduction keeps results independent of worker count.
  grad->setZero();
  double loss = 0.0;
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    *grad += grads[i];
    loss += losses[i];
  }
  *grad *= inv;
  return loss * inv;
}

}  // namespace vigas
