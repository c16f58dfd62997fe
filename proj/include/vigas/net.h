// include/vigas/net.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_NET_H_
#define VIGAS_NET_H_

#include <Eigen/Core>
#include <string>
#include <vector>

#include "vigas/render.h"
#include "vigas/stft.h"
#include "vigas/waveform.h"

namespace vigas {

// Architecture of the synthesis network: a conv1x1 audio encoder (2 ->
// channels), num_layers gated multimodal dilated-conv layers grouped into
// num_blocks blocks (dilation = dilation_base^j within a block), per-layer
// residual and skip conv1x1s, a conv1x1 decoder back to 2 channels, a small
// strided-conv visual encoder, and a two-layer fusion MLP producing the
// conditioning vector.
struct NetConfig {
  int channels = 64;
  int num_layers = 30;  // M
  int num_blocks = 3;
  int dilation_base = 3;
  int kernel = 3;
  int fusion_hidden = 512;
  int fusion_out = 256;
  int visual_reduce_channels = 8;
  int image_size = 64;
  int pose_dim = 9;
  int bbox_dim = 4;
  bool use_visual = true;  // feed V_F (and train the visual encoder)
  bool use_bbox = true;    // feed V_L

  void validate() const;
  int layers_per_block() const { return num_layers / num_blocks; }
  int dilation(int layer) const;
  // 8 channels over an (image_size/8)^2 grid after three stride-2 convs.
  int visual_feature_dim() const;
  int fusion_in_dim() const { return bbox_dim + pose_dim + visual_feature_dim(); }
};

// Visual encoder channel plan (3 stride-2 conv layers, kernel 3, ReLU).
constexpr int kVisChannels[3] = {16, 32, 64};
// Depth is divided by this before entering the encoder so all input
// channels share a comparable scale.
constexpr double kDepthScale = 0.1;

// Number of learnable parameters, a pure function of the configuration.
Eigen::Index param_count(const NetConfig& cfg);

// Named slices of the flat parameter vector, in storage order. Layer-local
// tensors are named "layer<k>.<tensor>" (pa_w, pa_b, qa_w, qa_b, pv_w, pv_b,
// qv_w, qv_b, res_w, res_b, skip_w, skip_b); the rest are enc_w/enc_b,
// dec_w/dec_b, vis<s>_w/vis<s>_b, red_w/red_b, fus1_w/fus1_b, fus2_w/fus2_b.
struct ParamGroup {
  std::string name;
  Eigen::Index offset = 0;
  Eigen::Index size = 0;
};
std::vector<ParamGroup> param_groups(const NetConfig& cfg);

// All learnable tensors, stored as one flat vector (the optimizer's and the
// checkpoint's view); layers address slices of it via the internal layout.
struct NetParams {
  NetConfig config;
  Eigen::VectorXd flat;

  // Uniform fan-in init for weights, zero biases, from the "init" substream
  // of the given seed.
  static NetParams init(const NetConfig& cfg, uint64_t seed);
};

// Conditioning inputs for one clip. Ablated components are zeroed inside
// fuse(), so callers can always pass the real features.
struct FusionInput {
  Eigen::Vector4d v_l = Eigen::Vector4d::Zero();
  Eigen::Matrix<double, 9, 1> p_t = Eigen::Matrix<double, 9, 1>::Zero();
  Eigen::VectorXd v_f;  // from visual_encode; may be empty when ablated
};

// V_F: three stride-2 ReLU convs, a 1x1 reduction to 8 channels, flattened
// channel-major.
Eigen::VectorXd visual_encode(const ViewImage& img, const NetParams& params);

// V_C: concat(V_L, P_T, V_F) -> FC -> ReLU -> FC. Respects the ablation
// flags by zeroing the corresponding slots.
Eigen::VectorXd fuse(const FusionInput& fin, const NetParams& params);

// One gated layer, exposed for oracle tests: returns (a_next, skip).
// a_f is [channels x T]; v_c is the conditioning vector.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> gated_layer(const Eigen::MatrixXd& a_f,
                                                        const Eigen::VectorXd& v_c,
                                                        const NetParams& params,
                                                        int layer);

// Full audio path: encode, num_layers gated layers, mean-pooled skips,
// decode. Output has the input's shape.
Waveform forward(const Waveform& a_c, const Eigen::VectorXd& v_c,
                 const NetParams& params);

// End-to-end synthesis: band-split the source, condition on the view, run
// the network on the primary band, and add the ambient band back.
Waveform synthesize(const Waveform& a_s, const ViewImage& img,
                    const Eigen::Vector4d& bbox, const Eigen::Matrix<double, 9, 1>& pose,
                    const NetParams& params, double cutoff_hz);

// A preprocessed training example: separated primary source, conditioning
// features, the target's primary STFT magnitudes, and the alignment shift
// applied to the prediction before the loss.
struct TrainExample {
  Waveform a_c;
  ViewImage image;
  Eigen::Vector4d v_l = Eigen::Vector4d::Zero();
  Eigen::Matrix<double, 9, 1> p_t = Eigen::Matrix<double, 9, 1>::Zero();
  std::vector<Eigen::ArrayXXd> target_mag;
  Eigen::Index align_lag = 0;
  std::string clip_id;
};

// The loss core, shared with the Mag metric: mean L1 between the waveform's
// STFT magnitudes and precomputed target magnitudes, averaged over channels,
// bins, and frames. When dpred is non-null it receives dL/dpred.
double magnitude_l1(const Waveform& pred, const std::vector<Eigen::ArrayXXd>& target_mag,
                    const StftConfig& cfg, Waveform* dpred);

// Mean L1 distance between STFT magnitudes of the (shifted) prediction and
// the stored target magnitudes; forward only.
double example_loss(const NetParams& params, const TrainExample& ex,
                    const StftConfig& loss_stft);

// Same loss plus the exact gradient with respect to every parameter,
// accumulated into grad (which must be zero-initialized by the caller and
// have param_count entries). Throws NumericalError naming the clip if the
// loss is not finite.
double example_loss_and_gradient(const NetParams& params, const TrainExample& ex,
                                 const StftConfig& loss_stft, Eigen::VectorXd* grad);

// Mean loss and gradient over a batch; examples are evaluated in parallel
// and reduced in index order so results are independent of thread count.
double batch_loss_and_gradient(const NetParams& params,
                               const std::vector<const TrainExample*>& batch,
                               const StftConfig& loss_stft, Eigen::VectorXd* grad);

}  // namespace vigas

#endif  // VIGAS_NET_H_
