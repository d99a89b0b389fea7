// SPDX-License-Identifier: Apache-2.0
/**
 * @file   network.hpp
 * @brief  Bidirectional GRU encoder, attentional GRU decoder and the joint
 *         cross-entropy / attention-supervision objective with its exact
 *         gradient.
 *
 * Decoding starts from the end marker as the previous token. Attention at
 * step i is computed from the previous decoder state before the GRU update,
 * the GRU consumes [embed(y_prev); context], and the output layer is an
 * affine map of [d_i; context; embed(y_prev)] followed by a softmax.
 */
#pragma once

#include <ptc/nmt/parameters.hpp>

#include <Eigen/Core>

#include <span>
#include <vector>

namespace ptc::nmt {

struct EncoderStates {
  Eigen::MatrixXd states; ///< 2H x T, column t is [forward_t; backward_t]
  Eigen::MatrixXd keys;   ///< A x T, attention projection of each state
  Eigen::Index length() const { return states.cols(); }
};

/// Throws ptc::Error on an out-of-vocabulary id or an empty sequence.
EncoderStates encode(const Parameters &params, std::span<const int> source);

/// Start state of the decoder, tanh(init.W * backward_1 + init.b).
Eigen::VectorXd initial_state(const Parameters &params, const EncoderStates &enc);

struct Attention {
  Eigen::VectorXd weights; ///< softmax over source positions
  Eigen::VectorXd context;
};

Attention attend(const Parameters &params, const Eigen::VectorXd &d_prev,
                 const EncoderStates &enc);

struct DecoderState {
  Eigen::VectorXd hidden;
  Eigen::VectorXd attention;
  Eigen::VectorXd context;
  Eigen::VectorXd logits;
  Eigen::VectorXd probs;
};

DecoderState decode_step(const Parameters &params, const Eigen::VectorXd &d_prev, int y_prev,
                         const EncoderStates &enc);

/// One step for several decoder states sharing the same encoding (beam search).
struct StepBatch {
  Eigen::MatrixXd hidden;    ///< H x K
  Eigen::MatrixXd log_probs; ///< V x K
};
StepBatch decode_steps(const Parameters &params, const Eigen::MatrixXd &d_prev,
                       std::span<const int> y_prev, const EncoderStates &enc);

/// Id used as the previous token of the first decoder step.
inline int start_token(const Parameters &params) {
  return static_cast<int>(params.tgt_embed.cols()) - 2;
}

/**
 * A teacher-forced training pair. `source` ends with the end marker,
 * `target` with the target end marker. `phi_star` is the (|source| x
 * |target|) supervision target; when empty the sample contributes no
 * attention term.
 */
struct Example {
  std::vector<int> source;
  std::vector<int> target;
  Eigen::MatrixXd phi_star;
};

struct LossBreakdown {
  double cross_entropy = 0.0; ///< summed over samples and steps
  double attention = 0.0;     ///< summed squared distance to phi_star
  double total = 0.0;         ///< cross_entropy + lambda * attention
  std::size_t samples = 0;
  std::size_t tokens = 0;
};

/**
 * Joint objective over a batch. When `attention_out` is given it receives,
 * per sample, the teacher-forced attention stack laid out like phi_star
 * (source positions x decoder steps).
 */
LossBreakdown forward_loss(const Parameters &params, std::span<const Example> batch,
                           double lambda, std::vector<Eigen::MatrixXd> *attention_out = nullptr);

/// Same objective; overwrites `grads` with its gradient. Throws ptc::Error
/// naming the tensor if a gradient is not finite.
LossBreakdown backward(const Parameters &params, std::span<const Example> batch, double lambda,
                       Parameters &grads);

} // namespace ptc::nmt
