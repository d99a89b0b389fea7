// SPDX-License-Identifier: Apache-2.0
/**
 * @file   parameters.hpp
 * @brief  Model configuration and the trainable tensors of the
 *         character-to-syllable encoder-decoder.
 *
 * Every tensor is an Eigen::MatrixXd; bias vectors are single columns.
 * Embedding tables hold one column per token.
 */
#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ptc::nmt {

struct ModelConfig {
  int embed_dim = 256;
  int hidden_dim = 128;
  int source_vocab_size = 27;
  int target_vocab_size = 0;
  int attention_dim = 128;
  int max_decode_length = 16;
  double init_range = 0.08;
  std::uint64_t seed = 1;

  /// Throws ptc::Error when a dimension is not positive.
  void validate() const;
  bool operator==(const ModelConfig &) const = default;
};

/// Gates stacked as [update; reset; candidate]: W is 3H x in, U is 3H x H.
struct GruParams {
  Eigen::MatrixXd W, U, b;
};

struct Parameters {
  Eigen::MatrixXd src_embed; // E x source vocab
  GruParams enc_fwd;
  GruParams enc_bwd;
  Eigen::MatrixXd init_W, init_b; // decoder start state from the backward encoder
  Eigen::MatrixXd tgt_embed;      // E x target vocab
  GruParams dec;                  // input is [embed(y_prev); context]
  Eigen::MatrixXd att_Wd, att_We, att_b, att_v;
  Eigen::MatrixXd out_W, out_b; // logits from [d; context; embed(y_prev)]

  static Parameters zeros(const ModelConfig &config);
  /// Uniform in [-init_range, init_range], drawn in manifest order.
  static Parameters random(const ModelConfig &config);

  /// Visits (name, tensor) in manifest order.
  template <typename F> void for_each(F &&f) {
    visit(*this, std::forward<F>(f));
  }
  template <typename F> void for_each(F &&f) const {
    visit(*this, std::forward<F>(f));
  }

  std::size_t tensor_count() const;
  std::size_t size() const; ///< total number of scalars

  void set_zero();
  bool all_finite() const;
  bool same_shape(const Parameters &other) const;

private:
  template <typename Self, typename F> static void visit(Self &p, F &&f) {
    f(std::string_view("src_embed"), p.src_embed);
    f(std::string_view("enc_fwd.W"), p.enc_fwd.W);
    f(std::string_view("enc_fwd.U"), p.enc_fwd.U);
    f(std::string_view("enc_fwd.b"), p.enc_fwd.b);
    f(std::string_view("enc_bwd.W"), p.enc_bwd.W);
    f(std::string_view("enc_bwd.U"), p.enc_bwd.U);
    f(std::string_view("enc_bwd.b"), p.enc_bwd.b);
    f(std::string_view("init.W"), p.init_W);
    f(std::string_view("init.b"), p.init_b);
    f(std::string_view("tgt_embed"), p.tgt_embed);
    f(std::string_view("dec.W"), p.dec.W);
    f(std::string_view("dec.U"), p.dec.U);
    f(std::string_view("dec.b"), p.dec.b);
    f(std::string_view("att.Wd"), p.att_Wd);
    f(std::string_view("att.We"), p.att_We);
    f(std::string_view("att.b"), p.att_b);
    f(std::string_view("att.v"), p.att_v);
    f(std::string_view("out.W"), p.out_W);
    f(std::string_view("out.b"), p.out_b);
  }
};

/// Applies f(name, a_tensor, b_tensor) to matching tensors of two parameter sets.
template <typename A, typename B, typename F> void zip_tensors(A &a, B &b, F &&f) {
  std::vector<std::pair<std::string_view, decltype(&std::declval<B &>().src_embed)>> rhs;
  b.for_each([&](std::string_view name, auto &t) { rhs.emplace_back(name, &t); });
  std::size_t k = 0;
  a.for_each([&](std::string_view name, auto &t) { f(name, t, *rhs[k++].second); });
}

} // namespace ptc::nmt
