// SPDX-License-Identifier: Apache-2.0
#include <ptc/error.hpp>
#include <ptc/nmt/parameters.hpp>

#include <random>

namespace ptc::nmt {

void ModelConfig::validate() const {
  auto positive = [](int v, const char *name) {
    if (v < 1)
      throw Error(std::string("model config: ") + name + " must be >= 1");
  };
  positive(embed_dim, "embed_dim");
  positive(hidden_dim, "hidden_dim");
  positive(source_vocab_size, "source_vocab_size");
  positive(target_vocab_size, "target_vocab_size");
  positive(attention_dim, "attention_dim");
  positive(max_decode_length, "max_decode_length");
  if (!(init_range >= 0.0))
    throw Error("model config: init_range must be non-negative");
}

Parameters Parameters::zeros(const ModelConfig &c) {
  c.validate();
  const Eigen::Index E = c.embed_dim, H = c.hidden_dim, A = c.attention_dim;
  const Eigen::Index Vs = c.source_vocab_size, Vt = c.target_vocab_size;
  auto gru = [H](Eigen::Index in) {
    return GruParams{Eigen::MatrixXd::Zero(3 * H, in), Eigen::MatrixXd::Zero(3 * H, H),
                     Eigen::MatrixXd::Zero(3 * H, 1)};
  };
  Parameters p;
  p.src_embed = Eigen::MatrixXd::Zero(E, Vs);
  p.enc_fwd = gru(E);
  p.enc_bwd = gru(E);
  p.init_W = Eigen::MatrixXd::Zero(H, H);
  p.init_b = Eigen::MatrixXd::Zero(H, 1);
  p.tgt_embed = Eigen::MatrixXd::Zero(E, Vt);
  p.dec = gru(E + 2 * H);
  p.att_Wd = Eigen::MatrixXd::Zero(A, H);
  p.att_We = Eigen::MatrixXd::Zero(A, 2 * H);
  p.att_b = Eigen::MatrixXd::Zero(A, 1);
  p.att_v = Eigen::MatrixXd::Zero(A, 1);
  p.out_W = Eigen::MatrixXd::Zero(Vt, 3 * H + E);
  p.out_b = Eigen::MatrixXd::Zero(Vt, 1);
  return p;
}

Parameters Parameters::random(const ModelConfig &c) {
  Parameters p = zeros(c);
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> u(-c.init_range, c.init_range);
  p.for_each([&](std::string_view, Eigen::MatrixXd &t) {
    for (Eigen::Index k = 0; k < t.size(); ++k)
      t.data()[k] = u(rng);
  });
  return p;
}

std::size_t Parameters::tensor_count() const {
  std::size_t n = 0;
  for_each([&](std::string_view, const Eigen::MatrixXd &) { ++n; });
  return n;
}

std::size_t Parameters::size() const {
  std::size_t n = 0;
  for_each([&](std::string_view, const Eigen::MatrixXd &t) {
    n += static_cast<std::size_t>(t.size());
  });
  return n;
}

void Parameters::set_zero() {
  for_each([](std::string_view, Eigen::MatrixXd &t) { t.setZero(); });
}

bool Parameters::all_finite() const {
  bool ok = true;
  for_each([&](std::string_view, const Eigen::MatrixXd &t) { ok = ok && t.allFinite(); });
  return ok;
}

bool Parameters::same_shape(const Parameters &other) const {
  bool same = true;
  zip_tensors(*this, other,
              [&](std::string_view, const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) {
                same = same && a.rows() == b.rows() && a.cols() == b.cols();
              });
  return same;
}

} // namespace ptc::nmt
