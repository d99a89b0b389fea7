// SPDX-License-Identifier: Apache-2.0
#include <ptc/error.hpp>
#include <ptc/lexicon.hpp>
#include <ptc/nmt/network.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ptc::nmt {

namespace {

using Eigen::Index;
using Mat = Eigen::MatrixXd;

Mat sigmoid(const Mat &x) { return (1.0 / (1.0 + (-x.array()).exp())).matrix(); }

struct GruCache {
  Mat x, h_prev, z, r, n, rh;
};

// h = z * h_prev + (1 - z) * n,  n = tanh(W_n x + b_n + U_n (r * h_prev))
Mat gru_forward(const GruParams &p, const Mat &x, const Mat &h_prev, GruCache *cache) {
  const Index H = p.U.cols();
  Mat gx = p.W * x;
  gx.colwise() += p.b.col(0);
  Mat gh = p.U.topRows(2 * H) * h_prev;
  Mat z = sigmoid(gx.topRows(H) + gh.topRows(H));
  Mat r = sigmoid(gx.middleRows(H, H) + gh.bottomRows(H));
  Mat rh = r.cwiseProduct(h_prev);
  Mat n = (gx.bottomRows(H) + p.U.bottomRows(H) * rh).array().tanh().matrix();
  Mat h = (z.array() * h_prev.array() + (1.0 - z.array()) * n.array()).matrix();
  if (cache)
    *cache = GruCache{x, h_prev, std::move(z), std::move(r), std::move(n), std::move(rh)};
  return h;
}

// Accumulates parameter gradients into g; writes input and state gradients.
void gru_backward(const GruParams &p, const GruCache &c, const Mat &dh, GruParams &g, Mat &dx,
                  Mat &dh_prev) {
  const Index H = p.U.cols();
  Mat da(3 * H, dh.cols());
  da.bottomRows(H) =
    (dh.array() * (1.0 - c.z.array()) * (1.0 - c.n.array().square())).matrix();
  Mat drh = p.U.bottomRows(H).transpose() * da.bottomRows(H);
  da.topRows(H) = (dh.array() * (c.h_prev.array() - c.n.array()) * c.z.array() *
                   (1.0 - c.z.array()))
                    .matrix();
  da.middleRows(H, H) =
    (drh.array() * c.h_prev.array() * c.r.array() * (1.0 - c.r.array())).matrix();

  dh_prev = (dh.array() * c.z.array() + drh.array() * c.r.array()).matrix();
  dh_prev.noalias() += p.U.topRows(2 * H).transpose() * da.topRows(2 * H);

  g.W.noalias() += da * c.x.transpose();
  g.b.col(0) += da.rowwise().sum();
  g.U.topRows(2 * H).noalias() += da.topRows(2 * H) * c.h_prev.transpose();
  g.U.bottomRows(H).noalias() += da.bottomRows(H) * c.rh.transpose();
  dx.noalias() = p.W.transpose() * da;
}

Mat gather_columns(const Mat &table, std::span<const int> ids) {
  Mat out(table.rows(), static_cast<Index>(ids.size()));
  for (std::size_t b = 0; b < ids.size(); ++b)
    out.col(static_cast<Index>(b)) = table.col(ids[b]);
  return out;
}

void scatter_columns(Mat &table, std::span<const int> ids, const Mat &grad) {
  for (std::size_t b = 0; b < ids.size(); ++b)
    table.col(ids[b]) += grad.col(static_cast<Index>(b));
}

// Padded batch encoding; padding sits after each sequence.
struct BatchEncoding {
  Index batch = 0, steps = 0;
  std::vector<Index> lengths;
  Mat mask; // steps x batch
  std::vector<std::vector<int>> tokens;
  std::vector<Mat> states, keys;
  std::vector<GruCache> fwd_cache, bwd_cache;
  Mat d0;
};

BatchEncoding encode_batch(const Parameters &p, const std::vector<std::span<const int>> &sources,
                           bool keep_cache) {
  const Index H = p.enc_fwd.U.cols();
  const Index vocab = p.src_embed.cols();
  BatchEncoding enc;
  enc.batch = static_cast<Index>(sources.size());
  for (const auto &s : sources) {
    if (s.empty())
      throw Error("encode: empty source sequence");
    for (int id : s)
      if (id < 0 || id >= vocab)
        throw Error("encode: source id " + std::to_string(id) + " outside vocabulary");
    enc.lengths.push_back(static_cast<Index>(s.size()));
    enc.steps = std::max(enc.steps, static_cast<Index>(s.size()));
  }
  const Index B = enc.batch, T = enc.steps;
  enc.mask = Mat::Zero(T, B);
  enc.tokens.assign(static_cast<std::size_t>(T), std::vector<int>(static_cast<std::size_t>(B), kSourceEnd));
  for (Index b = 0; b < B; ++b)
    for (Index t = 0; t < enc.lengths[b]; ++t) {
      enc.mask(t, b) = 1.0;
      enc.tokens[t][b] = sources[b][t];
    }
  if (keep_cache) {
    enc.fwd_cache.resize(static_cast<std::size_t>(T));
    enc.bwd_cache.resize(static_cast<std::size_t>(T));
  }

  std::vector<Mat> x(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t)
    x[t] = gather_columns(p.src_embed, enc.tokens[t]);

  std::vector<Mat> fwd(static_cast<std::size_t>(T)), bwd(static_cast<std::size_t>(T));
  Mat h = Mat::Zero(H, B);
  for (Index t = 0; t < T; ++t) {
    h = gru_forward(p.enc_fwd, x[t], h, keep_cache ? &enc.fwd_cache[t] : nullptr);
    fwd[t] = h;
  }
  // Backward direction restarts from zero at each sequence end.
  h = Mat::Zero(H, B);
  for (Index t = T - 1; t >= 0; --t) {
    h = gru_forward(p.enc_bwd, x[t], h, keep_cache ? &enc.bwd_cache[t] : nullptr);
    h.array().rowwise() *= enc.mask.row(t).array();
    bwd[t] = h;
  }

  enc.states.resize(static_cast<std::size_t>(T));
  enc.keys.resize(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t) {
    enc.states[t].resize(2 * H, B);
    enc.states[t].topRows(H) = fwd[t];
    enc.states[t].bottomRows(H) = bwd[t];
    enc.keys[t] = p.att_We * enc.states[t];
    enc.keys[t].colwise() += p.att_b.col(0);
  }
  Mat pre = p.init_W * bwd[0];
  pre.colwise() += p.init_b.col(0);
  enc.d0 = pre.array().tanh().matrix();
  return enc;
}

struct StepCache {
  Mat d_prev;
  std::vector<Mat> scores_hidden; // per source position, A x B
  Mat alpha;                      // T x B
  Mat context;                    // 2H x B
  std::vector<int> y_prev;
  Mat y_emb;
  GruCache gru;
  Mat d;
  Mat out_in;
  Mat log_probs; // V x B
};

// Attention, GRU update and output distribution for one decoder step.
void decoder_step(const Parameters &p, const BatchEncoding &enc, const Mat &d_prev,
                  std::span<const int> y_prev, StepCache &c) {
  const Index H = p.dec.U.cols();
  const Index E = p.tgt_embed.rows();
  const Index V = p.tgt_embed.cols();
  const Index B = d_prev.cols(), T = enc.steps;
  for (int id : y_prev)
    if (id < 0 || id >= V)
      throw Error("decode: target id " + std::to_string(id) + " outside vocabulary");

  c.d_prev = d_prev;
  const Mat query = p.att_Wd * d_prev;
  Mat q(T, B);
  c.scores_hidden.resize(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t) {
    c.scores_hidden[t] = (enc.keys[t] + query).array().tanh().matrix();
    q.row(t) = p.att_v.col(0).transpose() * c.scores_hidden[t];
  }
  c.alpha = Mat::Zero(T, B);
  for (Index b = 0; b < B; ++b) {
    const Index len = enc.lengths[b];
    const double top = q.col(b).head(len).maxCoeff();
    c.alpha.col(b).head(len) = (q.col(b).head(len).array() - top).exp().matrix();
    c.alpha.col(b).head(len) /= c.alpha.col(b).head(len).sum();
  }
  c.context = Mat::Zero(2 * H, B);
  for (Index t = 0; t < T; ++t)
    c.context.array() += enc.states[t].array().rowwise() * c.alpha.row(t).array();

  c.y_prev.assign(y_prev.begin(), y_prev.end());
  c.y_emb = gather_columns(p.tgt_embed, y_prev);
  Mat u(E + 2 * H, B);
  u.topRows(E) = c.y_emb;
  u.bottomRows(2 * H) = c.context;
  c.d = gru_forward(p.dec, u, d_prev, &c.gru);

  c.out_in.resize(3 * H + E, B);
  c.out_in.topRows(H) = c.d;
  c.out_in.middleRows(H, 2 * H) = c.context;
  c.out_in.bottomRows(E) = c.y_emb;
  Mat logits = p.out_W * c.out_in;
  logits.colwise() += p.out_b.col(0);
  c.log_probs.resize(V, B);
  for (Index b = 0; b < B; ++b) {
    const double top = logits.col(b).maxCoeff();
    const double lse = top + std::log((logits.col(b).array() - top).exp().sum());
    c.log_probs.col(b) = logits.col(b).array() - lse;
  }
}

struct BatchRun {
  BatchEncoding enc;
  std::vector<StepCache> steps;
  std::vector<Index> target_lengths;
  LossBreakdown loss;
};

void validate_example(const Example &ex, Index V) {
  if (ex.target.empty())
    throw Error("example has an empty target");
  for (int id : ex.target)
    if (id < 0 || id >= V)
      throw Error("target id " + std::to_string(id) + " outside vocabulary");
  if (ex.phi_star.size() != 0 &&
      (ex.phi_star.rows() != static_cast<Index>(ex.source.size()) ||
       ex.phi_star.cols() != static_cast<Index>(ex.target.size())))
    throw Error("phi_star is " + std::to_string(ex.phi_star.rows()) + "x" +
                std::to_string(ex.phi_star.cols()) + " but the attention stack is " +
                std::to_string(ex.source.size()) + "x" + std::to_string(ex.target.size()));
}

BatchRun run_forward(const Parameters &p, std::span<const Example> batch, double lambda,
                     bool keep_cache) {
  const Index V = p.tgt_embed.cols();
  std::vector<std::span<const int>> sources;
  BatchRun run;
  Index steps = 0;
  for (const auto &ex : batch) {
    validate_example(ex, V);
    sources.emplace_back(ex.source);
    run.target_lengths.push_back(static_cast<Index>(ex.target.size()));
    steps = std::max(steps, static_cast<Index>(ex.target.size()));
  }
  run.enc = encode_batch(p, sources, keep_cache);
  const Index B = run.enc.batch;
  run.steps.resize(static_cast<std::size_t>(steps));

  const int start = start_token(p);
  std::vector<int> y_prev(static_cast<std::size_t>(B), start);
  Mat d = run.enc.d0;
  for (Index i = 0; i < steps; ++i) {
    StepCache &c = run.steps[i];
    decoder_step(p, run.enc, d, y_prev, c);
    for (Index b = 0; b < B; ++b) {
      if (i >= run.target_lengths[b])
        continue;
      const Example &ex = batch[b];
      run.loss.cross_entropy -= c.log_probs(ex.target[i], b);
      ++run.loss.tokens;
      if (ex.phi_star.size() != 0)
        run.loss.attention +=
          (c.alpha.col(b).head(run.enc.lengths[b]) - ex.phi_star.col(i)).squaredNorm();
    }
    for (Index b = 0; b < B; ++b)
      y_prev[b] = i < run.target_lengths[b] ? batch[b].target[i] : start;
    d = c.d;
  }
  run.loss.samples = static_cast<std::size_t>(B);
  run.loss.total = run.loss.cross_entropy + lambda * run.loss.attention;
  return run;
}

} // namespace

EncoderStates encode(const Parameters &params, std::span<const int> source) {
  BatchEncoding enc = encode_batch(params, {source}, false);
  EncoderStates out;
  const Index H2 = enc.states.front().rows(), A = enc.keys.front().rows();
  out.states.resize(H2, enc.steps);
  out.keys.resize(A, enc.steps);
  for (Index t = 0; t < enc.steps; ++t) {
    out.states.col(t) = enc.states[t].col(0);
    out.keys.col(t) = enc.keys[t].col(0);
  }
  return out;
}

namespace {

BatchEncoding replicate(const EncoderStates &enc, Index copies) {
  BatchEncoding out;
  out.batch = copies;
  out.steps = enc.length();
  out.lengths.assign(static_cast<std::size_t>(copies), enc.length());
  out.mask = Mat::Ones(out.steps, copies);
  for (Index t = 0; t < out.steps; ++t) {
    out.states.push_back(enc.states.col(t).replicate(1, copies));
    out.keys.push_back(enc.keys.col(t).replicate(1, copies));
  }
  return out;
}

} // namespace

Eigen::VectorXd initial_state(const Parameters &params, const EncoderStates &enc) {
  const Index H = params.init_W.rows();
  Eigen::VectorXd pre = params.init_W * enc.states.col(0).tail(H) + params.init_b.col(0);
  return pre.array().tanh().matrix();
}

Attention attend(const Parameters &params, const Eigen::VectorXd &d_prev,
                 const EncoderStates &enc) {
  const Eigen::VectorXd query = params.att_Wd * d_prev;
  Eigen::VectorXd q(enc.length());
  for (Index t = 0; t < enc.length(); ++t)
    q(t) = params.att_v.col(0).dot((enc.keys.col(t) + query).array().tanh().matrix());
  Attention out;
  out.weights = (q.array() - q.maxCoeff()).exp().matrix();
  out.weights /= out.weights.sum();
  out.context = enc.states * out.weights;
  return out;
}

DecoderState decode_step(const Parameters &params, const Eigen::VectorXd &d_prev, int y_prev,
                         const EncoderStates &enc) {
  BatchEncoding batch = replicate(enc, 1);
  StepCache c;
  const int ids[1] = {y_prev};
  decoder_step(params, batch, d_prev, ids, c);
  DecoderState out;
  out.hidden = c.d.col(0);
  out.attention = c.alpha.col(0);
  out.context = c.context.col(0);
  out.probs = c.log_probs.col(0).array().exp().matrix();
  out.logits = params.out_W * c.out_in.col(0) + params.out_b.col(0);
  return out;
}

StepBatch decode_steps(const Parameters &params, const Eigen::MatrixXd &d_prev,
                       std::span<const int> y_prev, const EncoderStates &enc) {
  if (static_cast<Index>(y_prev.size()) != d_prev.cols())
    throw Error("decode_steps: state and token counts differ");
  BatchEncoding batch = replicate(enc, d_prev.cols());
  StepCache c;
  decoder_step(params, batch, d_prev, y_prev, c);
  return StepBatch{std::move(c.d), std::move(c.log_probs)};
}

LossBreakdown forward_loss(const Parameters &params, std::span<const Example> batch,
                           double lambda, std::vector<Eigen::MatrixXd> *attention_out) {
  if (batch.empty())
    return {};
  BatchRun run = run_forward(params, batch, lambda, false);
  if (attention_out) {
    attention_out->clear();
    for (Index b = 0; b < run.enc.batch; ++b) {
      Mat stack(run.enc.lengths[b], run.target_lengths[b]);
      for (Index i = 0; i < run.target_lengths[b]; ++i)
        stack.col(i) = run.steps[i].alpha.col(b).head(run.enc.lengths[b]);
      attention_out->push_back(std::move(stack));
    }
  }
  return run.loss;
}

LossBreakdown backward(const Parameters &p, std::span<const Example> batch, double lambda,
                       Parameters &g) {
  if (!g.same_shape(p))
    g = Parameters::zeros(ModelConfig{static_cast<int>(p.src_embed.rows()),
                                      static_cast<int>(p.enc_fwd.U.cols()),
                                      static_cast<int>(p.src_embed.cols()),
                                      static_cast<int>(p.tgt_embed.cols()),
                                      static_cast<int>(p.att_v.rows())});
  g.set_zero();
  if (batch.empty())
    return {};

  BatchRun run = run_forward(p, batch, lambda, true);
  const BatchEncoding &enc = run.enc;
  const Index H = p.dec.U.cols();
  const Index E = p.tgt_embed.rows();
  const Index B = enc.batch, T = enc.steps;
  const Index steps = static_cast<Index>(run.steps.size());

  std::vector<Mat> d_states(static_cast<std::size_t>(T), Mat::Zero(2 * H, B));
  std::vector<Mat> d_keys(static_cast<std::size_t>(T), Mat::Zero(p.att_v.rows(), B));
  Mat carry = Mat::Zero(H, B);
  Mat du, dd_prev;

  for (Index i = steps - 1; i >= 0; --i) {
    const StepCache &c = run.steps[i];

    Mat dlogits = c.log_probs.array().exp().matrix();
    for (Index b = 0; b < B; ++b) {
      if (i < run.target_lengths[b])
        dlogits(batch[b].target[i], b) -= 1.0;
      else
        dlogits.col(b).setZero();
    }
    g.out_W.noalias() += dlogits * c.out_in.transpose();
    g.out_b.col(0) += dlogits.rowwise().sum();
    Mat dout = p.out_W.transpose() * dlogits;

    Mat dd = dout.topRows(H) + carry;
    Mat dctx = dout.middleRows(H, 2 * H);
    Mat demb = dout.bottomRows(E);
    gru_backward(p.dec, c.gru, dd, g.dec, du, dd_prev);
    demb += du.topRows(E);
    dctx += du.bottomRows(2 * H);
    scatter_columns(g.tgt_embed, c.y_prev, demb);

    // context = sum_t alpha_t * state_t
    Mat dalpha(T, B);
    for (Index t = 0; t < T; ++t) {
      dalpha.row(t) = enc.states[t].cwiseProduct(dctx).colwise().sum();
      d_states[t].array() += dctx.array().rowwise() * c.alpha.row(t).array();
    }
    if (lambda != 0.0) {
      for (Index b = 0; b < B; ++b) {
        const Example &ex = batch[b];
        if (i >= run.target_lengths[b] || ex.phi_star.size() == 0)
          continue;
        const Index len = enc.lengths[b];
        dalpha.col(b).head(len) +=
          2.0 * lambda * (c.alpha.col(b).head(len) - ex.phi_star.col(i));
      }
    }
    // Softmax over source positions; padded positions have alpha = 0.
    Mat dq = (c.alpha.array() *
              (dalpha.array().rowwise() - (c.alpha.array() * dalpha.array()).colwise().sum()))
               .matrix();
    Mat dpre_sum = Mat::Zero(p.att_v.rows(), B);
    for (Index t = 0; t < T; ++t) {
      const Mat &s = c.scores_hidden[t];
      g.att_v.col(0).noalias() += s * dq.row(t).transpose();
      Mat dpre = ((p.att_v.col(0) * dq.row(t)).array() * (1.0 - s.array().square())).matrix();
      d_keys[t] += dpre;
      dpre_sum += dpre;
    }
    g.att_Wd.noalias() += dpre_sum * c.d_prev.transpose();
    dd_prev.noalias() += p.att_Wd.transpose() * dpre_sum;
    carry = std::move(dd_prev);
  }

  // d0 = tanh(init.W * backward_0 + init.b)
  const Mat bwd0 = enc.states[0].bottomRows(H);
  Mat dpre0 = (carry.array() * (1.0 - enc.d0.array().square())).matrix();
  g.init_W.noalias() += dpre0 * bwd0.transpose();
  g.init_b.col(0) += dpre0.rowwise().sum();
  d_states[0].bottomRows(H).noalias() += p.init_W.transpose() * dpre0;

  for (Index t = 0; t < T; ++t) {
    g.att_We.noalias() += d_keys[t] * enc.states[t].transpose();
    g.att_b.col(0) += d_keys[t].rowwise().sum();
    d_states[t].noalias() += p.att_We.transpose() * d_keys[t];
  }

  Mat dx, dh_prev;
  Mat h_carry = Mat::Zero(H, B);
  for (Index t = T - 1; t >= 0; --t) {
    Mat dh = d_states[t].topRows(H) + h_carry;
    gru_backward(p.enc_fwd, enc.fwd_cache[t], dh, g.enc_fwd, dx, dh_prev);
    scatter_columns(g.src_embed, enc.tokens[t], dx);
    h_carry = std::move(dh_prev);
  }
  h_carry = Mat::Zero(H, B);
  for (Index t = 0; t < T; ++t) {
    Mat dh = d_states[t].bottomRows(H) + h_carry;
    dh.array().rowwise() *= enc.mask.row(t).array();
    gru_backward(p.enc_bwd, enc.bwd_cache[t], dh, g.enc_bwd, dx, dh_prev);
    scatter_columns(g.src_embed, enc.tokens[t], dx);
    h_carry = std::move(dh_prev);
  }

  g.for_each([](std::string_view name, const Eigen::MatrixXd &t) {
    if (!t.allFinite())
      throw Error("non-finite gradient in tensor " + std::string(name));
  });
  return run.loss;
}

} // namespace ptc::nmt
