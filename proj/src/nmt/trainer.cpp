// SPDX-License-Identifier: Apache-2.0
#include <ptc/alignment.hpp>
#include <ptc/error.hpp>
#include <ptc/nmt/trainer.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <thread>

namespace ptc::nmt {

void TrainSpec::validate() const {
  if (batch_size < 1)
    throw Error("batch_size must be >= 1");
  if (iterations < 0)
    throw Error("iterations must be >= 0");
  if (!(lambda >= 0.0))
    throw Error("lambda must be >= 0");
  if (!(clip_norm >= 0.0))
    throw Error("clip_norm must be >= 0");
  if (workers < 1)
    throw Error("workers must be >= 1");
  if (!(optimizer.learning_rate > 0.0))
    throw Error("learning_rate must be positive");
}

Example make_example(const Sample &sample, const Lexicon &lexicon, const TransitionModel &pt) {
  Example ex;
  ex.source = encode_source(sample.source);
  ex.target = lexicon.encode_target(sample.target);
  if (!sample.target.empty() && sample.target.size() <= sample.source.size())
    ex.phi_star = supervision_target(sample.source, sample.target, pt).values;
  return ex;
}

std::vector<Example> make_examples(const std::vector<Sample> &samples, const Lexicon &lexicon,
                                   const TransitionModel &pt) {
  std::vector<Example> out;
  out.reserve(samples.size());
  for (const auto &s : samples)
    out.push_back(make_example(s, lexicon, pt));
  return out;
}

LossBreakdown batch_gradient(const Parameters &params, std::span<const Example> batch,
                             double lambda, int workers, Parameters &grads) {
  LossBreakdown loss;
  const std::size_t shards =
    std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), batch.size());
  if (shards <= 1) {
    loss = backward(params, batch, lambda, grads);
  } else {
    std::vector<Parameters> partial(shards, params);
    std::vector<LossBreakdown> losses(shards);
    std::vector<std::exception_ptr> errors(shards);
    std::vector<std::thread> threads;
    const std::size_t per = (batch.size() + shards - 1) / shards;
    for (std::size_t w = 0; w < shards; ++w) {
      const std::size_t lo = w * per, hi = std::min(batch.size(), lo + per);
      threads.emplace_back([&, w, lo, hi] {
        try {
          losses[w] = backward(params, batch.subspan(lo, hi - lo), lambda, partial[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto &t : threads)
      t.join();
    for (auto &e : errors)
      if (e)
        std::rethrow_exception(e);
    grads = std::move(partial[0]);
    for (std::size_t w = 1; w < shards; ++w)
      zip_tensors(grads, partial[w],
                  [](std::string_view, Eigen::MatrixXd &a, const Eigen::MatrixXd &b) { a += b; });
    for (const auto &l : losses) {
      loss.cross_entropy += l.cross_entropy;
      loss.attention += l.attention;
      loss.total += l.total;
      loss.samples += l.samples;
      loss.tokens += l.tokens;
    }
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  grads.for_each([&](std::string_view, Eigen::MatrixXd &t) { t *= scale; });
  return loss;
}

namespace {

// Batches of similar source length, in shuffled order.
class BatchSchedule {
public:
  BatchSchedule(const std::vector<Example> &examples, int batch_size, std::uint64_t seed)
    : examples_(examples), batch_(static_cast<std::size_t>(batch_size)), rng_(seed) {}

  std::vector<Example> next() {
    if (cursor_ == batches_.size())
      refill();
    std::vector<Example> out;
    for (std::size_t i : batches_[cursor_++])
      out.push_back(examples_[i]);
    return out;
  }

private:
  void refill() {
    std::vector<std::size_t> order(examples_.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng_);
    const std::size_t pool = batch_ * 20;
    batches_.clear();
    for (std::size_t lo = 0; lo < order.size(); lo += pool) {
      const std::size_t hi = std::min(order.size(), lo + pool);
      std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(lo),
                       order.begin() + static_cast<std::ptrdiff_t>(hi),
                       [&](std::size_t a, std::size_t b) {
                         return examples_[a].source.size() < examples_[b].source.size();
                       });
      for (std::size_t b = lo; b < hi; b += batch_)
        batches_.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(b),
                              order.begin() + static_cast<std::ptrdiff_t>(std::min(hi, b + batch_)));
    }
    std::shuffle(batches_.begin(), batches_.end(), rng_);
    cursor_ = 0;
  }

  const std::vector<Example> &examples_;
  std::size_t batch_;
  std::mt19937_64 rng_;
  std::vector<std::vector<std::size_t>> batches_;
  std::size_t cursor_ = 0;
};

} // namespace

Model train_examples(const std::vector<Example> &examples, Model model, const TrainSpec &spec,
                     const TrainHooks &hooks) {
  spec.validate();
  if (examples.empty())
    throw Error("training corpus is empty");
  std::ofstream log;
  if (!spec.log_path.empty()) {
    log.open(spec.log_path, std::ios::app);
    if (!log)
      throw Error("cannot open training log " + spec.log_path.string());
  }
  auto save = [&] {
    if (!spec.checkpoint_path.empty())
      save_checkpoint(model, spec.checkpoint_path);
  };

  BatchSchedule schedule(examples, spec.batch_size, spec.seed);
  Optimizer opt(spec.optimizer, model.params);
  Parameters grads = model.params;
  for (long it = 1; it <= spec.iterations; ++it) {
    const std::vector<Example> batch = schedule.next();
    LossBreakdown loss;
    try {
      loss = batch_gradient(model.params, batch, spec.lambda, spec.workers, grads);
    } catch (const Error &e) {
      throw Error("training diverged at iteration " + std::to_string(it) + ": " + e.what());
    }
    if (!std::isfinite(loss.total))
      throw Error("training diverged at iteration " + std::to_string(it) + ": loss is not finite");
    TrainRecord rec;
    rec.iteration = it;
    const double n = static_cast<double>(loss.samples);
    rec.cross_entropy = loss.cross_entropy / n;
    rec.attention = loss.attention / n;
    rec.total = loss.total / n;
    rec.grad_norm = clip_global_norm(grads, spec.clip_norm);
    opt.step(model.params, grads);
    if (log)
      log << rec.iteration << '\t' << rec.cross_entropy << '\t' << rec.attention << '\t'
          << rec.total << '\n';
    if (hooks.on_iteration)
      hooks.on_iteration(rec);
    if (spec.eval_every > 0 && it % spec.eval_every == 0 && hooks.on_eval)
      hooks.on_eval(it, model);
    if (spec.checkpoint_every > 0 && it % spec.checkpoint_every == 0)
      save();
  }
  save();
  return model;
}

Model train(const std::vector<Sample> &corpus, const Lexicon &lexicon, const TransitionModel &pt,
            ModelConfig config, const TrainSpec &spec, const TrainHooks &hooks) {
  config.target_vocab_size = lexicon.target_vocab_size();
  Model model{config, Parameters::random(config), lexicon};
  return train_examples(make_examples(corpus, lexicon, pt), std::move(model), spec, hooks);
}

} // namespace ptc::nmt
