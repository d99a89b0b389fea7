// SPDX-License-Identifier: Apache-2.0
/**
 * @file   trainer.hpp
 * @brief  Minibatch training of the encoder-decoder on the joint objective.
 */
#pragma once

#include <ptc/corpus.hpp>
#include <ptc/nmt/checkpoint.hpp>
#include <ptc/nmt/network.hpp>
#include <ptc/nmt/optimizer.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

namespace ptc::nmt {

struct TrainSpec {
  OptimizerSpec optimizer;
  int batch_size = 64;
  long iterations = 1000;
  double lambda = 1.0;        ///< weight of the attention term
  double clip_norm = 5.0;     ///< 0 disables clipping
  long eval_every = 0;        ///< observer cadence, 0 disables
  long checkpoint_every = 0;  ///< 0 writes only the final checkpoint
  std::filesystem::path checkpoint_path; ///< empty: no files written
  std::filesystem::path log_path;        ///< empty: no training log
  int workers = 1;            ///< >1 shards each batch across threads
  std::uint64_t seed = 1;     ///< batch order

  void validate() const;
};

/**
 * Encodes a sample for training. The supervision target is left empty when
 * the sample cannot be segmented (more syllables than letters).
 */
Example make_example(const Sample &sample, const Lexicon &lexicon, const TransitionModel &pt);
std::vector<Example> make_examples(const std::vector<Sample> &samples, const Lexicon &lexicon,
                                   const TransitionModel &pt);

/// Per-sample means of the batch loss at one iteration.
struct TrainRecord {
  long iteration = 0;
  double cross_entropy = 0.0;
  double attention = 0.0;
  double total = 0.0;
  double grad_norm = 0.0;
};

struct TrainHooks {
  std::function<void(const TrainRecord &)> on_iteration;
  std::function<void(long iteration, const Model &)> on_eval;
};

/**
 * Runs `spec.iterations` updates on batches of the shuffled corpus and
 * returns the final model. Log rows are appended as
 * `iteration<TAB>cross_entropy<TAB>attention_loss<TAB>total`, the losses
 * measured before the update of that iteration. Throws ptc::Error with the
 * iteration number if the loss or a gradient becomes non-finite.
 */
Model train(const std::vector<Sample> &corpus, const Lexicon &lexicon, const TransitionModel &pt,
            ModelConfig config, const TrainSpec &spec, const TrainHooks &hooks = {});

/// Same loop over prepared examples, starting from `model`.
Model train_examples(const std::vector<Example> &examples, Model model, const TrainSpec &spec,
                     const TrainHooks &hooks = {});

/// Gradient of the per-sample mean loss over a batch, optionally sharded.
LossBreakdown batch_gradient(const Parameters &params, std::span<const Example> batch,
                             double lambda, int workers, Parameters &grads);

} // namespace ptc::nmt
