// SPDX-License-Identifier: Apache-2.0
#include <ptc/error.hpp>
#include <ptc/lexicon.hpp>
#include <ptc/nmt/gradcheck.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace ptc::nmt {

double relative_error(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  return scale == 0.0 ? 0.0 : std::abs(analytic - numeric) / scale;
}

std::vector<Example> random_batch(const ModelConfig &config, int batch_size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> letter(0, kSourceVocabSize - 2);
  std::uniform_int_distribution<int> syllable(0, config.target_vocab_size - 3);
  std::uniform_int_distribution<int> src_len(2, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Example> batch;
  for (int b = 0; b < batch_size; ++b) {
    Example ex;
    const int letters = src_len(rng);
    for (int i = 0; i < letters; ++i)
      ex.source.push_back(letter(rng));
    ex.source.push_back(kSourceEnd);
    std::uniform_int_distribution<int> tgt_len(1, std::min(letters, 3));
    const int syllables = tgt_len(rng);
    for (int i = 0; i < syllables; ++i)
      ex.target.push_back(syllable(rng));
    ex.target.push_back(config.target_vocab_size - 2);
    ex.phi_star.resize(static_cast<Eigen::Index>(ex.source.size()),
                       static_cast<Eigen::Index>(ex.target.size()));
    for (Eigen::Index k = 0; k < ex.phi_star.size(); ++k)
      ex.phi_star.data()[k] = unit(rng);
    for (Eigen::Index j = 0; j < ex.phi_star.cols(); ++j)
      ex.phi_star.col(j) /= ex.phi_star.col(j).sum();
    batch.push_back(std::move(ex));
  }
  return batch;
}

GradcheckResult check_gradients(const Parameters &params, std::span<const Example> batch,
                                double lambda, int coordinates, double step, std::uint64_t seed) {
  Parameters grads = params;
  backward(params, batch, lambda, grads);
  Parameters probe = params;

  std::vector<std::pair<std::string_view, Eigen::MatrixXd *>> probe_tensors;
  probe.for_each([&](std::string_view name, Eigen::MatrixXd &t) { probe_tensors.emplace_back(name, &t); });
  std::vector<const Eigen::MatrixXd *> grad_tensors;
  grads.for_each([&](std::string_view, const Eigen::MatrixXd &t) { grad_tensors.push_back(&t); });

  const std::size_t n = probe_tensors.size();
  const std::size_t per = (static_cast<std::size_t>(std::max(coordinates, 1)) + n - 1) / n;
  std::mt19937_64 rng(seed);
  GradcheckResult result;
  for (std::size_t k = 0; k < n; ++k) {
    Eigen::MatrixXd &t = *probe_tensors[k].second;
    std::uniform_int_distribution<Eigen::Index> pick(0, t.size() - 1);
    for (std::size_t c = 0; c < per; ++c) {
      const Eigen::Index i = pick(rng);
      const double saved = t.data()[i];
      t.data()[i] = saved + step;
      const double up = forward_loss(probe, batch, lambda).total;
      t.data()[i] = saved - step;
      const double down = forward_loss(probe, batch, lambda).total;
      t.data()[i] = saved;
      CoordinateCheck chk;
      chk.tensor = std::string(probe_tensors[k].first);
      chk.index = i;
      chk.analytic = grad_tensors[k]->data()[i];
      chk.numeric = (up - down) / (2.0 * step);
      chk.relative_error = relative_error(chk.analytic, chk.numeric);
      if (result.checks.empty() || chk.relative_error > result.max_relative_error) {
        result.max_relative_error = chk.relative_error;
        result.worst = chk;
      }
      result.checks.push_back(std::move(chk));
    }
  }
  result.tensors_covered = n;
  return result;
}

GradcheckResult run_gradcheck(const GradcheckOptions &o) {
  ModelConfig config;
  config.embed_dim = o.embed_dim;
  config.hidden_dim = o.hidden_dim;
  config.attention_dim = o.attention_dim;
  config.target_vocab_size = o.target_vocab_size;
  config.init_range = o.init_range;
  config.seed = o.seed;
  if (config.target_vocab_size < 3)
    throw Error("gradcheck needs a target vocabulary of at least 3 tokens");
  const Parameters params = Parameters::random(config);
  const auto batch = random_batch(config, o.batch_size, o.seed + 1);
  return check_gradients(params, batch, o.lambda, o.coordinates, o.step, o.seed + 2);
}

} // namespace ptc::nmt
