// SPDX-License-Identifier: Apache-2.0
/**
 * @file   gradcheck.hpp
 * @brief  Central finite-difference check of the analytic gradient.
 */
#pragma once

#include <ptc/nmt/network.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace ptc::nmt {

struct GradcheckOptions {
  int embed_dim = 8;
  int hidden_dim = 8;
  int attention_dim = 8;
  int target_vocab_size = 12;
  int batch_size = 2;
  double init_range = 1.0; // keeps attention gradients above finite-difference noise
  double step = 1e-5;
  int coordinates = 200; ///< spread evenly over all tensors
  double lambda = 1.0;
  std::uint64_t seed = 1;
};

struct CoordinateCheck {
  std::string tensor;
  Eigen::Index index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

struct GradcheckResult {
  std::vector<CoordinateCheck> checks;
  double max_relative_error = 0.0;
  CoordinateCheck worst;
  std::size_t tensors_covered = 0;
};

/// |a - n| / max(|a|, |n|), zero when both vanish.
double relative_error(double analytic, double numeric);

/// Random batch with column-stochastic supervision targets.
std::vector<Example> random_batch(const ModelConfig &config, int batch_size, std::uint64_t seed);

GradcheckResult check_gradients(const Parameters &params, std::span<const Example> batch,
                                double lambda, int coordinates, double step, std::uint64_t seed);

/// Builds the tiny model and batch described by `options` and checks them.
GradcheckResult run_gradcheck(const GradcheckOptions &options);

} // namespace ptc::nmt
