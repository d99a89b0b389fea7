// SPDX-License-Identifier: Apache-2.0
/**
 * @file   optimizer.hpp
 * @brief  First-order parameter updates and gradient clipping.
 */
#pragma once

#include <ptc/nmt/parameters.hpp>

#include <string_view>

namespace ptc::nmt {

enum class OptimizerKind { Adam, Sgd };

OptimizerKind parse_optimizer(std::string_view name);
std::string_view to_string(OptimizerKind kind);

struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

double global_norm(const Parameters &grads);

/// Rescales grads so their global norm is at most `max_norm` (0 disables).
/// Returns the norm before clipping.
double clip_global_norm(Parameters &grads, double max_norm);

class Optimizer {
public:
  Optimizer(const OptimizerSpec &spec, const Parameters &shape);
  void step(Parameters &params, const Parameters &grads);
  long steps() const { return t_; }

private:
  OptimizerSpec spec_;
  Parameters m_, v_;
  long t_ = 0;
};

} // namespace ptc::nmt
