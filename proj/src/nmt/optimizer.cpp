// SPDX-License-Identifier: Apache-2.0
#include <ptc/error.hpp>
#include <ptc/nmt/optimizer.hpp>

#include <cmath>
#include <string>

namespace ptc::nmt {

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "adam")
    return OptimizerKind::Adam;
  if (name == "sgd")
    return OptimizerKind::Sgd;
  throw Error("unknown optimizer '" + std::string(name) + "' (expected adam or sgd)");
}

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::Adam ? "adam" : "sgd";
}

double global_norm(const Parameters &grads) {
  double sq = 0.0;
  grads.for_each([&](std::string_view, const Eigen::MatrixXd &t) { sq += t.squaredNorm(); });
  return std::sqrt(sq);
}

double clip_global_norm(Parameters &grads, double max_norm) {
  const double norm = global_norm(grads);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    grads.for_each([&](std::string_view, Eigen::MatrixXd &t) { t *= scale; });
  }
  return norm;
}

Optimizer::Optimizer(const OptimizerSpec &spec, const Parameters &shape)
  : spec_(spec), m_(shape), v_(shape) {
  if (!(spec.learning_rate > 0.0))
    throw Error("learning rate must be positive");
  m_.set_zero();
  v_.set_zero();
}

void Optimizer::step(Parameters &params, const Parameters &grads) {
  ++t_;
  const double lr = spec_.learning_rate;
  if (spec_.kind == OptimizerKind::Sgd) {
    zip_tensors(params, grads,
                [&](std::string_view, Eigen::MatrixXd &p, const Eigen::MatrixXd &g) { p -= lr * g; });
    return;
  }
  const double b1 = spec_.beta1, b2 = spec_.beta2, eps = spec_.epsilon;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  std::size_t k = 0;
  std::vector<Eigen::MatrixXd *> ms, vs;
  m_.for_each([&](std::string_view, Eigen::MatrixXd &t) { ms.push_back(&t); });
  v_.for_each([&](std::string_view, Eigen::MatrixXd &t) { vs.push_back(&t); });
  zip_tensors(params, grads, [&](std::string_view, Eigen::MatrixXd &p, const Eigen::MatrixXd &g) {
    Eigen::MatrixXd &m = *ms[k];
    Eigen::MatrixXd &v = *vs[k];
    ++k;
    m = b1 * m + (1.0 - b1) * g;
    v.array() = b2 * v.array() + (1.0 - b2) * g.array().square();
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  });
}

} // namespace ptc::nmt
