// SPDX-License-Identifier: Apache-2.0
#include <ptc/alignment.hpp>
#include <ptc/error.hpp>
#include <ptc/lexicon.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>

namespace ptc {

Eigen::MatrixXd alignment_support(const Segmentation &seg) {
  const auto rows = static_cast<Eigen::Index>(seg.input_length) + 1;
  const auto cols = static_cast<Eigen::Index>(seg.size()) + 1;
  Eigen::MatrixXd support = Eigen::MatrixXd::Zero(rows, cols);
  for (std::size_t i = 0; i < seg.input_length; ++i)
    support(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(seg.segment_of(i))) = 1.0;
  support(rows - 1, cols - 1) = 1.0;
  return support;
}

AlignmentMatrix build_phi(std::string_view input, const std::vector<std::string> &syllables,
                          const Segmentation &seg, const TransitionModel &pt) {
  if (seg.input_length != input.size() || seg.size() != syllables.size() || seg.size() == 0)
    throw Error("build_phi: segmentation does not match input and syllables");
  AlignmentMatrix phi;
  phi.support = alignment_support(seg);
  phi.values = Eigen::MatrixXd::Zero(phi.support.rows(), phi.support.cols());
  for (std::size_t i = 0; i < input.size(); ++i) {
    const std::size_t j = seg.segment_of(i);
    double best = 0.0;
    for (char intended : syllables[j])
      best = std::max(best, pt(intended, input[i]));
    phi.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = best;
  }
  phi.values(phi.rows() - 1, phi.cols() - 1) = 1.0;
  return phi;
}

AlignmentMatrix normalize_phi(const AlignmentMatrix &phi) {
  AlignmentMatrix out = phi;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    auto col = out.values.col(j);
    const double sum = col.sum();
    if (std::abs(sum - 1.0) <= 1e-12)
      continue;
    if (sum > 0.0) {
      col /= sum;
      continue;
    }
    const double n = out.support.col(j).sum();
    if (n > 0.0)
      col = out.support.col(j) / n;
  }
  return out;
}

double attention_distance(const Eigen::MatrixXd &target, const Eigen::MatrixXd &attention) {
  if (target.rows() != attention.rows() || target.cols() != attention.cols())
    throw Error("attention_distance: shape " + std::to_string(target.rows()) + "x" +
                std::to_string(target.cols()) + " vs " + std::to_string(attention.rows()) +
                "x" + std::to_string(attention.cols()));
  return (target - attention).squaredNorm();
}

AlignmentMatrix supervision_target(std::string_view input,
                                   const std::vector<std::string> &syllables,
                                   const TransitionModel &pt) {
  const Segmentation seg = gen_segmentation(input, syllables);
  return normalize_phi(build_phi(input, syllables, seg, pt));
}

void write_alignment_tsv(std::ostream &out, const AlignmentMatrix &phi, std::string_view input,
                         const std::vector<std::string> &syllables) {
  if (phi.rows() != static_cast<Eigen::Index>(input.size()) + 1 ||
      phi.cols() != static_cast<Eigen::Index>(syllables.size()) + 1)
    throw Error("write_alignment_tsv: labels do not match matrix shape");
  out << std::setprecision(6);
  for (const auto &s : syllables)
    out << '\t' << s;
  out << '\t' << kEndToken << '\n';
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    if (i < static_cast<Eigen::Index>(input.size()))
      out << input[static_cast<std::size_t>(i)];
    else
      out << kEndToken;
    for (Eigen::Index j = 0; j < phi.cols(); ++j)
      out << '\t' << phi.values(i, j);
    out << '\n';
  }
}

} // namespace ptc
