// SPDX-License-Identifier: Apache-2.0
/**
 * @file   alignment.hpp
 * @brief  Letter-to-syllable supervision targets for the attention weights.
 *
 * Rows are the input letters followed by the end marker, columns the target
 * syllables followed by the end marker.
 */
#pragma once

#include <ptc/segmentation.hpp>
#include <ptc/transition.hpp>

#include <Eigen/Core>

#include <ostream>
#include <string>
#include <vector>

namespace ptc {

struct AlignmentMatrix {
  Eigen::MatrixXd values;  ///< (letters + 1) x (syllables + 1)
  Eigen::MatrixXd support; ///< 1 on cells allowed to be nonzero, else 0

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

/// Support of a segmentation: its letter/segment cells plus the corner.
Eigen::MatrixXd alignment_support(const Segmentation &seg);

/**
 * Cell (i, j) holds the largest probability that some letter of syllable j
 * is mistyped as letter i, masked to the segment of syllable j. The end
 * marker row and column are zero except for a 1 in the corner.
 */
AlignmentMatrix build_phi(std::string_view input, const std::vector<std::string> &syllables,
                          const Segmentation &seg, const TransitionModel &pt);

/// Column-wise L1 scaling. A column with no mass becomes uniform over its
/// support; a column already summing to 1 (within 1e-12) is left untouched.
AlignmentMatrix normalize_phi(const AlignmentMatrix &phi);

/// Sum of squared elementwise differences of two equally shaped matrices.
double attention_distance(const Eigen::MatrixXd &target, const Eigen::MatrixXd &attention);

/// Convenience: segmentation, construction and normalization in one call.
AlignmentMatrix supervision_target(std::string_view input,
                                   const std::vector<std::string> &syllables,
                                   const TransitionModel &pt);

/// Labelled TSV grid: header row of syllables, one row per letter.
void write_alignment_tsv(std::ostream &out, const AlignmentMatrix &phi, std::string_view input,
                         const std::vector<std::string> &syllables);

} // namespace ptc
