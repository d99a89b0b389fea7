// SPDX-License-Identifier: Apache-2.0
/**
 * @file   beam_search.hpp
 * @brief  K-best decoding over the attentional decoder.
 */
#pragma once

#include <ptc/nmt/network.hpp>

#include <span>
#include <vector>

namespace ptc::nmt {

struct Hypothesis {
  std::vector<int> tokens; ///< emitted ids, ending with the end marker when finished
  double log_prob = 0.0;
  Eigen::VectorXd hidden;
  bool finished = false; ///< false when cut at the decode length limit
};

/**
 * Keeps the K best live prefixes per step. A prefix ending in the end marker
 * leaves the beam as a finished hypothesis. Search stops when K hypotheses
 * are finished and no live prefix can still beat the K-th of them, or when
 * `max_length` tokens have been emitted. Ties are broken by lower parent
 * rank, then lower token id, so K = 1 reproduces greedy decoding.
 *
 * Returns at most K hypotheses, best first.
 */
std::vector<Hypothesis> beam_search(const Parameters &params, std::span<const int> source,
                                    int beam, int max_length);

/// Argmax decoding, lowest id on ties.
Hypothesis greedy_decode(const Parameters &params, std::span<const int> source, int max_length);

} // namespace ptc::nmt
