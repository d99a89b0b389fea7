// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ptc {

/// Levenshtein distance with unit insert, delete and substitute costs.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// Negated sum of per-position edit distances. Throws on length mismatch.
int calc_score(const std::vector<std::string> &segments,
               const std::vector<std::string> &syllables);

/// Partition of an input string into contiguous, nonempty segments.
struct Segmentation {
  std::size_t input_length = 0;
  std::vector<std::size_t> starts; ///< starts[0] == 0, strictly increasing
  int score = 0;

  std::size_t size() const { return starts.size(); }
  std::size_t begin_of(std::size_t j) const { return starts[j]; }
  std::size_t end_of(std::size_t j) const {
    return j + 1 < starts.size() ? starts[j + 1] : input_length;
  }
  std::size_t length_of(std::size_t j) const { return end_of(j) - begin_of(j); }

  /// Index of the segment that owns letter i.
  std::size_t segment_of(std::size_t i) const;

  std::vector<std::string> segments(std::string_view input) const;

  /// Binary letters x segments membership, row-major.
  std::vector<std::vector<unsigned char>> indicator() const;

  bool operator==(const Segmentation &) const = default;
};

/**
 * Best-scoring split of `input` into one segment per syllable.
 *
 * Candidates are enumerated recursively, shortest leading segment first;
 * every segment but the last is at most kMaxSyllableLength letters and the
 * last takes the remainder. The first candidate reaching the maximum score
 * wins. Throws ptc::Error when there are no syllables or fewer letters than
 * syllables.
 */
Segmentation gen_segmentation(std::string_view input,
                              const std::vector<std::string> &syllables);

} // namespace ptc
