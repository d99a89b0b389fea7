// SPDX-License-Identifier: Apache-2.0
/**
 * @file   transition.hpp
 * @brief  Letter-to-letter mistype probabilities estimated from keystroke logs.
 */
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ptc {

inline constexpr int kLetters = 26;

inline int letter_index(char c) { return c - 'a'; }
inline char letter_at(int i) { return static_cast<char>('a' + i); }

/// One correction event: the user meant `intended` and pressed `typed`.
struct Keystroke {
  char intended;
  char typed;
  bool operator==(const Keystroke &) const = default;
};

using KeystrokeLog = std::vector<Keystroke>;

/// `intended<TAB>typed` per line.
KeystrokeLog load_keystroke_log(const std::filesystem::path &path);
void save_keystroke_log(const KeystrokeLog &log, const std::filesystem::path &path);

/**
 * p(i, j) is the probability that letter i is meant and letter j typed.
 * Rows of observed letters are distributions whose diagonal carries the
 * correct-keystroke mass; rows of unobserved letters are identity rows.
 */
class TransitionModel {
public:
  using Matrix = std::array<std::array<double, kLetters>, kLetters>;

  /// Identity model: every letter is always typed correctly.
  TransitionModel();
  explicit TransitionModel(const Matrix &p);

  double operator()(int intended, int typed) const { return p_[intended][typed]; }
  double operator()(char intended, char typed) const {
    return p_[letter_index(intended)][letter_index(typed)];
  }
  const Matrix &matrix() const { return p_; }

  /// Raw counts behind the estimate, if the model came from a log.
  const std::vector<std::uint64_t> &counts() const { return counts_; }
  std::uint64_t total(int intended) const;

  /// Largest |row sum - 1| over all rows.
  double max_row_deviation() const;

  bool operator==(const TransitionModel &other) const { return p_ == other.p_; }

  friend TransitionModel estimate_transitions(const KeystrokeLog &log, double smoothing);

private:
  Matrix p_{};
  std::vector<std::uint64_t> counts_; // 26 x 26 row-major, empty if not estimated
};

/**
 * Ratio of mistype counts to keystroke counts per intended letter. With
 * `smoothing` > 0 every off-diagonal count of an observed row gets that
 * additive pseudo-count.
 */
TransitionModel estimate_transitions(const KeystrokeLog &log, double smoothing = 0.0);

/// Header `ptmodel v1`, then 26 rows of 26 probabilities.
void save_transition_model(const TransitionModel &model, const std::filesystem::path &path);
TransitionModel load_transition_model(const std::filesystem::path &path);

/// Adjacent keys per letter.
using NeighborTable = std::array<std::string, kLetters>;

/// The built-in QWERTY adjacency.
const NeighborTable &qwerty_neighbors();

/// `letter<TAB>neighbors` per line; every letter needs at least one neighbor.
NeighborTable load_neighbor_table(const std::filesystem::path &path);

} // namespace ptc
