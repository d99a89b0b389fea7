// SPDX-License-Identifier: Apache-2.0
/**
 * @file   lexicon.hpp
 * @brief  Pinyin syllable inventory, source alphabet and target vocabulary.
 *
 * Source tokens are the letters a-z (ids 0..25) followed by the end marker
 * (id 26). Target tokens are the syllables in sorted order followed by the
 * end marker and the unknown token.
 */
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ptc {

inline constexpr std::size_t kMaxSyllableLength = 6;

inline constexpr int kSourceVocabSize = 27;
inline constexpr int kSourceEnd = 26;

inline constexpr std::string_view kEndToken = "</s>";
inline constexpr std::string_view kUnknownToken = "<unk>";

inline bool is_letter(char c) { return c >= 'a' && c <= 'z'; }
bool is_letter_string(std::string_view s);

/// Letters of `raw` as source ids with the end marker appended.
/// Throws ptc::Error on characters outside a-z.
std::vector<int> encode_source(std::string_view raw);

std::string_view source_token(int id);

/// First letter of a syllable, used for acronym input.
char acronym_of(std::string_view syllable);

class Lexicon {
public:
  Lexicon() = default;

  /// Validates, deduplicates and sorts. Throws ptc::Error on a bad syllable.
  static Lexicon from_syllables(std::vector<std::string> syllables);

  /// One syllable per line, '#' comments and blank lines ignored.
  static Lexicon load(const std::filesystem::path &path);

  const std::vector<std::string> &syllables() const { return syllables_; }
  std::size_t size() const { return syllables_.size(); }
  bool empty() const { return syllables_.empty(); }
  bool contains(std::string_view s) const;

  int target_vocab_size() const { return static_cast<int>(syllables_.size()) + 2; }
  int end_token() const { return static_cast<int>(syllables_.size()); }
  int unknown_token() const { return static_cast<int>(syllables_.size()) + 1; }

  /// Syllable id, or the unknown token for anything outside the lexicon.
  int target_id(std::string_view token) const;
  std::string_view target_token(int id) const;

  std::vector<int> encode_target(const std::vector<std::string> &syllables) const;
  std::vector<std::string> decode_target(const std::vector<int> &ids) const;

private:
  std::vector<std::string> syllables_;
  std::unordered_map<std::string, int> index_;
};

/// Validation message for a candidate syllable, empty if it is acceptable.
std::optional<std::string> syllable_problem(std::string_view s);

} // namespace ptc
