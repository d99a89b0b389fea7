// SPDX-License-Identifier: Apache-2.0
/**
 * @file   corpus.hpp
 * @brief  Input-type taxonomy, keyboard noise model and synthetic corpora.
 */
#pragma once

#include <ptc/lexicon.hpp>
#include <ptc/transition.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace ptc {

/// Correct pinyin, local acronym, global acronym, misspelled pinyin.
enum class InputType { CP = 0, LAP = 1, GAP = 2, MP = 3 };

inline constexpr std::array<InputType, 4> kInputTypes = {InputType::CP, InputType::LAP,
                                                         InputType::GAP, InputType::MP};

std::string_view to_string(InputType t);
InputType parse_input_type(std::string_view s);

/// Proportions of CP, LAP, GAP and MP observed in real IME logs (percent).
inline constexpr std::array<double, 4> kLoggedTypeMix = {41.58, 34.74, 17.98, 5.70};

std::string concat(const std::vector<std::string> &syllables);
std::string acronym_string(const std::vector<std::string> &syllables);

/// Precedence CP > GAP > LAP > MP.
InputType classify_input_type(std::string_view input, const std::vector<std::string> &syllables);

struct NoiseSpec {
  std::array<double, kLetters> error_rates{}; ///< per intended letter
  NeighborTable neighbors = qwerty_neighbors();
  std::array<double, 4> type_mix = {1.0, 0.0, 0.0, 0.0}; ///< CP, LAP, GAP, MP
  double acronym_rate = 0.5;
  std::uint64_t seed = 1;

  /// Same error rate for every letter; requires 0 <= epsilon < 1.
  static NoiseSpec with_error_rate(double epsilon);

  /// Normalizes `type_mix` and throws ptc::Error on out-of-range values.
  void validate();

  /// Generating matrix: 1 - rate on the diagonal, the rate spread evenly over
  /// the neighbors.
  TransitionModel transition_model() const;
};

struct Sample {
  std::string source;
  std::vector<std::string> target;
  InputType type = InputType::CP;
  bool operator==(const Sample &) const = default;
};

struct Corpus {
  std::vector<Sample> samples;
  KeystrokeLog keystrokes; ///< every keystroke drawn while misspelling
};

/**
 * Renders a sentence as the given input type. LAP needs two syllables of
 * more than one letter and falls back to GAP otherwise; MP redraws until at
 * least one letter was substituted and appends every drawn keystroke,
 * including rejected attempts, to `log` when given.
 */
std::string corrupt_sentence(const std::vector<std::string> &syllables, InputType type,
                             const NoiseSpec &spec, std::mt19937_64 &rng,
                             KeystrokeLog *log = nullptr);

struct CorpusOptions {
  std::size_t min_syllables = 1;
  std::size_t max_syllables = 6;
  double zipf_exponent = 1.0;
  std::size_t shards = 1; ///< shard k is seeded with seed + k
  std::size_t workers = 1;
};

Corpus generate_corpus(const Lexicon &lexicon, std::size_t n, const NoiseSpec &spec,
                       const CorpusOptions &options = {});

/// Keystrokes with uniformly drawn intended letters, typed through the
/// generating matrix of `spec`.
KeystrokeLog sample_keystrokes(const NoiseSpec &spec, std::size_t n, std::mt19937_64 &rng);

/// `source<TAB>syllables<TAB>type` per line.
std::vector<Sample> load_corpus(const std::filesystem::path &path);
void save_corpus(const std::vector<Sample> &samples, const std::filesystem::path &path);
void append_sample(std::ostream &out, const Sample &sample);

} // namespace ptc
