// SPDX-License-Identifier: Apache-2.0
#include <ptc/corpus.hpp>
#include <ptc/error.hpp>
#include <ptc/transition.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ptc;

namespace {

std::filesystem::path temp_path(const std::string &name) {
  return std::filesystem::temp_directory_path() / name;
}

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Lexicon small_lexicon() {
  return Lexicon::from_syllables({"ni", "hao", "ma", "shi", "bu", "you", "wo", "de", "a", "e",
                                  "zhong", "guo", "ren", "shang", "zao", "jian"});
}

} // namespace

TEST(Transitions, NoErrorsGivesIdentityRow) {
  KeystrokeLog log(10, Keystroke{'o', 'o'});
  const TransitionModel m = estimate_transitions(log);
  EXPECT_EQ(m('o', 'o'), 1.0);
  for (char c = 'a'; c <= 'z'; ++c) {
    if (c != 'o')
      EXPECT_EQ(m('o', c), 0.0);
    EXPECT_EQ(m(c, c), 1.0); // unobserved rows are identity too
  }
}

TEST(Transitions, DirectRatio) {
  KeystrokeLog log(8, Keystroke{'o', 'o'});
  log.push_back({'o', 'p'});
  log.push_back({'o', 'p'});
  const TransitionModel m = estimate_transitions(log);
  EXPECT_DOUBLE_EQ(m('o', 'p'), 0.2);
  EXPECT_DOUBLE_EQ(m('o', 'o'), 0.8);
  EXPECT_EQ(m.total(letter_index('o')), 10u);
}

TEST(Transitions, RowsAreDistributions) {
  NoiseSpec spec = NoiseSpec::with_error_rate(0.08);
  std::mt19937_64 rng(3);
  const TransitionModel m = estimate_transitions(sample_keystrokes(spec, 5000, rng), 0.5);
  EXPECT_LE(m.max_row_deviation(), 1e-12);
  EXPECT_LE(spec.transition_model().max_row_deviation(), 1e-12);
  for (int i = 0; i < kLetters; ++i)
    for (int j = 0; j < kLetters; ++j) {
      EXPECT_GE(m(i, j), 0.0);
      EXPECT_LE(m(i, j), 1.0);
    }
}

TEST(Transitions, GeneratingMatrixSpreadsOverNeighbors) {
  NoiseSpec spec = NoiseSpec::with_error_rate(0.08);
  const TransitionModel p = spec.transition_model();
  EXPECT_DOUBLE_EQ(p('o', 'o'), 0.92);
  // o has four neighbors: i, p, k, l
  for (char c : std::string("ipkl"))
    EXPECT_DOUBLE_EQ(p('o', c), 0.02);
  EXPECT_EQ(p('o', 'a'), 0.0);
}

TEST(Transitions, FileRoundTripIsExact) {
  NoiseSpec spec = NoiseSpec::with_error_rate(0.0731);
  std::mt19937_64 rng(9);
  const TransitionModel m = estimate_transitions(sample_keystrokes(spec, 3000, rng), 0.1);
  const auto path = temp_path("ptc_pt_roundtrip.txt");
  save_transition_model(m, path);
  EXPECT_EQ(load_transition_model(path), m);
  EXPECT_EQ(slurp(path).rfind("ptmodel v1\n", 0), 0u);
}

TEST(KeystrokeLog, ParseAndErrors) {
  const auto path = temp_path("ptc_log.tsv");
  std::ofstream(path) << "o\tp\na\ta\n";
  const KeystrokeLog log = load_keystroke_log(path);
  ASSERT_EQ(log.size(), 2u);
  EXPECT_EQ(log[0], (Keystroke{'o', 'p'}));

  std::ofstream(path) << "o\tp\no\tpp\n";
  try {
    load_keystroke_log(path);
    FAIL() << "expected parse error";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 2u);
  }

  save_keystroke_log(log, path);
  EXPECT_EQ(load_keystroke_log(path), log);
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify_input_type("nihaoma", {"ni", "hao", "ma"}), InputType::CP);
  EXPECT_EQ(classify_input_type("nihaom", {"ni", "hao", "ma"}), InputType::LAP);
  EXPECT_EQ(classify_input_type("nhm", {"ni", "hao", "ma"}), InputType::GAP);
  EXPECT_EQ(classify_input_type("niyiubudhi", {"ni", "you", "bu", "shi"}), InputType::MP);
  EXPECT_EQ(classify_input_type("nhaoma", {"ni", "hao", "ma"}), InputType::LAP);
  // Single-letter syllables make CP and GAP coincide; CP wins.
  EXPECT_EQ(classify_input_type("ae", {"a", "e"}), InputType::CP);
}

TEST(Corrupt, Examples) {
  NoiseSpec spec = NoiseSpec::with_error_rate(0.1);
  std::mt19937_64 rng(1);
  EXPECT_EQ(corrupt_sentence({"ni", "hao"}, InputType::CP, spec, rng), "nihao");
  EXPECT_EQ(corrupt_sentence({"ni", "hao", "ma"}, InputType::GAP, spec, rng), "nhm");

  NoiseSpec forced;
  forced.error_rates[letter_index('o')] = 1.0;
  forced.neighbors[letter_index('o')] = "p";
  KeystrokeLog log;
  EXPECT_EQ(corrupt_sentence({"ni", "hao"}, InputType::MP, forced, rng, &log), "nihap");
  EXPECT_EQ(log.size(), 5u);
  EXPECT_EQ(log.back(), (Keystroke{'o', 'p'}));
}

TEST(Corrupt, LapFallsBackToGapForOneLongSyllable) {
  NoiseSpec spec = NoiseSpec::with_error_rate(0.1);
  std::mt19937_64 rng(2);
  EXPECT_EQ(corrupt_sentence({"hao"}, InputType::LAP, spec, rng), "h");
  EXPECT_EQ(corrupt_sentence({"a", "hao"}, InputType::LAP, spec, rng), "ah");
}

TEST(Corrupt, ClassifierRecoversGeneratedType) {
  NoiseSpec spec = NoiseSpec::with_error_rate(0.1);
  std::mt19937_64 rng(4);
  const std::vector<std::vector<std::string>> sentences = {
    {"ni", "hao", "ma"}, {"zhong", "guo", "ren"}, {"wo", "shi"}, {"zao", "shang", "hao"}};
  for (int round = 0; round < 50; ++round)
    for (const auto &s : sentences) {
      EXPECT_EQ(classify_input_type(corrupt_sentence(s, InputType::CP, spec, rng), s),
                InputType::CP);
      EXPECT_EQ(classify_input_type(corrupt_sentence(s, InputType::GAP, spec, rng), s),
                InputType::GAP);
      EXPECT_EQ(classify_input_type(corrupt_sentence(s, InputType::LAP, spec, rng), s),
                InputType::LAP);
      const std::string mp = corrupt_sentence(s, InputType::MP, spec, rng);
      EXPECT_EQ(mp.size(), concat(s).size());
      EXPECT_NE(mp, concat(s));
    }
}

TEST(Corpus, AllCleanWhenNoNoise) {
  NoiseSpec spec = NoiseSpec::with_error_rate(0.0);
  spec.type_mix = {1, 0, 0, 0};
  const Corpus c = generate_corpus(small_lexicon(), 10, spec);
  ASSERT_EQ(c.samples.size(), 10u);
  for (const auto &s : c.samples) {
    EXPECT_EQ(s.source, concat(s.target));
    EXPECT_EQ(s.type, InputType::CP);
  }
}

TEST(Corpus, TypeMixWithinSamplingTolerance) {
  const Lexicon lex = Lexicon::load(PTC_TEST_DATA_DIR "/pinyin_syllables.txt");
  NoiseSpec spec = NoiseSpec::with_error_rate(0.08);
  spec.type_mix = kLoggedTypeMix;
  spec.seed = 17;
  const Corpus c = generate_corpus(lex, 1000, spec);
  std::array<double, 4> counts{};
  for (const auto &s : c.samples)
    counts[static_cast<std::size_t>(s.type)] += 1.0;
  for (std::size_t t = 0; t < 4; ++t)
    EXPECT_NEAR(counts[t] / 10.0, kLoggedTypeMix[t], 3.0) << to_string(kInputTypes[t]);
}

TEST(Corpus, SeededRunsAreIdentical) {
  NoiseSpec spec = NoiseSpec::with_error_rate(0.08);
  spec.type_mix = kLoggedTypeMix;
  spec.seed = 99;
  const auto a = generate_corpus(small_lexicon(), 200, spec);
  const auto b = generate_corpus(small_lexicon(), 200, spec);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.keystrokes, b.keystrokes);
  CorpusOptions sharded;
  sharded.shards = 3;
  sharded.workers = 3;
  const auto c = generate_corpus(small_lexicon(), 200, spec, sharded);
  sharded.workers = 1;
  EXPECT_EQ(c.samples, generate_corpus(small_lexicon(), 200, spec, sharded).samples);
}

TEST(Corpus, FileRoundTrip) {
  NoiseSpec spec = NoiseSpec::with_error_rate(0.08);
  spec.type_mix = kLoggedTypeMix;
  const auto c = generate_corpus(small_lexicon(), 100, spec);
  const auto path = temp_path("ptc_corpus.tsv");
  save_corpus(c.samples, path);
  EXPECT_EQ(load_corpus(path), c.samples);
}

TEST(Corpus, EmptyLexiconIsAnError) {
  EXPECT_THROW(generate_corpus(Lexicon{}, 10, NoiseSpec::with_error_rate(0.1)), Error);
}

TEST(Estimation, ConvergesWithMoreKeystrokes) {
  NoiseSpec spec = NoiseSpec::with_error_rate(0.08);
  const TransitionModel truth = spec.transition_model();
  double prev = 1.0;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    std::mt19937_64 rng(7);
    const TransitionModel est = estimate_transitions(sample_keystrokes(spec, n, rng));
    double worst = 0.0;
    for (int i = 0; i < kLetters; ++i)
      for (int j = 0; j < kLetters; ++j)
        worst = std::max(worst, std::abs(est(i, j) - truth(i, j)));
    EXPECT_LT(worst, prev);
    prev = worst;
  }
  EXPECT_LE(prev, 0.02);
}
