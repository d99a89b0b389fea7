// SPDX-License-Identifier: Apache-2.0
#include <ptc/error.hpp>
#include <ptc/eval.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

using namespace ptc;

namespace {

// Tries every alignment path; used only for short sequences.
std::pair<std::size_t, std::size_t> brute_script(const Syllables &a, std::size_t i,
                                                 const Syllables &b, std::size_t j) {
  // returns (cost, matches) with minimal cost, then maximal matches
  if (i == a.size())
    return {b.size() - j, 0};
  if (j == b.size())
    return {a.size() - i, 0};
  std::vector<std::pair<std::size_t, std::size_t>> opts;
  auto d = brute_script(a, i + 1, b, j + 1);
  const bool same = a[i] == b[j];
  opts.push_back({d.first + (same ? 0 : 1), d.second + (same ? 1 : 0)});
  auto x = brute_script(a, i + 1, b, j);
  opts.push_back({x.first + 1, x.second});
  auto y = brute_script(a, i, b, j + 1);
  opts.push_back({y.first + 1, y.second});
  return *std::min_element(opts.begin(), opts.end(), [](auto l, auto r) {
    return l.first != r.first ? l.first < r.first : l.second > r.second;
  });
}

Sample sample(std::string src, Syllables tgt, InputType t) { return {std::move(src), std::move(tgt), t}; }

} // namespace

TEST(WordAccuracy, Examples) {
  EXPECT_DOUBLE_EQ(word_accuracy({"ni", "hao"}, {"ni", "hao"}), 1.0);
  EXPECT_DOUBLE_EQ(word_accuracy({"ni", "hao"}, {"ni", "hao", "ma"}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(word_accuracy({"yi", "jia", "men"}, {"yi", "jian"}), 0.5);
  EXPECT_DOUBLE_EQ(word_accuracy({}, {"a"}), 0.0);
  EXPECT_THROW(word_accuracy({"a"}, {}), Error);
}

TEST(WordAccuracy, MatchesExhaustiveScriptSearch) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> len(0, 5), tok(0, 3);
  const Syllables pool = {"a", "ba", "ni", "hao"};
  for (int n = 0; n < 500; ++n) {
    Syllables a(static_cast<std::size_t>(len(rng))), b(static_cast<std::size_t>(len(rng) + 1));
    for (auto &s : a)
      s = pool[static_cast<std::size_t>(tok(rng))];
    for (auto &s : b)
      s = pool[static_cast<std::size_t>(tok(rng))];
    ASSERT_EQ(matched_syllables(a, b), brute_script(a, 0, b, 0).second);
    const double w = word_accuracy(a, b);
    ASSERT_GE(w, 0.0);
    ASSERT_LE(w, 1.0);
  }
}

TEST(SentenceAccuracy, Modes) {
  const std::vector<Syllables> refs = {{"ni", "hao"}, {"ma"}};
  std::vector<CandidateList> cands = {{{"ni", "hao"}}, {{"ma"}}};
  EXPECT_EQ(sentence_accuracy(cands, refs, SentenceMode::Top1), 1.0);
  EXPECT_EQ(sentence_accuracy(cands, refs, SentenceMode::TopK), 1.0);

  cands = {{{"a"}, {"b"}, {"ni", "hao"}}, {}};
  EXPECT_EQ(sentence_accuracy(cands, refs, SentenceMode::Top1), 0.0);
  EXPECT_EQ(sentence_accuracy(cands, refs, SentenceMode::TopK), 0.5);
}

TEST(SentenceAccuracy, TopKNeverBelowTop1) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> tok(0, 2), k(0, 4);
  const Syllables pool = {"a", "b", "c"};
  for (int round = 0; round < 50; ++round) {
    std::vector<Syllables> refs;
    std::vector<CandidateList> cands;
    for (int i = 0; i < 20; ++i) {
      refs.push_back({pool[static_cast<std::size_t>(tok(rng))]});
      CandidateList c(static_cast<std::size_t>(k(rng)));
      for (auto &x : c)
        x = {pool[static_cast<std::size_t>(tok(rng))]};
      cands.push_back(c);
    }
    EXPECT_GE(sentence_accuracy(cands, refs, SentenceMode::TopK),
              sentence_accuracy(cands, refs, SentenceMode::Top1));
  }
}

TEST(Report, OneWrongSyllableOfThree) {
  std::vector<Sample> samples;
  std::vector<CandidateList> cands;
  for (int i = 0; i < 6; ++i) {
    samples.push_back(sample("nihaoma", {"ni", "hao", "ma"}, kInputTypes[static_cast<std::size_t>(i % 4)]));
    cands.push_back({{"ni", "hao", "me"}});
  }
  const EvalReport r = score_candidates(samples, cands, 1);
  EXPECT_NEAR(r.mix().word_acc(), 200.0 / 3.0, 1e-9);
  EXPECT_EQ(r.mix().sentence_acc_top1(), 0.0);
}

TEST(Report, MixIsCountWeightedAggregate) {
  std::vector<Sample> samples = {sample("a", {"a"}, InputType::CP), sample("b", {"ba"}, InputType::MP),
                                 sample("c", {"ca", "a"}, InputType::MP),
                                 sample("d", {"da"}, InputType::GAP)};
  std::vector<CandidateList> cands = {{{"a"}}, {{"x"}, {"ba"}}, {{"ca", "a"}}, {}};
  const EvalReport r = score_candidates(samples, cands, 2);
  std::size_t n = 0;
  double weighted = 0.0;
  for (InputType t : kInputTypes) {
    n += r.at(t).samples;
    weighted += r.at(t).sentence_acc_topk() * static_cast<double>(r.at(t).samples);
  }
  EXPECT_EQ(r.mix().samples, n);
  EXPECT_NEAR(r.mix().sentence_acc_topk(), weighted / static_cast<double>(n), 1e-12);
  EXPECT_EQ(r.at(InputType::MP).sentence_top1, 1u);
  EXPECT_EQ(r.at(InputType::MP).sentence_topk, 2u);

  std::ostringstream table, tsv;
  print_report(table, r);
  write_report_tsv(tsv, r);
  EXPECT_NE(table.str().find("note: no LAP samples"), std::string::npos);
  EXPECT_NE(table.str().find("MIX"), std::string::npos);
  EXPECT_EQ(tsv.str().find("type\tsamples"), 0u);
}

TEST(Report, ShuffleInvariant) {
  std::vector<Sample> samples;
  std::vector<CandidateList> cands;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 40; ++i) {
    samples.push_back(sample("x", {"a", i % 3 ? "b" : "c"}, kInputTypes[static_cast<std::size_t>(i % 4)]));
    cands.push_back({{"a", "b"}, {"a", "c"}});
  }
  const EvalReport before = score_candidates(samples, cands, 2);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Sample> s2;
  std::vector<CandidateList> c2;
  for (auto i : order) {
    s2.push_back(samples[i]);
    c2.push_back(cands[i]);
  }
  const EvalReport after = score_candidates(s2, c2, 2);
  for (InputType t : kInputTypes) {
    EXPECT_EQ(before.at(t).matched, after.at(t).matched);
    EXPECT_EQ(before.at(t).sentence_topk, after.at(t).sentence_topk);
  }
}

TEST(Sweep, ConstantCurveChoosesTwo) {
  std::vector<Sample> samples = {sample("a", {"a"}, InputType::CP), sample("b", {"b", "c"}, InputType::CP)};
  std::vector<CandidateList> cands = {{{"a"}, {"x"}, {"y"}}, {{"b", "c"}, {"b"}, {"c"}}};
  const SweepResult r = sweep_candidates(samples, cands, 3, 0.005);
  EXPECT_EQ(r.chosen_k, 2);
  EXPECT_TRUE(r.converged);
  for (const auto &[k, acc] : r.curve)
    EXPECT_EQ(acc, 1.0);
  EXPECT_THROW(sweep_candidates(samples, cands, 1, 0.005), Error);
}

TEST(Sweep, MonotoneAndFallsBackToKMax) {
  std::vector<Sample> samples;
  std::vector<CandidateList> cands;
  for (int i = 0; i < 4; ++i) {
    samples.push_back(sample("q", {"r" + std::to_string(i)}, InputType::MP));
    CandidateList c;
    for (int j = 0; j < 4; ++j)
      c.push_back({j == i ? "r" + std::to_string(i) : "no"});
    cands.push_back(c);
  }
  const SweepResult r = sweep_candidates(samples, cands, 4, 0.1);
  for (std::size_t i = 1; i < r.curve.size(); ++i)
    EXPECT_GE(r.curve[i].second, r.curve[i - 1].second);
  EXPECT_EQ(r.chosen_k, 4);
  EXPECT_FALSE(r.converged);
  std::ostringstream tsv;
  write_sweep_tsv(tsv, r);
  EXPECT_EQ(tsv.str(), "K\tw_acc\n1\t0.25\n2\t0.5\n3\t0.75\n4\t1\n");
}
