// SPDX-License-Identifier: Apache-2.0
/**
 * @file   eval.hpp
 * @brief  Word and sentence accuracy, per-type reports and the K sweep.
 */
#pragma once

#include <ptc/corpus.hpp>
#include <ptc/nmt/checkpoint.hpp>

#include <array>
#include <ostream>
#include <string>
#include <vector>

namespace ptc {

using Syllables = std::vector<std::string>;
/// K-best candidates of one input, best first.
using CandidateList = std::vector<Syllables>;

/// Equal syllables paired by a minimum-cost edit script between pred and
/// ref. Among equally cheap scripts the one with most matches counts.
std::size_t matched_syllables(const Syllables &pred, const Syllables &ref);

/// matched_syllables / |ref|. Throws ptc::Error on an empty reference.
double word_accuracy(const Syllables &pred, const Syllables &ref);

enum class SentenceMode { Top1, TopK };

/// Fraction of references equal to the first candidate (Top1) or to any
/// candidate (TopK). An empty candidate list is a miss.
double sentence_accuracy(const std::vector<CandidateList> &candidates,
                         const std::vector<Syllables> &refs, SentenceMode mode);

struct TypeScore {
  std::size_t samples = 0;
  std::size_t ref_syllables = 0;
  std::size_t matched = 0;       ///< top-1 candidate
  std::size_t sentence_top1 = 0;
  std::size_t sentence_topk = 0;

  double word_acc() const;       ///< percent
  double sentence_acc_top1() const;
  double sentence_acc_topk() const;
  TypeScore &operator+=(const TypeScore &o);
};

struct EvalReport {
  int k = 1;
  std::array<TypeScore, 4> types{}; ///< CP, LAP, GAP, MP
  TypeScore mix() const;
  const TypeScore &at(InputType t) const { return types[static_cast<std::size_t>(t)]; }
};

/// Beam-search candidates for every sample, in corpus order.
std::vector<CandidateList> decode_corpus(const nmt::Model &model, const std::vector<Sample> &samples,
                                         int k, int workers = 1);
CandidateList correct(const nmt::Model &model, std::string_view input, int k,
                      std::vector<double> *log_probs = nullptr);

EvalReport score_candidates(const std::vector<Sample> &samples,
                            const std::vector<CandidateList> &candidates, int k);
EvalReport evaluate(const nmt::Model &model, const std::vector<Sample> &samples, int k,
                    int workers = 1);

/// Aligned table, one row per type present plus MIX. Absent types are noted.
void print_report(std::ostream &out, const EvalReport &report);
/// `type samples w_acc s_acc_top1 s_acc_topk k` with a header row.
void write_report_tsv(std::ostream &out, const EvalReport &report);

struct SweepResult {
  std::vector<std::pair<int, double>> curve; ///< (K, W-Acc fraction), K = 1..K_max
  int chosen_k = 0;
  double tau = 0.0;
  bool converged = true; ///< false when no step fell below tau
};

/// W-Acc of the best-matching candidate among the first K of each list.
double oracle_word_accuracy(const std::vector<Sample> &samples,
                            const std::vector<CandidateList> &candidates, int k);

/// Uses prefixes of the K_max lists, so the curve is non-decreasing.
SweepResult sweep_candidates(const std::vector<Sample> &samples,
                             const std::vector<CandidateList> &candidates, int k_max, double tau);
SweepResult sweep_k(const nmt::Model &model, const std::vector<Sample> &dev, int k_max,
                    double tau, int workers = 1);

/// Two columns `K<TAB>w_acc`.
void write_sweep_tsv(std::ostream &out, const SweepResult &sweep);

} // namespace ptc
