// SPDX-License-Identifier: Apache-2.0
#include <ptc/error.hpp>
#include <ptc/eval.hpp>
#include <ptc/nmt/beam_search.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <iomanip>
#include <mutex>
#include <thread>

namespace ptc {

std::size_t matched_syllables(const Syllables &pred, const Syllables &ref) {
  // Cells hold (cost, -matches) compared lexicographically.
  struct Cell {
    std::size_t cost;
    std::size_t matches;
    bool operator<(const Cell &o) const {
      return cost != o.cost ? cost < o.cost : matches > o.matches;
    }
  };
  const std::size_t n = pred.size(), m = ref.size();
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j)
    prev[j] = {j, 0};
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = {i, 0};
    for (std::size_t j = 1; j <= m; ++j) {
      const bool same = pred[i - 1] == ref[j - 1];
      Cell diag{prev[j - 1].cost + (same ? 0 : 1), prev[j - 1].matches + (same ? 1 : 0)};
      Cell up{prev[j].cost + 1, prev[j].matches};
      Cell left{cur[j - 1].cost + 1, cur[j - 1].matches};
      cur[j] = std::min({diag, up, left});
    }
    std::swap(prev, cur);
  }
  return prev[m].matches;
}

double word_accuracy(const Syllables &pred, const Syllables &ref) {
  if (ref.empty())
    throw Error("word accuracy needs a nonempty reference");
  return static_cast<double>(matched_syllables(pred, ref)) / static_cast<double>(ref.size());
}

double sentence_accuracy(const std::vector<CandidateList> &candidates,
                         const std::vector<Syllables> &refs, SentenceMode mode) {
  if (candidates.size() != refs.size())
    throw Error("sentence accuracy: candidate and reference counts differ");
  if (refs.empty())
    return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto &c = candidates[i];
    if (c.empty())
      continue;
    if (mode == SentenceMode::Top1)
      hits += c.front() == refs[i];
    else
      hits += std::find(c.begin(), c.end(), refs[i]) != c.end();
  }
  return static_cast<double>(hits) / static_cast<double>(refs.size());
}

namespace {
double percent(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}
} // namespace

double TypeScore::word_acc() const { return percent(matched, ref_syllables); }
double TypeScore::sentence_acc_top1() const { return percent(sentence_top1, samples); }
double TypeScore::sentence_acc_topk() const { return percent(sentence_topk, samples); }

TypeScore &TypeScore::operator+=(const TypeScore &o) {
  samples += o.samples;
  ref_syllables += o.ref_syllables;
  matched += o.matched;
  sentence_top1 += o.sentence_top1;
  sentence_topk += o.sentence_topk;
  return *this;
}

TypeScore EvalReport::mix() const {
  TypeScore total;
  for (const auto &t : types)
    total += t;
  return total;
}

CandidateList correct(const nmt::Model &model, std::string_view input, int k,
                      std::vector<double> *log_probs) {
  if (log_probs)
    log_probs->clear();
  if (input.empty())
    return {};
  const std::vector<int> source = encode_source(input);
  const auto hyps =
    nmt::beam_search(model.params, source, k, model.config.max_decode_length);
  CandidateList out;
  for (const auto &h : hyps) {
    out.push_back(model.lexicon.decode_target(h.tokens));
    if (log_probs)
      log_probs->push_back(h.log_prob);
  }
  return out;
}

std::vector<CandidateList> decode_corpus(const nmt::Model &model, const std::vector<Sample> &samples,
                                         int k, int workers) {
  std::vector<CandidateList> out(samples.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < samples.size();) {
      try {
        out[i] = correct(model, samples[i].source, k);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error)
          error = std::current_exception();
      }
    }
  };
  const int n = std::max(1, workers);
  if (n == 1) {
    run();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < n; ++w)
      threads.emplace_back(run);
    for (auto &t : threads)
      t.join();
  }
  if (error)
    std::rethrow_exception(error);
  return out;
}

EvalReport score_candidates(const std::vector<Sample> &samples,
                            const std::vector<CandidateList> &candidates, int k) {
  if (samples.size() != candidates.size())
    throw Error("evaluation: sample and candidate counts differ");
  EvalReport report;
  report.k = k;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample &s = samples[i];
    const CandidateList &c = candidates[i];
    TypeScore &t = report.types[static_cast<std::size_t>(s.type)];
    ++t.samples;
    t.ref_syllables += s.target.size();
    if (c.empty())
      continue;
    t.matched += matched_syllables(c.front(), s.target);
    t.sentence_top1 += c.front() == s.target;
    t.sentence_topk += std::find(c.begin(), c.end(), s.target) != c.end();
  }
  return report;
}

EvalReport evaluate(const nmt::Model &model, const std::vector<Sample> &samples, int k,
                    int workers) {
  return score_candidates(samples, decode_corpus(model, samples, k, workers), k);
}

void print_report(std::ostream &out, const EvalReport &r) {
  const auto flags = out.flags();
  out << std::left << std::setw(6) << "type" << std::right << std::setw(9) << "samples"
      << std::setw(9) << "W-Acc" << std::setw(12) << "S-Acc@1" << std::setw(12)
      << ("S-Acc@" + std::to_string(r.k)) << '\n';
  out << std::fixed << std::setprecision(2);
  auto row = [&](std::string_view name, const TypeScore &t) {
    out << std::left << std::setw(6) << name << std::right << std::setw(9) << t.samples
        << std::setw(9) << t.word_acc() << std::setw(12) << t.sentence_acc_top1()
        << std::setw(12) << t.sentence_acc_topk() << '\n';
  };
  std::vector<std::string_view> absent;
  for (InputType type : kInputTypes) {
    if (r.at(type).samples == 0)
      absent.push_back(to_string(type));
    else
      row(to_string(type), r.at(type));
  }
  row("MIX", r.mix());
  for (auto name : absent)
    out << "note: no " << name << " samples in corpus, row omitted\n";
  out.flags(flags);
}

void write_report_tsv(std::ostream &out, const EvalReport &r) {
  out << "type\tsamples\tw_acc\ts_acc_top1\ts_acc_topk\tk\n";
  auto row = [&](std::string_view name, const TypeScore &t) {
    out << name << '\t' << t.samples << '\t' << t.word_acc() << '\t' << t.sentence_acc_top1()
        << '\t' << t.sentence_acc_topk() << '\t' << r.k << '\n';
  };
  for (InputType type : kInputTypes)
    if (r.at(type).samples > 0)
      row(to_string(type), r.at(type));
  row("MIX", r.mix());
}

double oracle_word_accuracy(const std::vector<Sample> &samples,
                            const std::vector<CandidateList> &candidates, int k) {
  if (samples.size() != candidates.size())
    throw Error("sweep: sample and candidate counts differ");
  std::size_t matched = 0, total = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    total += samples[i].target.size();
    std::size_t best = 0;
    const std::size_t n = std::min(candidates[i].size(), static_cast<std::size_t>(k));
    for (std::size_t j = 0; j < n; ++j)
      best = std::max(best, matched_syllables(candidates[i][j], samples[i].target));
    matched += best;
  }
  return total == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(total);
}

SweepResult sweep_candidates(const std::vector<Sample> &samples,
                             const std::vector<CandidateList> &candidates, int k_max, double tau) {
  if (k_max < 2)
    throw Error("sweep needs K_max >= 2");
  SweepResult r;
  r.tau = tau;
  for (int k = 1; k <= k_max; ++k)
    r.curve.emplace_back(k, oracle_word_accuracy(samples, candidates, k));
  r.chosen_k = k_max;
  r.converged = false;
  for (std::size_t i = 1; i < r.curve.size(); ++i)
    if (r.curve[i].second - r.curve[i - 1].second < tau) {
      r.chosen_k = r.curve[i].first;
      r.converged = true;
      break;
    }
  return r;
}

SweepResult sweep_k(const nmt::Model &model, const std::vector<Sample> &dev, int k_max,
                    double tau, int workers) {
  if (k_max < 2)
    throw Error("sweep needs K_max >= 2");
  return sweep_candidates(dev, decode_corpus(model, dev, k_max, workers), k_max, tau);
}

void write_sweep_tsv(std::ostream &out, const SweepResult &sweep) {
  out << "K\tw_acc\n";
  for (const auto &[k, acc] : sweep.curve)
    out << k << '\t' << acc << '\n';
}

} // namespace ptc
