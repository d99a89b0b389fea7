// SPDX-License-Identifier: Apache-2.0
#include <ptc/error.hpp>
#include <ptc/nmt/beam_search.hpp>

#include <algorithm>
#include <numeric>

namespace ptc::nmt {

namespace {

struct Candidate {
  double score;
  int parent;
  int token;
};

bool better(const Candidate &a, const Candidate &b) {
  if (a.score != b.score)
    return a.score > b.score;
  if (a.parent != b.parent)
    return a.parent < b.parent;
  return a.token < b.token;
}

bool by_score(const Hypothesis &a, const Hypothesis &b) { return a.log_prob > b.log_prob; }

} // namespace

std::vector<Hypothesis> beam_search(const Parameters &params, std::span<const int> source,
                                    int beam, int max_length) {
  if (beam < 1)
    throw Error("beam size must be at least 1");
  if (max_length < 1)
    throw Error("max decode length must be at least 1");
  const EncoderStates enc = encode(params, source);
  const int eos = start_token(params);
  const Eigen::Index V = params.tgt_embed.cols();

  std::vector<Hypothesis> live(1);
  live[0].hidden = initial_state(params, enc);
  std::vector<Hypothesis> done;

  for (int step = 0; step < max_length && !live.empty(); ++step) {
    Eigen::MatrixXd states(live[0].hidden.size(), static_cast<Eigen::Index>(live.size()));
    std::vector<int> prev(live.size());
    for (std::size_t k = 0; k < live.size(); ++k) {
      states.col(static_cast<Eigen::Index>(k)) = live[k].hidden;
      prev[k] = live[k].tokens.empty() ? eos : live[k].tokens.back();
    }
    const StepBatch out = decode_steps(params, states, prev, enc);

    std::vector<Candidate> cands;
    cands.reserve(live.size() * static_cast<std::size_t>(V));
    for (std::size_t k = 0; k < live.size(); ++k)
      for (Eigen::Index v = 0; v < V; ++v)
        cands.push_back({live[k].log_prob + out.log_probs(v, static_cast<Eigen::Index>(k)),
                         static_cast<int>(k), static_cast<int>(v)});
    const std::size_t keep = std::min(cands.size(), static_cast<std::size_t>(2 * beam));
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep),
                      cands.end(), better);

    std::vector<Hypothesis> next;
    for (std::size_t j = 0; j < keep && next.size() < static_cast<std::size_t>(beam); ++j) {
      const Candidate &c = cands[j];
      Hypothesis h;
      h.tokens = live[c.parent].tokens;
      h.tokens.push_back(c.token);
      h.log_prob = c.score;
      h.hidden = out.hidden.col(c.parent);
      if (c.token == eos) {
        // Only end-marker extensions ranked inside the top K are kept.
        if (j < static_cast<std::size_t>(beam)) {
          h.finished = true;
          done.push_back(std::move(h));
        }
        continue;
      }
      next.push_back(std::move(h));
    }
    live = std::move(next);

    if (done.size() >= static_cast<std::size_t>(beam) && !live.empty()) {
      std::stable_sort(done.begin(), done.end(), by_score);
      // Log-probabilities only decrease, so no live prefix can overtake.
      if (live.front().log_prob <= done[static_cast<std::size_t>(beam) - 1].log_prob)
        live.clear();
    }
  }

  for (auto &h : live)
    done.push_back(std::move(h));
  std::stable_sort(done.begin(), done.end(), by_score);
  if (done.size() > static_cast<std::size_t>(beam))
    done.resize(static_cast<std::size_t>(beam));
  return done;
}

Hypothesis greedy_decode(const Parameters &params, std::span<const int> source, int max_length) {
  const EncoderStates enc = encode(params, source);
  const int eos = start_token(params);
  Hypothesis h;
  h.hidden = initial_state(params, enc);
  std::vector<int> prev{eos};
  for (int step = 0; step < max_length; ++step) {
    const StepBatch s = decode_steps(params, h.hidden, prev, enc);
    Eigen::Index best = 0;
    for (Eigen::Index v = 1; v < s.log_probs.rows(); ++v)
      if (s.log_probs(v, 0) > s.log_probs(best, 0))
        best = v;
    h.log_prob += s.log_probs(best, 0);
    h.hidden = s.hidden.col(0);
    prev[0] = static_cast<int>(best);
    h.tokens.push_back(prev[0]);
    if (prev[0] == eos) {
      h.finished = true;
      break;
    }
  }
  return h;
}

} // namespace ptc::nmt
