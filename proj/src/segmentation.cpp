// SPDX-License-Identifier: Apache-2.0
#include <ptc/error.hpp>
#include <ptc/lexicon.hpp>
#include <ptc/segmentation.hpp>

#include <algorithm>
#include <limits>
#include <numeric>

namespace ptc {

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({sub, up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[b.size()];
}

int calc_score(const std::vector<std::string> &segments,
               const std::vector<std::string> &syllables) {
  if (segments.size() != syllables.size())
    throw Error("calc_score: " + std::to_string(segments.size()) + " segments for " +
                std::to_string(syllables.size()) + " syllables");
  int score = 0;
  for (std::size_t n = 0; n < segments.size(); ++n)
    score -= static_cast<int>(edit_distance(segments[n], syllables[n]));
  return score;
}

std::size_t Segmentation::segment_of(std::size_t i) const {
  auto it = std::upper_bound(starts.begin(), starts.end(), i);
  return static_cast<std::size_t>(it - starts.begin()) - 1;
}

std::vector<std::string> Segmentation::segments(std::string_view input) const {
  std::vector<std::string> out;
  out.reserve(size());
  for (std::size_t j = 0; j < size(); ++j)
    out.emplace_back(input.substr(begin_of(j), length_of(j)));
  return out;
}

std::vector<std::vector<unsigned char>> Segmentation::indicator() const {
  std::vector<std::vector<unsigned char>> a(input_length,
                                            std::vector<unsigned char>(size(), 0));
  for (std::size_t i = 0; i < input_length; ++i)
    a[i][segment_of(i)] = 1;
  return a;
}

namespace {

class Segmenter {
public:
  Segmenter(std::string_view input, const std::vector<std::string> &syllables)
    : input_(input), syllables_(syllables),
      cost_(syllables.size(),
            std::vector<std::vector<int>>(input.size() + 1,
                                          std::vector<int>(input.size() + 1, -1))) {}

  Segmentation run() {
    cuts_.assign(1, 0);
    best_score_ = std::numeric_limits<int>::min();
    segment(0, 0);
    Segmentation seg;
    seg.input_length = input_.size();
    seg.starts = best_starts_;
    seg.score = best_score_;
    return seg;
  }

private:
  int cost(std::size_t j, std::size_t begin, std::size_t end) {
    int &c = cost_[j][begin][end];
    if (c < 0)
      c = static_cast<int>(edit_distance(input_.substr(begin, end - begin), syllables_[j]));
    return c;
  }

  // Places the segment for syllable `j` starting at `begin`; `partial` is
  // the score accumulated by the segments before it.
  void segment(std::size_t begin, int partial) {
    const std::size_t j = cuts_.size() - 1;
    const std::size_t remaining = syllables_.size() - 1 - j;
    if (remaining == 0) {
      int score = partial - cost(j, begin, input_.size());
      if (score > best_score_) {
        best_score_ = score;
        best_starts_ = cuts_;
      }
      return;
    }
    // Leave at least one letter for every later segment.
    const std::size_t last_end = std::min(begin + kMaxSyllableLength, input_.size() - remaining);
    for (std::size_t end = begin + 1; end <= last_end; ++end) {
      int next = partial - cost(j, begin, end);
      // Scores only decrease, so a prefix already at or below the best
      // cannot produce a strictly better candidate.
      if (best_score_ != std::numeric_limits<int>::min() && next <= best_score_)
        continue;
      cuts_.push_back(end);
      segment(end, next);
      cuts_.pop_back();
    }
  }

  std::string_view input_;
  const std::vector<std::string> &syllables_;
  std::vector<std::vector<std::vector<int>>> cost_;
  std::vector<std::size_t> cuts_;
  std::vector<std::size_t> best_starts_;
  int best_score_ = 0;
};

} // namespace

Segmentation gen_segmentation(std::string_view input,
                              const std::vector<std::string> &syllables) {
  if (syllables.empty())
    throw Error("gen_segmentation: no target syllables");
  if (syllables.size() > input.size())
    throw Error("gen_segmentation: " + std::to_string(input.size()) +
                " letters cannot cover " + std::to_string(syllables.size()) + " syllables");
  return Segmenter(input, syllables).run();
}

} // namespace ptc
