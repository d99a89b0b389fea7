// SPDX-License-Identifier: Apache-2.0
#include <ptc/error.hpp>
#include <ptc/lexicon.hpp>
#include <ptc/transition.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ptc {

namespace {

std::vector<std::string> split_tabs(const std::string &line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos)
      break;
    start = pos + 1;
  }
  return fields;
}

bool single_letter(const std::string &s) { return s.size() == 1 && s[0] >= 'a' && s[0] <= 'z'; }

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

} // namespace

KeystrokeLog load_keystroke_log(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open keystroke log " + path.string());
  KeystrokeLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2 || !single_letter(fields[0]) || !single_letter(fields[1]))
      throw ParseError(path.string(), line_no, "expected 'intended<TAB>typed' letters");
    log.push_back({fields[0][0], fields[1][0]});
  }
  return log;
}

void save_keystroke_log(const KeystrokeLog &log, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out)
    throw Error("cannot write keystroke log " + path.string());
  for (const auto &k : log)
    out << k.intended << '\t' << k.typed << '\n';
}

TransitionModel::TransitionModel() {
  for (int i = 0; i < kLetters; ++i)
    p_[i][i] = 1.0;
}

TransitionModel::TransitionModel(const Matrix &p) : p_(p) {
  for (int i = 0; i < kLetters; ++i)
    for (int j = 0; j < kLetters; ++j)
      if (!(p_[i][j] >= 0.0 && p_[i][j] <= 1.0))
        throw Error("transition probability out of [0,1] at row " +
                    std::string(1, letter_at(i)));
}

std::uint64_t TransitionModel::total(int intended) const {
  if (counts_.empty())
    return 0;
  std::uint64_t n = 0;
  for (int j = 0; j < kLetters; ++j)
    n += counts_[static_cast<std::size_t>(intended * kLetters + j)];
  return n;
}

double TransitionModel::max_row_deviation() const {
  double worst = 0.0;
  for (const auto &row : p_) {
    double sum = 0.0;
    for (double v : row)
      sum += v;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

TransitionModel estimate_transitions(const KeystrokeLog &log, double smoothing) {
  if (smoothing < 0.0)
    throw Error("smoothing must be non-negative");
  TransitionModel model;
  model.counts_.assign(kLetters * kLetters, 0);
  for (const auto &k : log) {
    if (!is_letter(k.intended) || !is_letter(k.typed))
      throw Error("keystroke outside a-z");
    ++model.counts_[static_cast<std::size_t>(letter_index(k.intended) * kLetters +
                                             letter_index(k.typed))];
  }
  for (int i = 0; i < kLetters; ++i) {
    auto &row = model.p_[i];
    row.fill(0.0);
    const std::uint64_t n = model.total(i);
    if (n == 0) {
      row[i] = 1.0;
      continue;
    }
    const double denom = static_cast<double>(n) + smoothing * (kLetters - 1);
    double off = 0.0;
    for (int j = 0; j < kLetters; ++j) {
      if (j == i)
        continue;
      row[j] = (static_cast<double>(model.counts_[i * kLetters + j]) + smoothing) / denom;
      off += row[j];
    }
    row[i] = 1.0 - off;
  }
  return model;
}

void save_transition_model(const TransitionModel &model, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out)
    throw Error("cannot write transition model " + path.string());
  out << "ptmodel v1\n";
  for (const auto &row : model.matrix()) {
    for (int j = 0; j < kLetters; ++j)
      out << (j ? " " : "") << format_double(row[j]);
    out << '\n';
  }
}

TransitionModel load_transition_model(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open transition model " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "ptmodel v1")
    throw ParseError(path.string(), 1, "expected header 'ptmodel v1'");
  TransitionModel::Matrix p{};
  for (int i = 0; i < kLetters; ++i) {
    const std::size_t line_no = static_cast<std::size_t>(i) + 2;
    if (!std::getline(in, line))
      throw ParseError(path.string(), line_no, "missing row");
    std::istringstream fields(line);
    std::string tok;
    int j = 0;
    while (fields >> tok) {
      if (j >= kLetters)
        throw ParseError(path.string(), line_no, "more than 26 values");
      double v = 0.0;
      auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || v < 0.0 || v > 1.0)
        throw ParseError(path.string(), line_no, "bad probability '" + tok + "'");
      p[i][j++] = v;
    }
    if (j != kLetters)
      throw ParseError(path.string(), line_no, "expected 26 values");
  }
  while (std::getline(in, line))
    if (!line.empty())
      throw Error(path.string() + ": trailing data after 26 rows");
  return TransitionModel(p);
}

const NeighborTable &qwerty_neighbors() {
  static const NeighborTable table = {
    "qwsz", "vngh", "xvdf", "sferxc", "wrsd", "dgrtcv", "fhtyvb", "gjyubn", "uojk",
    "hkuinm", "jliom", "kop", "njk", "bmhj", "ipkl", "ol", "wa", "etdf",
    "adwezx", "ryfg", "yihj", "cbfg", "qeas", "zcsd", "tugh", "asx"};
  return table;
}

NeighborTable load_neighbor_table(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open neighbor table " + path.string());
  NeighborTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line.front() == '#')
      continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2 || !single_letter(fields[0]) || fields[1].empty())
      throw ParseError(path.string(), line_no, "expected 'letter<TAB>neighbors'");
    for (char c : fields[1])
      if (c < 'a' || c > 'z' || c == fields[0][0])
        throw ParseError(path.string(), line_no, "bad neighbor '" + std::string(1, c) + "'");
    table[letter_index(fields[0][0])] = fields[1];
  }
  for (int i = 0; i < kLetters; ++i)
    if (table[i].empty())
      throw Error(path.string() + ": letter '" + std::string(1, letter_at(i)) +
                  "' has no neighbors");
  return table;
}

} // namespace ptc
