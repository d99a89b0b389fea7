// SPDX-License-Identifier: Apache-2.0
#include <ptc/error.hpp>
#include <ptc/lexicon.hpp>

#include <algorithm>
#include <fstream>

namespace ptc {

bool is_letter_string(std::string_view s) {
  return std::all_of(s.begin(), s.end(), is_letter);
}

std::vector<int> encode_source(std::string_view raw) {
  std::vector<int> ids;
  ids.reserve(raw.size() + 1);
  for (char c : raw) {
    if (!is_letter(c))
      throw Error("illegal source character '" + std::string(1, c) + "'");
    ids.push_back(c - 'a');
  }
  ids.push_back(kSourceEnd);
  return ids;
}

std::string_view source_token(int id) {
  static constexpr std::string_view letters = "abcdefghijklmnopqrstuvwxyz";
  if (id >= 0 && id < 26)
    return letters.substr(static_cast<std::size_t>(id), 1);
  if (id == kSourceEnd)
    return kEndToken;
  throw Error("source id out of range: " + std::to_string(id));
}

char acronym_of(std::string_view syllable) {
  if (syllable.empty())
    throw Error("acronym of an empty syllable");
  return syllable.front();
}

std::optional<std::string> syllable_problem(std::string_view s) {
  if (s.empty())
    return "empty syllable";
  if (!is_letter_string(s))
    return "syllable '" + std::string(s) + "' has characters outside a-z";
  if (s.size() > kMaxSyllableLength)
    return "syllable '" + std::string(s) + "' is longer than " +
           std::to_string(kMaxSyllableLength) + " letters";
  return std::nullopt;
}

Lexicon Lexicon::from_syllables(std::vector<std::string> syllables) {
  for (const auto &s : syllables)
    if (auto problem = syllable_problem(s))
      throw Error(*problem);
  std::sort(syllables.begin(), syllables.end());
  syllables.erase(std::unique(syllables.begin(), syllables.end()), syllables.end());

  Lexicon lex;
  lex.syllables_ = std::move(syllables);
  for (std::size_t i = 0; i < lex.syllables_.size(); ++i)
    lex.index_.emplace(lex.syllables_[i], static_cast<int>(i));
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open lexicon " + path.string());
  std::vector<std::string> syllables;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line.front() == '#')
      continue;
    if (auto problem = syllable_problem(line))
      throw ParseError(path.string(), line_no, *problem);
    syllables.push_back(line);
  }
  return from_syllables(std::move(syllables));
}

bool Lexicon::contains(std::string_view s) const {
  return index_.find(std::string(s)) != index_.end();
}

int Lexicon::target_id(std::string_view token) const {
  if (token == kEndToken)
    return end_token();
  auto it = index_.find(std::string(token));
  return it == index_.end() ? unknown_token() : it->second;
}

std::string_view Lexicon::target_token(int id) const {
  if (id >= 0 && id < static_cast<int>(syllables_.size()))
    return syllables_[static_cast<std::size_t>(id)];
  if (id == end_token())
    return kEndToken;
  if (id == unknown_token())
    return kUnknownToken;
  throw Error("target id out of range: " + std::to_string(id));
}

std::vector<int> Lexicon::encode_target(const std::vector<std::string> &syllables) const {
  std::vector<int> ids;
  ids.reserve(syllables.size() + 1);
  for (const auto &s : syllables)
    ids.push_back(target_id(s));
  ids.push_back(end_token());
  return ids;
}

std::vector<std::string> Lexicon::decode_target(const std::vector<int> &ids) const {
  std::vector<std::string> out;
  for (int id : ids) {
    if (id == end_token())
      break;
    out.emplace_back(target_token(id));
  }
  return out;
}

} // namespace ptc
