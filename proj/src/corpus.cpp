// SPDX-License-Identifier: Apache-2.0
#include <ptc/corpus.hpp>
#include <ptc/error.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

namespace ptc {

std::string_view to_string(InputType t) {
  switch (t) {
  case InputType::CP: return "CP";
  case InputType::LAP: return "LAP";
  case InputType::GAP: return "GAP";
  case InputType::MP: return "MP";
  }
  return "?";
}

InputType parse_input_type(std::string_view s) {
  for (auto t : kInputTypes)
    if (to_string(t) == s)
      return t;
  throw Error("unknown input type '" + std::string(s) + "'");
}

std::string concat(const std::vector<std::string> &syllables) {
  std::string out;
  for (const auto &s : syllables)
    out += s;
  return out;
}

std::string acronym_string(const std::vector<std::string> &syllables) {
  std::string out;
  for (const auto &s : syllables)
    out += acronym_of(s);
  return out;
}

InputType classify_input_type(std::string_view input, const std::vector<std::string> &syllables) {
  if (input == concat(syllables))
    return InputType::CP;
  if (input == acronym_string(syllables))
    return InputType::GAP;

  // reach[pos] holds the set of {abbreviated, full} flag combinations with
  // which the first j syllables can cover input[0, pos).
  constexpr unsigned kAbbrev = 1, kFull = 2;
  std::vector<unsigned> reach(input.size() + 1, 0);
  reach[0] = 1u << 0;
  for (const auto &s : syllables) {
    std::vector<unsigned> next(input.size() + 1, 0);
    for (std::size_t pos = 0; pos < input.size(); ++pos) {
      if (!reach[pos])
        continue;
      for (unsigned flags = 0; flags < 4; ++flags) {
        if (!(reach[pos] & (1u << flags)))
          continue;
        if (input.substr(pos, s.size()) == s)
          next[pos + s.size()] |= 1u << (flags | kFull);
        if (s.size() > 1 && input[pos] == s.front())
          next[pos + 1] |= 1u << (flags | kAbbrev);
      }
    }
    reach = std::move(next);
  }
  if (reach[input.size()] & (1u << (kAbbrev | kFull)))
    return InputType::LAP;
  return InputType::MP;
}

NoiseSpec NoiseSpec::with_error_rate(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw Error("error rate must lie in [0, 1)");
  NoiseSpec spec;
  spec.error_rates.fill(epsilon);
  return spec;
}

void NoiseSpec::validate() {
  for (double r : error_rates)
    if (!(r >= 0.0 && r <= 1.0))
      throw Error("per-letter error rate outside [0, 1]");
  for (int i = 0; i < kLetters; ++i)
    if (neighbors[i].empty())
      throw Error("letter '" + std::string(1, letter_at(i)) + "' has no neighbors");
  double total = 0.0;
  for (double w : type_mix) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw Error("type mix weights must be non-negative");
    total += w;
  }
  if (total <= 0.0)
    throw Error("type mix must have positive mass");
  for (double &w : type_mix)
    w /= total;
  if (!(acronym_rate >= 0.0 && acronym_rate <= 1.0))
    throw Error("acronym rate outside [0, 1]");
  if (type_mix[static_cast<int>(InputType::LAP)] > 0.0 &&
      (acronym_rate <= 0.0 || acronym_rate >= 1.0))
    throw Error("LAP samples need an acronym rate strictly between 0 and 1");
  if (type_mix[static_cast<int>(InputType::MP)] > 0.0 &&
      std::all_of(error_rates.begin(), error_rates.end(), [](double r) { return r == 0.0; }))
    throw Error("MP samples need a positive error rate");
}

TransitionModel NoiseSpec::transition_model() const {
  TransitionModel::Matrix p{};
  for (int i = 0; i < kLetters; ++i) {
    const auto &nb = neighbors[i];
    p[i][i] = 1.0 - error_rates[i];
    for (char c : nb)
      p[i][letter_index(c)] += error_rates[i] / static_cast<double>(nb.size());
  }
  return TransitionModel(p);
}

namespace {

char draw_typed(char intended, const NoiseSpec &spec, const TransitionModel &pt,
                std::mt19937_64 &rng) {
  const int i = letter_index(intended);
  std::bernoulli_distribution slip(spec.error_rates[i]);
  if (!slip(rng))
    return intended;
  const auto &nb = spec.neighbors[i];
  std::vector<double> weights;
  weights.reserve(nb.size());
  for (char c : nb)
    weights.push_back(pt(i, letter_index(c)));
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  return nb[pick(rng)];
}

std::size_t multi_letter_count(const std::vector<std::string> &syllables) {
  return static_cast<std::size_t>(std::count_if(
    syllables.begin(), syllables.end(), [](const std::string &s) { return s.size() > 1; }));
}

} // namespace

std::string corrupt_sentence(const std::vector<std::string> &syllables, InputType type,
                             const NoiseSpec &spec, std::mt19937_64 &rng, KeystrokeLog *log) {
  if (syllables.empty())
    throw Error("cannot corrupt an empty sentence");
  for (const auto &s : syllables)
    if (s.empty() || !is_letter_string(s))
      throw Error("bad syllable '" + s + "'");

  if (type == InputType::LAP && multi_letter_count(syllables) < 2)
    type = InputType::GAP;

  switch (type) {
  case InputType::CP:
    return concat(syllables);
  case InputType::GAP:
    return acronym_string(syllables);
  case InputType::LAP: {
    if (!(spec.acronym_rate > 0.0 && spec.acronym_rate < 1.0))
      throw Error("LAP corruption needs an acronym rate strictly between 0 and 1");
    std::bernoulli_distribution abbreviate(spec.acronym_rate);
    std::vector<bool> cut(syllables.size());
    while (true) {
      std::size_t cut_multi = 0, kept_multi = 0;
      for (std::size_t n = 0; n < syllables.size(); ++n) {
        cut[n] = abbreviate(rng);
        if (syllables[n].size() > 1)
          ++(cut[n] ? cut_multi : kept_multi);
      }
      if (cut_multi > 0 && kept_multi > 0)
        break;
    }
    std::string out;
    for (std::size_t n = 0; n < syllables.size(); ++n)
      out += cut[n] ? std::string(1, acronym_of(syllables[n])) : syllables[n];
    return out;
  }
  case InputType::MP: {
    const std::string clean = concat(syllables);
    if (std::all_of(clean.begin(), clean.end(),
                    [&](char c) { return spec.error_rates[letter_index(c)] == 0.0; }))
      throw Error("MP corruption impossible: every letter has zero error rate");
    const TransitionModel pt = spec.transition_model();
    while (true) {
      std::string typed = clean;
      bool changed = false;
      for (char &c : typed) {
        char t = draw_typed(c, spec, pt, rng);
        if (log)
          log->push_back({c, t});
        changed |= t != c;
        c = t;
      }
      if (changed)
        return typed;
    }
  }
  }
  throw Error("unknown input type");
}

namespace {

struct SentenceSampler {
  SentenceSampler(const Lexicon &lexicon, const CorpusOptions &options, std::uint64_t seed)
    : lexicon(lexicon), lengths(options.min_syllables, options.max_syllables) {
    // Zipf weights over a seeded ranking of the syllables.
    std::vector<std::size_t> rank(lexicon.size());
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    std::mt19937_64 perm_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::shuffle(rank.begin(), rank.end(), perm_rng);
    std::vector<double> weights(lexicon.size());
    for (std::size_t r = 0; r < rank.size(); ++r)
      weights[rank[r]] = 1.0 / std::pow(static_cast<double>(r + 1), options.zipf_exponent);
    syllable = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
  }

  std::vector<std::string> draw(std::mt19937_64 &rng) {
    std::vector<std::string> s(lengths(rng));
    for (auto &x : s)
      x = lexicon.syllables()[syllable(rng)];
    return s;
  }

  const Lexicon &lexicon;
  std::uniform_int_distribution<std::size_t> lengths;
  std::discrete_distribution<std::size_t> syllable;
};

bool supports(InputType type, const std::vector<std::string> &s) {
  switch (type) {
  case InputType::LAP: return multi_letter_count(s) >= 2;
  case InputType::GAP: return multi_letter_count(s) >= 1;
  default: return true;
  }
}

void generate_shard(const Lexicon &lexicon, const NoiseSpec &spec, const CorpusOptions &options,
                    std::size_t count, std::uint64_t seed, Corpus &out) {
  SentenceSampler sentences(lexicon, options, spec.seed);
  std::discrete_distribution<int> types(spec.type_mix.begin(), spec.type_mix.end());
  std::mt19937_64 rng(seed);
  out.samples.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    auto type = static_cast<InputType>(types(rng));
    auto target = sentences.draw(rng);
    // Resample sentences that cannot carry the drawn type so the type mix
    // survives; give up after a bounded number of tries.
    for (int tries = 0; !supports(type, target) && tries < 1000; ++tries)
      target = sentences.draw(rng);
    std::string source = corrupt_sentence(target, type, spec, rng, &out.keystrokes);
    Sample sample{std::move(source), std::move(target), InputType::CP};
    sample.type = classify_input_type(sample.source, sample.target);
    out.samples.push_back(std::move(sample));
  }
}

} // namespace

Corpus generate_corpus(const Lexicon &lexicon, std::size_t n, const NoiseSpec &spec_in,
                       const CorpusOptions &options) {
  if (lexicon.empty())
    throw Error("cannot generate a corpus from an empty lexicon");
  if (n == 0)
    throw Error("corpus size must be at least 1");
  if (options.min_syllables < 1 || options.max_syllables < options.min_syllables)
    throw Error("bad sentence length range");
  NoiseSpec spec = spec_in;
  spec.validate();

  const std::size_t shards = std::max<std::size_t>(1, options.shards);
  std::vector<Corpus> parts(shards);
  auto run = [&](std::size_t k) {
    std::size_t begin = n * k / shards, end = n * (k + 1) / shards;
    generate_shard(lexicon, spec, options, end - begin, spec.seed + k, parts[k]);
  };
  if (options.workers <= 1 || shards == 1) {
    for (std::size_t k = 0; k < shards; ++k)
      run(k);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(options.workers, shards); ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < shards; k += options.workers)
          run(k);
      });
    for (auto &t : pool)
      t.join();
  }

  Corpus corpus;
  for (auto &part : parts) {
    std::move(part.samples.begin(), part.samples.end(), std::back_inserter(corpus.samples));
    corpus.keystrokes.insert(corpus.keystrokes.end(), part.keystrokes.begin(),
                             part.keystrokes.end());
  }
  return corpus;
}

KeystrokeLog sample_keystrokes(const NoiseSpec &spec, std::size_t n, std::mt19937_64 &rng) {
  const TransitionModel pt = spec.transition_model();
  std::uniform_int_distribution<int> letter(0, kLetters - 1);
  KeystrokeLog log;
  log.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    char intended = letter_at(letter(rng));
    log.push_back({intended, draw_typed(intended, spec, pt, rng)});
  }
  return log;
}

void append_sample(std::ostream &out, const Sample &sample) {
  out << sample.source << '\t';
  for (std::size_t n = 0; n < sample.target.size(); ++n)
    out << (n ? " " : "") << sample.target[n];
  out << '\t' << to_string(sample.type) << '\n';
}

void save_corpus(const std::vector<Sample> &samples, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out)
    throw Error("cannot write corpus " + path.string());
  for (const auto &s : samples)
    append_sample(out, s);
}

std::vector<Sample> load_corpus(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open corpus " + path.string());
  std::vector<Sample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, '\t');)
      fields.push_back(f);
    if (fields.size() != 3)
      throw ParseError(path.string(), line_no, "expected 3 tab-separated columns");
    Sample s;
    s.source = fields[0];
    if (s.source.empty() || !is_letter_string(s.source))
      throw ParseError(path.string(), line_no, "source must be letters a-z");
    std::istringstream syl(fields[1]);
    for (std::string w; syl >> w;) {
      if (!is_letter_string(w))
        throw ParseError(path.string(), line_no, "bad target syllable '" + w + "'");
      s.target.push_back(w);
    }
    if (s.target.empty())
      throw ParseError(path.string(), line_no, "empty target");
    try {
      s.type = parse_input_type(fields[2]);
    } catch (const Error &e) {
      throw ParseError(path.string(), line_no, e.what());
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

} // namespace ptc
