// SPDX-License-Identifier: Apache-2.0
#include <ptc/cli/run_config.hpp>
#include <ptc/error.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#ifndef PTC_DATA_DIR
#define PTC_DATA_DIR "data"
#endif

namespace ptc::cli {

const std::vector<KeySpec> &config_keys() {
  static const std::vector<KeySpec> keys = {
    {"seed", "1", "seed for data generation, initialization and batch order"},
    {"workers", "1", "threads for data generation, training and decoding"},
    // model
    {"embed_dim", "256", "embedding size"},
    {"hidden_dim", "128", "GRU state size"},
    {"attention_dim", "128", "hidden size of the attention scorer"},
    {"max_decode_length", "16", "decoder step limit"},
    {"init_range", "0.08", "uniform initialization range"},
    // training
    {"optimizer", "adam", "adam or sgd"},
    {"learning_rate", "0.001", "step size"},
    {"batch_size", "64", "samples per update"},
    {"iterations", "1000", "number of updates"},
    {"lambda", "1", "weight of the attention supervision term"},
    {"clip_norm", "5", "global gradient norm limit, 0 disables"},
    {"eval_every", "0", "dev evaluation cadence in iterations, 0 disables"},
    {"checkpoint_every", "0", "checkpoint cadence in iterations, 0 keeps only the last"},
    {"log", "train_log.tsv", "training log"},
    // noise and data
    {"error_rate", "0.08", "probability of hitting a neighboring key"},
    {"acronym_rate", "0.5", "share of syllables abbreviated in local acronyms"},
    {"type_mix", "41.58,34.74,17.98,5.70", "weights of CP,LAP,GAP,MP"},
    {"neighbors", "", "keyboard adjacency TSV, empty for the built-in QWERTY table"},
    {"samples", "10000", "sentences generated by gen-data"},
    {"min_syllables", "1", "shortest generated sentence"},
    {"max_syllables", "6", "longest generated sentence"},
    {"zipf_exponent", "1", "skew of syllable frequencies"},
    {"split", "85,5,10", "train,dev,test percentages"},
    {"keystrokes", "100000", "extra uniformly drawn keystrokes appended to the log"},
    {"smoothing", "0", "pseudo-count for estimate-pt"},
    // paths
    {"lexicon", PTC_DATA_DIR "/pinyin_syllables.txt", "syllable list"},
    {"out_dir", "corpus", "gen-data output directory"},
    {"train_corpus", "corpus/train.tsv", "training TSV"},
    {"dev_corpus", "corpus/dev.tsv", "development TSV"},
    {"test_corpus", "corpus/test.tsv", "evaluation TSV"},
    {"pt", "corpus/ptmodel", "transition model used for supervision"},
    {"keystroke_log", "corpus/keystrokes.tsv", "keystroke log read by estimate-pt"},
    {"checkpoint", "model.ckpt", "model file"},
    {"output", "ptmodel.estimated", "estimate-pt output"},
    {"input", "", "correct input file, empty reads standard input"},
    {"transcript", "", "repl transcript in corpus format, empty disables"},
    {"report_tsv", "", "eval report TSV, empty disables"},
    {"sweep_tsv", "", "K sweep TSV, empty disables"},
    // decoding and evaluation
    {"k", "10", "beam size / candidates shown"},
    {"k_max", "10", "largest K of the sweep"},
    {"tau", "0.005", "sweep stopping threshold on W-Acc gain"},
    {"sweep", "false", "eval also runs the K sweep on the dev corpus"},
    {"gradcheck_coordinates", "200", "coordinates sampled by gradcheck"},
    {"gradcheck_step", "1e-5", "central difference step"},
  };
  return keys;
}

namespace {

std::string join(const std::vector<std::string> &lines) {
  std::string out;
  for (const auto &l : lines)
    out += (out.empty() ? "" : "\n") + l;
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

} // namespace

ConfigError::ConfigError(const std::vector<std::string> &problems)
  : Error(join(problems)), problems_(problems) {}

RunConfig::RunConfig() {
  for (const auto &k : config_keys())
    values_.emplace(std::string(k.name), std::string(k.default_value));
}

void RunConfig::set(std::string_view key, std::string value) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    problems_.push_back("unknown key '" + std::string(key) + "'");
    return;
  }
  it->second = std::move(value);
}

void RunConfig::load_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    problems_.push_back("cannot read config file " + path.string());
    return;
  }
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const std::string body = trim(line);
    if (body.empty())
      continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      problems_.push_back(path.string() + ":" + std::to_string(n) + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(body.substr(0, eq));
    if (values_.find(key) == values_.end()) {
      problems_.push_back(path.string() + ":" + std::to_string(n) + ": unknown key '" + key + "'");
      continue;
    }
    values_[key] = trim(body.substr(eq + 1));
  }
}

const std::string &RunConfig::raw(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw Error("no config key '" + std::string(key) + "'");
  return it->second;
}

namespace {

class Reader {
public:
  explicit Reader(const RunConfig &c) : c_(c), problems_(c.problems()) {}

  template <typename T> T number(std::string_view key, T lo, T hi) {
    const std::string &s = c_.raw(key);
    T v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      bad(key, s, "not a number");
      return v;
    }
    if (!(v >= lo && v <= hi)) {
      std::ostringstream range;
      range << "must lie in [" << lo << ", " << hi << "]";
      bad(key, s, range.str());
    }
    return v;
  }

  bool boolean(std::string_view key) {
    const std::string &s = c_.raw(key);
    if (s == "true" || s == "1" || s == "yes")
      return true;
    if (s == "false" || s == "0" || s == "no")
      return false;
    bad(key, s, "expected true or false");
    return false;
  }

  template <std::size_t N> std::array<double, N> list(std::string_view key) {
    std::array<double, N> out{};
    std::stringstream ss(c_.raw(key));
    std::string item;
    std::size_t n = 0;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      double v = 0.0;
      auto res = std::from_chars(item.data(), item.data() + item.size(), v);
      if (res.ec != std::errc() || res.ptr != item.data() + item.size() || v < 0.0 || n >= N) {
        bad(key, c_.raw(key), "expected " + std::to_string(N) + " non-negative numbers");
        return out;
      }
      out[n++] = v;
    }
    if (n != N)
      bad(key, c_.raw(key), "expected " + std::to_string(N) + " non-negative numbers");
    return out;
  }

  std::string text(std::string_view key) { return c_.raw(key); }

  void bad(std::string_view key, std::string_view value, std::string_view why) {
    problems_.push_back(std::string(key) + " = '" + std::string(value) + "': " + std::string(why));
  }

  std::vector<std::string> &problems() { return problems_; }

private:
  const RunConfig &c_;
  std::vector<std::string> problems_;
};

} // namespace

Settings resolve(const RunConfig &config) {
  Reader r(config);
  Settings s;
  constexpr int kIntMax = 1 << 30;
  s.seed = r.number<std::uint64_t>("seed", 0, ~std::uint64_t{0});
  s.workers = r.number<int>("workers", 1, 1024);

  s.model.embed_dim = r.number<int>("embed_dim", 1, kIntMax);
  s.model.hidden_dim = r.number<int>("hidden_dim", 1, kIntMax);
  s.model.attention_dim = r.number<int>("attention_dim", 1, kIntMax);
  s.model.max_decode_length = r.number<int>("max_decode_length", 1, kIntMax);
  s.model.init_range = r.number<double>("init_range", 0.0, 1e6);
  s.model.seed = s.seed;

  try {
    s.train.optimizer.kind = nmt::parse_optimizer(r.text("optimizer"));
  } catch (const Error &) {
    r.bad("optimizer", r.text("optimizer"), "expected adam or sgd");
  }
  s.train.optimizer.learning_rate = r.number<double>("learning_rate", 1e-300, 1e6);
  s.train.batch_size = r.number<int>("batch_size", 1, kIntMax);
  s.train.iterations = r.number<long>("iterations", 0, 1L << 40);
  s.train.lambda = r.number<double>("lambda", 0.0, 1e12);
  s.train.clip_norm = r.number<double>("clip_norm", 0.0, 1e300);
  s.train.eval_every = r.number<long>("eval_every", 0, 1L << 40);
  s.train.checkpoint_every = r.number<long>("checkpoint_every", 0, 1L << 40);
  s.train.log_path = r.text("log");
  s.train.workers = s.workers;
  s.train.seed = s.seed;

  s.error_rate = r.number<double>("error_rate", 0.0, 0.999999);
  s.acronym_rate = r.number<double>("acronym_rate", 0.0, 1.0);
  s.type_mix = r.list<4>("type_mix");
  if (s.type_mix[0] + s.type_mix[1] + s.type_mix[2] + s.type_mix[3] <= 0.0)
    r.bad("type_mix", r.text("type_mix"), "needs positive total weight");
  s.neighbors = r.text("neighbors");
  s.samples = r.number<std::size_t>("samples", 1, std::size_t{1} << 40);
  s.min_syllables = r.number<std::size_t>("min_syllables", 1, 64);
  s.max_syllables = r.number<std::size_t>("max_syllables", 1, 64);
  if (s.max_syllables < s.min_syllables)
    r.bad("max_syllables", r.text("max_syllables"), "smaller than min_syllables");
  s.zipf_exponent = r.number<double>("zipf_exponent", 0.0, 100.0);
  s.split = r.list<3>("split");
  if (s.split[0] <= 0.0)
    r.bad("split", r.text("split"), "training share must be positive");
  s.keystrokes = r.number<std::size_t>("keystrokes", 0, std::size_t{1} << 40);
  s.smoothing = r.number<double>("smoothing", 0.0, 1e12);

  s.lexicon = r.text("lexicon");
  s.out_dir = r.text("out_dir");
  s.train_corpus = r.text("train_corpus");
  s.dev_corpus = r.text("dev_corpus");
  s.test_corpus = r.text("test_corpus");
  s.pt = r.text("pt");
  s.keystroke_log = r.text("keystroke_log");
  s.checkpoint = r.text("checkpoint");
  s.train.checkpoint_path = s.checkpoint;
  s.output = r.text("output");
  s.input = r.text("input");
  s.transcript = r.text("transcript");
  s.report_tsv = r.text("report_tsv");
  s.sweep_tsv = r.text("sweep_tsv");

  s.k = r.number<int>("k", 1, 100000);
  s.k_max = r.number<int>("k_max", 2, 100000);
  s.tau = r.number<double>("tau", 0.0, 1.0);
  s.sweep = r.boolean("sweep");
  s.gradcheck_coordinates = r.number<int>("gradcheck_coordinates", 1, kIntMax);
  s.gradcheck_step = r.number<double>("gradcheck_step", 1e-300, 1.0);

  if (!r.problems().empty())
    throw ConfigError(r.problems());
  return s;
}

NoiseSpec Settings::noise() const {
  NoiseSpec spec = NoiseSpec::with_error_rate(error_rate);
  if (!neighbors.empty())
    spec.neighbors = load_neighbor_table(neighbors);
  spec.type_mix = type_mix;
  spec.acronym_rate = acronym_rate;
  spec.seed = seed;
  return spec;
}

} // namespace ptc::cli
