// SPDX-License-Identifier: Apache-2.0
#include <ptc/cli/commands.hpp>
#include <ptc/error.hpp>
#include <ptc/eval.hpp>
#include <ptc/nmt/gradcheck.hpp>

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <random>

namespace ptc::cli {

namespace fs = std::filesystem;

namespace {

void require_files(std::initializer_list<std::pair<std::string_view, const fs::path *>> files) {
  std::vector<std::string> problems;
  for (const auto &[key, path] : files) {
    if (path->empty())
      problems.push_back(std::string(key) + ": no path given");
    else if (!fs::is_regular_file(*path))
      problems.push_back(std::string(key) + " = '" + path->string() + "': file not found");
  }
  if (!problems.empty())
    throw ConfigError(problems);
}

void require_parent(std::string_view key, const fs::path &path) {
  if (path.empty())
    return;
  const fs::path parent = path.parent_path();
  if (!parent.empty() && !fs::is_directory(parent))
    throw ConfigError({std::string(key) + " = '" + path.string() + "': directory " +
                       parent.string() + " does not exist"});
}

void print_type_summary(std::ostream &out, std::string_view name, const std::vector<Sample> &s) {
  std::array<std::size_t, 4> counts{};
  for (const auto &x : s)
    ++counts[static_cast<std::size_t>(x.type)];
  out << std::left << std::setw(6) << name << std::right << std::setw(8) << s.size();
  for (InputType t : kInputTypes) {
    const double pct = s.empty() ? 0.0
                                 : 100.0 * static_cast<double>(counts[static_cast<std::size_t>(t)]) /
                                     static_cast<double>(s.size());
    out << "  " << to_string(t) << ' ' << std::fixed << std::setprecision(2) << std::setw(6) << pct
        << '%';
  }
  out << '\n';
  out.unsetf(std::ios::floatfield);
}

std::string join_syllables(const Syllables &s) {
  std::string out;
  for (const auto &x : s)
    out += (out.empty() ? "" : " ") + x;
  return out;
}

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

} // namespace

int cmd_gen_data(const Settings &s, Io io) {
  require_files({{"lexicon", &s.lexicon}});
  if (!s.neighbors.empty())
    require_files({{"neighbors", &s.neighbors}});
  const Lexicon lexicon = Lexicon::load(s.lexicon);
  NoiseSpec noise = s.noise();
  noise.validate();

  CorpusOptions options;
  options.min_syllables = s.min_syllables;
  options.max_syllables = s.max_syllables;
  options.zipf_exponent = s.zipf_exponent;
  options.shards = static_cast<std::size_t>(s.workers);
  options.workers = static_cast<std::size_t>(s.workers);
  Corpus corpus = generate_corpus(lexicon, s.samples, noise, options);

  const double total = s.split[0] + s.split[1] + s.split[2];
  const std::size_t n = corpus.samples.size();
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * s.split[0] / total));
  const auto n_dev = std::min(n - n_train, static_cast<std::size_t>(std::llround(
                                             static_cast<double>(n) * s.split[1] / total)));
  const auto begin = corpus.samples.begin();
  const std::vector<Sample> train(begin, begin + static_cast<std::ptrdiff_t>(n_train));
  const std::vector<Sample> dev(begin + static_cast<std::ptrdiff_t>(n_train),
                                begin + static_cast<std::ptrdiff_t>(n_train + n_dev));
  const std::vector<Sample> test(begin + static_cast<std::ptrdiff_t>(n_train + n_dev),
                                 corpus.samples.end());

  std::error_code ec;
  fs::create_directories(s.out_dir, ec);
  if (ec || !fs::is_directory(s.out_dir))
    throw Error("cannot create output directory " + s.out_dir.string());
  save_corpus(train, s.out_dir / "train.tsv");
  save_corpus(dev, s.out_dir / "dev.tsv");
  save_corpus(test, s.out_dir / "test.tsv");
  save_transition_model(noise.transition_model(), s.out_dir / "ptmodel");

  KeystrokeLog log = std::move(corpus.keystrokes);
  std::mt19937_64 rng(s.seed ^ 0x6b657973ULL);
  const KeystrokeLog extra = sample_keystrokes(noise, s.keystrokes, rng);
  log.insert(log.end(), extra.begin(), extra.end());
  save_keystroke_log(log, s.out_dir / "keystrokes.tsv");

  io.out << "wrote " << n << " samples to " << s.out_dir.string() << " (" << train.size()
         << " train / " << dev.size() << " dev / " << test.size() << " test), "
         << log.size() << " keystrokes\n";
  print_type_summary(io.out, "all", corpus.samples);
  print_type_summary(io.out, "train", train);
  print_type_summary(io.out, "dev", dev);
  print_type_summary(io.out, "test", test);
  return kExitOk;
}

int cmd_estimate_pt(const Settings &s, Io io) {
  require_files({{"keystroke_log", &s.keystroke_log}});
  require_parent("output", s.output);
  const KeystrokeLog log = load_keystroke_log(s.keystroke_log);
  const TransitionModel model = estimate_transitions(log, s.smoothing);
  save_transition_model(model, s.output);
  int observed = 0;
  for (int i = 0; i < kLetters; ++i)
    observed += model.total(i) > 0;
  io.out << "estimated from " << log.size() << " keystrokes (" << observed
         << " letters observed), wrote " << s.output.string() << '\n';
  return kExitOk;
}

int cmd_train(const Settings &s, Io io) {
  require_files({{"lexicon", &s.lexicon}, {"train_corpus", &s.train_corpus}, {"pt", &s.pt}});
  if (s.train.eval_every > 0)
    require_files({{"dev_corpus", &s.dev_corpus}});
  require_parent("checkpoint", s.checkpoint);
  require_parent("log", s.train.log_path);

  const Lexicon lexicon = Lexicon::load(s.lexicon);
  const std::vector<Sample> corpus = load_corpus(s.train_corpus);
  const TransitionModel pt = load_transition_model(s.pt);
  std::vector<Sample> dev;
  if (s.train.eval_every > 0)
    dev = load_corpus(s.dev_corpus);

  const long every = std::max(1L, s.train.iterations / 20);
  nmt::TrainHooks hooks;
  hooks.on_iteration = [&](const nmt::TrainRecord &r) {
    if (r.iteration % every == 0 || r.iteration == s.train.iterations)
      io.out << "iter " << r.iteration << "  ce " << r.cross_entropy << "  att " << r.attention
             << "  total " << r.total << "  |g| " << r.grad_norm << std::endl;
  };
  hooks.on_eval = [&](long it, const nmt::Model &m) {
    const EvalReport rep = evaluate(m, dev, s.k, s.workers);
    const TypeScore mix = rep.mix();
    io.out << "iter " << it << "  dev W-Acc " << mix.word_acc() << "  S-Acc@1 "
           << mix.sentence_acc_top1() << "  S-Acc@" << s.k << ' ' << mix.sentence_acc_topk()
           << std::endl;
  };
  nmt::train(corpus, lexicon, pt, s.model, s.train, hooks);
  io.out << "wrote " << s.checkpoint.string() << " after " << s.train.iterations
         << " iterations\n";
  return kExitOk;
}

int cmd_eval(const Settings &s, Io io) {
  require_files({{"checkpoint", &s.checkpoint}, {"test_corpus", &s.test_corpus}});
  if (s.sweep)
    require_files({{"dev_corpus", &s.dev_corpus}});
  require_parent("report_tsv", s.report_tsv);
  require_parent("sweep_tsv", s.sweep_tsv);

  const nmt::Model model = nmt::load_checkpoint(s.checkpoint);
  const std::vector<Sample> test = load_corpus(s.test_corpus);
  const EvalReport report = evaluate(model, test, s.k, s.workers);
  print_report(io.out, report);
  if (!s.report_tsv.empty()) {
    std::ofstream tsv(s.report_tsv);
    write_report_tsv(tsv, report);
  }
  if (s.sweep) {
    const SweepResult sweep = sweep_k(model, load_corpus(s.dev_corpus), s.k_max, s.tau, s.workers);
    io.out << "K sweep (oracle-within-K W-Acc on dev):\n";
    write_sweep_tsv(io.out, sweep);
    io.out << "chosen K = " << sweep.chosen_k << " (tau " << sweep.tau << ")\n";
    if (!sweep.converged)
      io.err << "warning: no W-Acc gain fell below tau up to K = " << s.k_max << '\n';
    if (!s.sweep_tsv.empty()) {
      std::ofstream tsv(s.sweep_tsv);
      write_sweep_tsv(tsv, sweep);
    }
  }
  return kExitOk;
}

int cmd_correct(const Settings &s, Io io) {
  require_files({{"checkpoint", &s.checkpoint}});
  if (!s.input.empty())
    require_files({{"input", &s.input}});
  const nmt::Model model = nmt::load_checkpoint(s.checkpoint);
  std::ifstream file;
  if (!s.input.empty())
    file.open(s.input);
  std::istream &in = s.input.empty() ? io.in : file;

  bool failed = false;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const std::string input = trim(line);
    if (!is_letter_string(input)) {
      io.err << "line " << n << ": '" << input << "' contains characters outside a-z\n";
      failed = true;
      continue;
    }
    std::vector<double> scores;
    const CandidateList cands = correct(model, input, s.k, &scores);
    io.out << "# " << input << '\n';
    for (std::size_t r = 0; r < cands.size(); ++r)
      io.out << r + 1 << '\t' << scores[r] << '\t' << join_syllables(cands[r]) << '\n';
  }
  return failed ? kExitRuntime : kExitOk;
}

int cmd_repl(const Settings &s, Io io) {
  require_files({{"checkpoint", &s.checkpoint}});
  require_parent("transcript", s.transcript);
  const nmt::Model model = nmt::load_checkpoint(s.checkpoint);
  std::ofstream transcript;
  if (!s.transcript.empty()) {
    transcript.open(s.transcript, std::ios::app);
    if (!transcript)
      throw Error("cannot open transcript " + s.transcript.string());
  }

  std::string line;
  while (true) {
    io.out << "> " << std::flush;
    if (!std::getline(io.in, line))
      return kExitOk;
    const std::string input = trim(line);
    if (input == ":quit")
      return kExitOk;
    if (input.empty())
      continue;
    if (!is_letter_string(input)) {
      io.out << "only letters a-z are accepted\n";
      continue;
    }
    std::vector<double> scores;
    const CandidateList cands = correct(model, input, s.k, &scores);
    if (cands.empty()) {
      io.out << "no candidates\n";
      continue;
    }
    for (std::size_t r = 0; r < cands.size(); ++r)
      io.out << std::setw(3) << r + 1 << ". " << join_syllables(cands[r]) << "  (" << scores[r]
             << ")\n";
    while (true) {
      io.out << "select 1-" << cands.size() << "> " << std::flush;
      if (!std::getline(io.in, line))
        return kExitOk;
      const std::string pick = trim(line);
      if (pick == ":quit")
        return kExitOk;
      std::size_t choice = 0;
      auto res = std::from_chars(pick.data(), pick.data() + pick.size(), choice);
      if (res.ec != std::errc() || res.ptr != pick.data() + pick.size() || choice < 1 ||
          choice > cands.size()) {
        io.out << "enter a number between 1 and " << cands.size() << '\n';
        continue;
      }
      const Syllables &chosen = cands[choice - 1];
      io.out << join_syllables(chosen) << '\n';
      if (transcript) {
        Sample sample{input, chosen, classify_input_type(input, chosen)};
        append_sample(transcript, sample);
        transcript.flush();
      }
      break;
    }
  }
}

int cmd_gradcheck(const Settings &s, Io io) {
  nmt::GradcheckOptions o;
  o.lambda = s.train.lambda;
  o.seed = s.seed;
  o.coordinates = s.gradcheck_coordinates;
  o.step = s.gradcheck_step;
  const nmt::GradcheckResult r = nmt::run_gradcheck(o);
  io.out << "checked " << r.checks.size() << " coordinates over " << r.tensors_covered
         << " tensors (embed " << o.embed_dim << ", hidden " << o.hidden_dim << ", target vocab "
         << o.target_vocab_size << ", batch " << o.batch_size << ", lambda " << o.lambda << ")\n"
         << "max relative error " << std::scientific << r.max_relative_error << " at "
         << r.worst.tensor << '[' << r.worst.index << "] analytic " << r.worst.analytic
         << " numeric " << r.worst.numeric << '\n';
  io.out.unsetf(std::ios::floatfield);
  return r.max_relative_error < 1e-4 ? kExitOk : kExitRuntime;
}

int run(int argc, const char *const *argv, Io io) {
  CLI::App app{"Pinyin typo correction with supervised attention", "ptc"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file");
  std::map<std::string, std::string> flags;
  std::vector<std::pair<std::string, CLI::Option *>> options;
  for (const auto &key : config_keys()) {
    std::string name(key.name);
    options.emplace_back(name, app.add_option("--" + name, flags[name], std::string(key.help)));
  }

  using Command = int (*)(const Settings &, Io);
  const std::vector<std::tuple<const char *, const char *, Command>> commands = {
    {"gen-data", "generate train/dev/test corpora, ground-truth ptmodel and keystroke log",
     cmd_gen_data},
    {"estimate-pt", "estimate the transition model from a keystroke log", cmd_estimate_pt},
    {"train", "train a model and write the checkpoint and training log", cmd_train},
    {"eval", "per-type accuracy report, optionally the K sweep", cmd_eval},
    {"correct", "K-best corrections for each input line", cmd_correct},
    {"repl", "interactive correction session", cmd_repl},
    {"gradcheck", "finite-difference check of the analytic gradient", cmd_gradcheck},
  };
  Command selected = nullptr;
  for (const auto &[name, help, fn] : commands) {
    auto *sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&selected, fn = fn] { selected = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, io.out, io.err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig config;
    if (!config_path.empty())
      config.load_file(config_path);
    for (const auto &[name, opt] : options)
      if (opt->count() > 0)
        config.set(name, flags[name]);
    const Settings settings = resolve(config);
    return selected(settings, io);
  } catch (const ConfigError &e) {
    io.err << "configuration error:\n";
    for (const auto &p : e.problems())
      io.err << "  " << p << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    io.err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

} // namespace ptc::cli
