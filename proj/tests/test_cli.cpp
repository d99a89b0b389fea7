// SPDX-License-Identifier: Apache-2.0
#include <ptc/cli/commands.hpp>
#include <ptc/corpus.hpp>
#include <ptc/nmt/checkpoint.hpp>
#include <ptc/transition.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ptc;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_ptc(std::vector<std::string> args, const std::string &input = "") {
  args.insert(args.begin(), "ptc");
  std::vector<const char *> argv;
  for (const auto &a : args)
    argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), cli::Io{in, out, err});
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t line_count(const fs::path &p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);)
    ++n;
  return n;
}

// Small corpus plus a quickly trained model shared by several tests.
class TrainedModel : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    dir_ = fresh_dir("ptc_cli_model");
    const std::string data = (dir_ / "data").string();
    const auto gen = run_ptc({"gen-data", "--samples", "400", "--seed", "3", "--out_dir", data,
                              "--max_syllables", "3", "--keystrokes", "1000"});
    ASSERT_EQ(gen.code, 0) << gen.err;
    const auto tr = run_ptc({"train", "--train_corpus", data + "/train.tsv", "--pt",
                             data + "/ptmodel", "--embed_dim", "16", "--hidden_dim", "16",
                             "--attention_dim", "16", "--iterations", "60", "--batch_size", "32",
                             "--learning_rate", "0.01", "--checkpoint",
                             (dir_ / "m.ckpt").string(), "--log", (dir_ / "log.tsv").string()});
    ASSERT_EQ(tr.code, 0) << tr.err;
  }
  static fs::path dir_;
};
fs::path TrainedModel::dir_;

} // namespace

TEST(CliGenData, SplitsSummaryAndDeterminism) {
  const fs::path a = fresh_dir("ptc_gen_a"), b = fresh_dir("ptc_gen_b");
  const auto r1 = run_ptc({"gen-data", "--samples", "1000", "--seed", "7", "--out_dir", a.string(),
                           "--keystrokes", "100"});
  ASSERT_EQ(r1.code, 0) << r1.err;
  const auto r2 = run_ptc({"gen-data", "--samples", "1000", "--seed", "7", "--out_dir", b.string(),
                           "--keystrokes", "100"});
  ASSERT_EQ(r2.code, 0) << r2.err;
  for (const char *f : {"train.tsv", "dev.tsv", "test.tsv", "ptmodel", "keystrokes.tsv"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_NEAR(static_cast<double>(line_count(a / "train.tsv")) / 1000.0, 0.85, 0.01);
  EXPECT_NEAR(static_cast<double>(line_count(a / "dev.tsv")) / 1000.0, 0.05, 0.01);
  EXPECT_NEAR(static_cast<double>(line_count(a / "test.tsv")) / 1000.0, 0.10, 0.01);
  EXPECT_NE(r1.out.find("CP"), std::string::npos);
  EXPECT_NE(r1.out.find("MP"), std::string::npos);
}

TEST(CliEstimate, RecoversGroundTruthFromGeneratedLog) {
  const fs::path d = fresh_dir("ptc_est");
  ASSERT_EQ(run_ptc({"gen-data", "--samples", "200", "--out_dir", d.string()}).code, 0);
  const auto r = run_ptc({"estimate-pt", "--keystroke_log", (d / "keystrokes.tsv").string(),
                          "--output", (d / "est").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const TransitionModel truth = load_transition_model(d / "ptmodel");
  const TransitionModel est = load_transition_model(d / "est");
  double worst = 0.0;
  for (int i = 0; i < kLetters; ++i)
    for (int j = 0; j < kLetters; ++j)
      worst = std::max(worst, std::abs(truth(i, j) - est(i, j)));
  EXPECT_LE(worst, 0.02);
}

TEST(CliEstimate, ErrorFreeLogAndMissingFile) {
  const fs::path d = fresh_dir("ptc_est2");
  save_keystroke_log({{'a', 'a'}, {'b', 'b'}}, d / "log.tsv");
  ASSERT_EQ(run_ptc({"estimate-pt", "--keystroke_log", (d / "log.tsv").string(), "--output",
                     (d / "id").string()})
              .code,
            0);
  EXPECT_EQ(load_transition_model(d / "id"), TransitionModel{});

  const auto r = run_ptc({"estimate-pt", "--keystroke_log", (d / "missing.tsv").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("missing.tsv"), std::string::npos);
}

TEST(CliConfig, EveryBadKeyReportedAtOnce) {
  const fs::path d = fresh_dir("ptc_cfg");
  std::ofstream(d / "run.conf") << "# comment\nbogus = 1\nembed_dim = -3\nlambda = 1 # inline\n"
                                   "also_bogus = x\n";
  const auto r = run_ptc({"gradcheck", "--config", (d / "run.conf").string(), "--tau", "abc"});
  EXPECT_EQ(r.code, 1);
  for (const char *key : {"bogus", "embed_dim", "also_bogus", "tau"})
    EXPECT_NE(r.err.find(key), std::string::npos) << key << "\n" << r.err;
}

TEST(CliConfig, FlagOverridesFileAndUnknownFlagIsUsageError) {
  const fs::path d = fresh_dir("ptc_cfg2");
  std::ofstream(d / "run.conf") << "gradcheck_coordinates = 19\n";
  const auto r = run_ptc({"gradcheck", "--config", (d / "run.conf").string(),
                          "--gradcheck_coordinates", "38"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("checked 38 coordinates"), std::string::npos) << r.out;
  EXPECT_EQ(run_ptc({"train", "--no_such_flag", "1"}).code, 1);
  EXPECT_EQ(run_ptc({}).code, 1);
}

TEST(CliGradcheck, TinyDefaultPasses) {
  const auto r = run_ptc({"gradcheck"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("max relative error"), std::string::npos);
}

TEST(CliTrain, ZeroIterationsWritesInitialCheckpoint) {
  const fs::path d = fresh_dir("ptc_train0");
  ASSERT_EQ(run_ptc({"gen-data", "--samples", "50", "--out_dir", d.string(), "--keystrokes", "0"}).code, 0);
  const auto r = run_ptc({"train", "--iterations", "0", "--train_corpus",
                          (d / "train.tsv").string(), "--pt", (d / "ptmodel").string(),
                          "--embed_dim", "8", "--hidden_dim", "8", "--attention_dim", "8",
                          "--checkpoint", (d / "init.ckpt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const nmt::Model m = nmt::load_checkpoint(d / "init.ckpt");
  EXPECT_EQ(m.config.hidden_dim, 8);
}

TEST_F(TrainedModel, EvalTopKNotBelowTop1AndAcrossK) {
  const std::string data = (dir_ / "data").string();
  const std::string ckpt = (dir_ / "m.ckpt").string();
  auto acc = [&](int k) {
    const fs::path tsv = dir_ / ("report" + std::to_string(k) + ".tsv");
    const auto r = run_ptc({"eval", "--checkpoint", ckpt, "--test_corpus", data + "/test.tsv",
                            "--k", std::to_string(k), "--report_tsv", tsv.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("MIX"), std::string::npos);
    std::ifstream in(tsv);
    std::string line, last;
    while (std::getline(in, line))
      last = line;
    std::istringstream row(last);
    std::string type;
    double n, w, s1, sk;
    row >> type >> n >> w >> s1 >> sk;
    EXPECT_EQ(type, "MIX");
    EXPECT_GE(sk, s1);
    return sk;
  };
  EXPECT_GE(acc(10), acc(1));
}

TEST_F(TrainedModel, EvalSweep) {
  const std::string data = (dir_ / "data").string();
  const auto r = run_ptc({"eval", "--checkpoint", (dir_ / "m.ckpt").string(), "--test_corpus",
                          data + "/test.tsv", "--dev_corpus", data + "/dev.tsv", "--sweep",
                          "true", "--k_max", "4", "--sweep_tsv", (dir_ / "sweep.tsv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("chosen K = "), std::string::npos);
  EXPECT_EQ(line_count(dir_ / "sweep.tsv"), 5u);
}

TEST_F(TrainedModel, CorrectHandlesBadAndEmptyLines) {
  const auto r = run_ptc({"correct", "--checkpoint", (dir_ / "m.ckpt").string(), "--k", "3"},
                         "nihao\nni hao!\n\nnhm\n");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
  EXPECT_NE(r.out.find("# nihao\n1\t"), std::string::npos);
  EXPECT_NE(r.out.find("# \n# nhm\n1\t"), std::string::npos) << r.out;
}

TEST_F(TrainedModel, ReplSelectsAndLogsTranscript) {
  const fs::path transcript = dir_ / "transcript.tsv";
  fs::remove(transcript);
  const auto r = run_ptc({"repl", "--checkpoint", (dir_ / "m.ckpt").string(), "--k", "3",
                          "--transcript", transcript.string()},
                         "nhm\nabc\n1\n:quit\n");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("enter a number"), std::string::npos);
  EXPECT_NE(r.out.find("  1. "), std::string::npos);
  const auto samples = load_corpus(transcript);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].source, "nhm");
  EXPECT_NE(r.out.find(samples[0].target.front()), std::string::npos);
}

TEST_F(TrainedModel, TrainingLogHasFourColumns) {
  std::ifstream in(dir_ / "log.tsv");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), '\t'), 3);
  }
  EXPECT_EQ(rows, 60u);
}

TEST(CliRepl, QuitExitsCleanly) {
  const fs::path d = fresh_dir("ptc_repl");
  ASSERT_EQ(run_ptc({"gen-data", "--samples", "30", "--out_dir", d.string(), "--keystrokes", "0"}).code, 0);
  ASSERT_EQ(run_ptc({"train", "--iterations", "0", "--train_corpus", (d / "train.tsv").string(),
                     "--pt", (d / "ptmodel").string(), "--embed_dim", "4", "--hidden_dim", "4",
                     "--attention_dim", "4", "--checkpoint", (d / "m.ckpt").string(), "--log",
                     ""})
              .code,
            0);
  EXPECT_EQ(run_ptc({"repl", "--checkpoint", (d / "m.ckpt").string()}, ":quit\n").code, 0);
}
