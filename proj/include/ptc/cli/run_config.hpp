// SPDX-License-Identifier: Apache-2.0
/**
 * @file   run_config.hpp
 * @brief  Flat `key = value` configuration shared by every subcommand.
 *
 * Values come from built-in defaults, then the config file, then command
 * line flags of the same name. Errors are collected so that one run reports
 * every bad key.
 */
#pragma once

#include <ptc/corpus.hpp>
#include <ptc/error.hpp>
#include <ptc/nmt/parameters.hpp>
#include <ptc/nmt/trainer.hpp>

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ptc::cli {

struct KeySpec {
  std::string_view name;
  std::string_view default_value;
  std::string_view help;
};

/// Every recognized key, in documentation order.
const std::vector<KeySpec> &config_keys();

/// Thrown with one line per problem.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::vector<std::string> &problems);
  const std::vector<std::string> &problems() const { return problems_; }

private:
  std::vector<std::string> problems_;
};

class RunConfig {
public:
  RunConfig(); ///< all defaults

  /// Records an unknown key as a problem instead of throwing.
  void set(std::string_view key, std::string value);
  /// Parses a config file; malformed lines and unknown keys become problems.
  void load_file(const std::filesystem::path &path);

  const std::string &raw(std::string_view key) const;
  const std::vector<std::string> &problems() const { return problems_; }
  void add_problem(std::string message) { problems_.push_back(std::move(message)); }

private:
  std::map<std::string, std::string, std::less<>> values_;
  std::vector<std::string> problems_;
};

/// Typed view of a RunConfig.
struct Settings {
  std::uint64_t seed = 1;
  int workers = 1;

  nmt::ModelConfig model;
  nmt::TrainSpec train;

  double error_rate = 0.08;
  double acronym_rate = 0.5;
  std::array<double, 4> type_mix{};
  std::filesystem::path neighbors; ///< empty: built-in QWERTY table
  std::size_t samples = 0;
  std::size_t min_syllables = 1;
  std::size_t max_syllables = 6;
  double zipf_exponent = 1.0;
  std::array<double, 3> split{};
  std::size_t keystrokes = 0;
  double smoothing = 0.0;

  std::filesystem::path lexicon, out_dir, train_corpus, dev_corpus, test_corpus, pt,
    keystroke_log, checkpoint, output, input, transcript, report_tsv, sweep_tsv;

  int k = 10;
  int k_max = 10;
  double tau = 0.005;
  bool sweep = false;
  int gradcheck_coordinates = 200;
  double gradcheck_step = 1e-5;

  NoiseSpec noise() const;
};

/// Converts and range-checks every key; throws ConfigError listing all
/// problems, including those already recorded on `config`.
Settings resolve(const RunConfig &config);

} // namespace ptc::cli
