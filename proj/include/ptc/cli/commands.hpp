// SPDX-License-Identifier: Apache-2.0
/**
 * @file   commands.hpp
 * @brief  Subcommands of the `ptc` tool.
 *
 * Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
 */
#pragma once

#include <ptc/cli/run_config.hpp>

#include <iostream>

namespace ptc::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitRuntime = 2 };

struct Io {
  std::istream &in = std::cin;
  std::ostream &out = std::cout;
  std::ostream &err = std::cerr;
};

int cmd_gen_data(const Settings &s, Io io);
int cmd_estimate_pt(const Settings &s, Io io);
int cmd_train(const Settings &s, Io io);
int cmd_eval(const Settings &s, Io io);
int cmd_correct(const Settings &s, Io io);
int cmd_repl(const Settings &s, Io io);
int cmd_gradcheck(const Settings &s, Io io);

/// Parses `ptc <subcommand> [--key value ...]` and dispatches.
int run(int argc, const char *const *argv, Io io = {});

} // namespace ptc::cli
