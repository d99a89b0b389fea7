// SPDX-License-Identifier: Apache-2.0
#include <ptc/cli/commands.hpp>

int main(int argc, char **argv) { return ptc::cli::run(argc, argv); }
