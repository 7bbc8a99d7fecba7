#pragma once

#include <string>

#include "config.hpp"

namespace qpcli {

struct Invocation {
  std::string command;
  RunConfig config;
  int threads = 0;
};

/// Runs one subcommand and writes its outputs and manifest. Returns the
/// process exit code; configuration, frequency and inventory problems are
/// thrown.
int run_command(const Invocation& inv);

}  // namespace qpcli
