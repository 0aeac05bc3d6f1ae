#pragma once

#include "nehari/io.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nehari {

struct CliFlags {
  std::filesystem::path config;    ///< relative material tables resolve against its directory
  std::optional<std::string> out;  ///< overrides output.dir
  int threads = 1;
  bool emit_grid = false;
};

const std::vector<std::string>& cli_commands();

/// Runs one command and writes its artifacts. Exit status: 0 success,
/// 1 solver failure (diagnostics still written), 2 configuration error.
int run(const std::string& command, const RunConfig& cfg, const CliFlags& flags, std::ostream& log,
        std::ostream& err);

/// argv entry point.
int run_cli(int argc, char** argv);

}  // namespace nehari
