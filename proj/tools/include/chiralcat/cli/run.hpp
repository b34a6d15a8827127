#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "chiralcat/cli/config.hpp"

namespace chiralcat::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kFailure = 1, kConfigError = 2, kNumericalError = 3 };

struct OutputFile {
  std::string path;  // relative to the run directory, '/' separated
  std::string content;
};

/// Everything a run produces, computed without touching the filesystem.
std::vector<OutputFile> compute(const ExperimentConfig& config, unsigned jobs = 1);

struct RunOptions {
  std::filesystem::path out_dir;
  unsigned jobs = 1;
  bool seed_free = false;
};

/// Computes, writes the outputs atomically, then the manifest. Returns an exit code.
int run(const ExperimentConfig& config, const RunOptions& opts, std::ostream& log);

}  // namespace chiralcat::cli
