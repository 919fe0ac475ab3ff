#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace sbench::detail {

struct ProcessResult {
  int exit_code = -1;  // -1 when killed or not started
  bool timed_out = false;
  bool spawn_failed = false;
  std::string output;  // stdout and stderr interleaved
};

/// Runs argv[0] (PATH lookup) in `cwd` with output captured to `log_file`.
/// The child gets its own process group, which is killed at the deadline.
ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                          const std::filesystem::path& log_file, std::chrono::milliseconds timeout);

}  // namespace sbench::detail
