#pragma once

// Batch orchestration: every (model, strategy, task) triple is generated,
// checked, evaluated and persisted, skipping triples already in the store.

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sbench/run_config.hpp"

namespace sbench {

struct RunOptions {
  bool resume = false;
  /// Stop scheduling once this many new records were written (interruption testing).
  std::optional<int> max_new_records;
  /// Progress and warnings; nullptr silences them.
  std::ostream* log = nullptr;
};

struct RunResult {
  std::filesystem::path store_root;
  int new_records = 0;
  int skipped_records = 0;  // already present before this invocation
  bool stopped_early = false;
  std::vector<std::string> warnings;
  std::vector<std::string> failed_models;  // skipped or failed, with reason
};

/// Executes the run described by `config`. Throws ConfigError for invalid
/// setups, DatasetError when the dataset fails to load and StoreError when
/// the store cannot be created or resumed.
RunResult run_experiment(const RunConfig& config, const RunOptions& options = {});

/// Writes <store>/summary.json from the records currently in the store.
void write_store_summary(const std::filesystem::path& store_root);

}  // namespace sbench
