#pragma once

// On-disk store for one run:
//   <root>/config.json                       config snapshot incl. config_digest
//   <root>/records/<model>__<strategy>.jsonl one RunRecord per line, append-only
//   <root>/summary.json                      summary written after a run completes

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "sbench/guidance.hpp"

namespace sbench {

/// File-name-safe form of a model id: characters outside [A-Za-z0-9._-] become '_'.
std::string sanitize_model_id(std::string_view model_id);

class RunStore {
 public:
  /// Creates a fresh store. Throws StoreError when `root` already holds one.
  static RunStore create(const std::filesystem::path& root, nlohmann::json snapshot);
  /// Opens an existing store. Throws StoreError naming the file when it is missing or corrupt.
  static RunStore open(const std::filesystem::path& root);
  static bool exists(const std::filesystem::path& root);

  RunStore(RunStore&&) noexcept;
  RunStore& operator=(RunStore&&) noexcept;
  ~RunStore();

  const std::filesystem::path& root() const { return root_; }
  const nlohmann::json& snapshot() const { return snapshot_; }
  const std::string& config_digest() const { return digest_; }

  std::filesystem::path records_path(std::string_view model_id, StrategyKind strategy) const;

  /// Task ids already persisted for the pair. An unterminated trailing line
  /// left by an interrupted write is cut off first.
  std::set<std::string> completed_tasks(std::string_view model_id, StrategyKind strategy);

  /// Appends one record as a single line and flushes it. Safe to call from
  /// several threads.
  void append(const RunRecord& record);

  /// Every complete record in the store, files in name order, lines in file
  /// order. Throws StoreError naming the file for a malformed line.
  std::vector<RunRecord> read_records() const;

  void write_summary(const nlohmann::json& summary) const;

 private:
  RunStore(std::filesystem::path root, nlohmann::json snapshot);
  std::mutex& file_mutex(const std::filesystem::path& path);

  std::filesystem::path root_;
  nlohmann::json snapshot_;
  std::string digest_;
  std::unique_ptr<std::mutex> map_mu_;
  std::map<std::filesystem::path, std::unique_ptr<std::mutex>> file_mu_;
};

}  // namespace sbench
