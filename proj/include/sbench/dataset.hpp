#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sbench {

/// One coding task in the HumanEval-X Java layout.
struct Task {
  std::string task_id;
  /// Natural-language problem plus declaration stub; sent verbatim in prompts.
  std::string description;
  std::string declaration;
  std::string expected_class_name;
  std::string test_code;
  std::optional<std::string> example_test;
  std::optional<std::string> canonical_solution;

  bool operator==(const Task&) const = default;
};

/// Record-field names used to read a task line. Defaults match HumanEval-X.
struct FieldMap {
  std::string task_id = "task_id";
  std::string prompt = "prompt";
  std::string declaration = "declaration";
  std::string test = "test";
  std::string example_test = "example_test";
  std::string canonical_solution = "canonical_solution";
  /// Optional explicit language tag; when absent the task_id prefix ("Java/0") is used.
  std::string language = "language";
};

struct TaskSet {
  std::vector<Task> tasks;
  std::string source_digest;  // SHA-256 of the file bytes
  std::vector<std::string> warnings;

  const Task* find(std::string_view task_id) const;
};

/// Loads line-delimited JSON tasks. Throws DatasetError naming the 1-based
/// line for malformed lines or missing mandatory fields.
TaskSet load_tasks(const std::filesystem::path& path, const FieldMap& fields = {});

/// Same as load_tasks over in-memory bytes.
TaskSet parse_tasks(std::string_view bytes, const FieldMap& fields = {});

}  // namespace sbench
