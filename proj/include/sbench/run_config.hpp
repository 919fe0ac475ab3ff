#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sbench/dataset.hpp"
#include "sbench/exec_harness.hpp"
#include "sbench/guidance.hpp"
#include "sbench/llm_gateway.hpp"

namespace sbench {

/// A model backend: either an HTTP endpoint or a scripted response file.
struct ModelSpec {
  std::string model_id;
  std::optional<ModelHandle> http;
  std::optional<std::filesystem::path> script;
};

enum class EvaluatorKind { java, scripted };

struct ExecConfig {
  EvaluatorKind evaluator = EvaluatorKind::java;
  Toolchain toolchain;
  int budget_s = 30;
  bool test_adaptation = false;
  std::filesystem::path workdir;  // defaults to <output_dir>/<run_id>/scratch
  bool keep_scratch = false;
  /// Verdict table for the scripted evaluator (see ScriptedEvaluator).
  ScriptedEvaluator::Table outcomes;
};

struct Parallelism {
  int pairs = 1;          // (model, strategy) pairs run concurrently
  int per_endpoint = 4;   // in-flight requests per endpoint
  int exec_workers = 0;   // 0 = hardware concurrency
};

struct RunConfig {
  std::string run_id;
  std::filesystem::path dataset_path;
  FieldMap field_map;
  std::filesystem::path output_dir;
  std::vector<ModelSpec> models;
  std::vector<Strategy> strategies;
  int iteration_cap = 10;
  std::vector<std::string> exemplars;  // exemplar source texts, empty = shipped defaults
  ExecConfig exec;
  Parallelism parallelism;
  std::optional<std::int64_t> seed;
};

/// Parses and validates a config document. Relative paths resolve against
/// `base_dir`. Throws ConfigError on any problem.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Normalised snapshot stored with a run. Secrets are never included; only
/// the names of credential variables.
nlohmann::json config_snapshot(const RunConfig& config, const std::string& dataset_digest);

/// Digest over the result-determining part of a snapshot. Output locations
/// and parallelism are excluded so the same experiment in two directories
/// shares a digest.
std::string config_digest(const nlohmann::json& snapshot);

std::string_view to_string(EvaluatorKind kind);

}  // namespace sbench
