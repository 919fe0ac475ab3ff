#include "sbench/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "sbench/digest.hpp"
#include "sbench/error.hpp"

namespace sbench {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_text(const fs::path& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + what + " " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path.lexically_normal() : (base / path).lexically_normal();
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": key '" + key + "' has the wrong type");
  }
}

ModelSpec parse_model(const json& m, const fs::path& base, std::size_t index) {
  const std::string where = "models[" + std::to_string(index) + "]";
  if (!m.is_object()) throw ConfigError(where + ": expected an object");
  reject_unknown_keys(m,
                      {"model_id", "endpoint", "auth_ref", "temperature", "max_tokens", "timeout_s", "seed",
                       "max_retries", "initial_backoff_ms", "script"},
                      where);
  ModelSpec spec;
  spec.model_id = get_or<std::string>(m, "model_id", "", where);
  if (spec.model_id.empty()) throw ConfigError(where + ": model_id is required");
  const bool has_endpoint = m.contains("endpoint");
  const bool has_script = m.contains("script");
  if (has_endpoint == has_script) throw ConfigError(where + ": exactly one of 'endpoint' or 'script' is required");
  if (has_script) {
    spec.script = resolve(base, get_or<std::string>(m, "script", "", where));
    return spec;
  }
  ModelHandle h;
  h.model_id = spec.model_id;
  h.endpoint = get_or<std::string>(m, "endpoint", "", where);
  h.auth_ref = get_or<std::string>(m, "auth_ref", "", where);
  h.request_params.temperature = get_or<double>(m, "temperature", 0.2, where);
  h.request_params.max_tokens = get_or<int>(m, "max_tokens", 4096, where);
  h.request_params.timeout_s = get_or<int>(m, "timeout_s", 120, where);
  if (m.contains("seed") && !m["seed"].is_null()) h.request_params.seed = get_or<std::int64_t>(m, "seed", 0, where);
  h.retry.max_retries = get_or<int>(m, "max_retries", 3, where);
  h.retry.initial_backoff = std::chrono::milliseconds(get_or<int>(m, "initial_backoff_ms", 500, where));
  h.validate();
  spec.http = std::move(h);
  return spec;
}

ScriptedEvaluator::Table parse_outcome_table(const json& doc, const std::string& where) {
  const json& table = doc.contains("outcomes") ? doc.at("outcomes") : doc;
  if (!table.is_object()) throw ConfigError(where + ": outcome table must be an object");
  ScriptedEvaluator::Table out;
  for (const auto& [strategy, by_task] : table.items()) {
    if (strategy != "*" && !parse_strategy_kind(strategy)) {
      throw ConfigError(where + ": unknown strategy '" + strategy + "' in outcome table");
    }
    if (!by_task.is_object()) throw ConfigError(where + ": outcomes for '" + strategy + "' must be an object");
    for (const auto& [task, value] : by_task.items()) {
      if (!value.is_string()) throw ConfigError(where + ": outcome for " + strategy + "/" + task + " must be a string");
      out[strategy][task] = value.get<std::string>();
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(EvaluatorKind kind) { return kind == EvaluatorKind::java ? "java" : "scripted"; }

RunConfig parse_run_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown_keys(doc,
                      {"run_id", "dataset_path", "field_map", "output_dir", "models", "strategies", "iteration_cap",
                       "exemplars", "exec", "parallelism", "seed"},
                      "config");
  RunConfig cfg;
  cfg.run_id = get_or<std::string>(doc, "run_id", "", "config");
  if (cfg.run_id.empty() || cfg.run_id.find('/') != std::string::npos || cfg.run_id == "." || cfg.run_id == "..") {
    throw ConfigError("config: run_id must be a non-empty directory name");
  }
  const auto dataset = get_or<std::string>(doc, "dataset_path", "", "config");
  if (dataset.empty()) throw ConfigError("config: dataset_path is required");
  cfg.dataset_path = resolve(base_dir, dataset);
  const auto output = get_or<std::string>(doc, "output_dir", "", "config");
  if (output.empty()) throw ConfigError("config: output_dir is required");
  cfg.output_dir = resolve(base_dir, output);

  if (const auto it = doc.find("field_map"); it != doc.end()) {
    reject_unknown_keys(*it,
                        {"task_id", "prompt", "declaration", "test", "example_test", "canonical_solution", "language"},
                        "field_map");
    auto& f = cfg.field_map;
    f.task_id = get_or<std::string>(*it, "task_id", f.task_id, "field_map");
    f.prompt = get_or<std::string>(*it, "prompt", f.prompt, "field_map");
    f.declaration = get_or<std::string>(*it, "declaration", f.declaration, "field_map");
    f.test = get_or<std::string>(*it, "test", f.test, "field_map");
    f.example_test = get_or<std::string>(*it, "example_test", f.example_test, "field_map");
    f.canonical_solution = get_or<std::string>(*it, "canonical_solution", f.canonical_solution, "field_map");
    f.language = get_or<std::string>(*it, "language", f.language, "field_map");
  }

  cfg.iteration_cap = get_or<int>(doc, "iteration_cap", 10, "config");
  if (cfg.iteration_cap < 1) throw ConfigError("config: iteration_cap must be >= 1");
  if (doc.contains("seed") && !doc["seed"].is_null()) cfg.seed = get_or<std::int64_t>(doc, "seed", 0, "config");

  if (const auto it = doc.find("exemplars"); it != doc.end()) {
    if (!it->is_array() || it->size() != 2) throw ConfigError("config: exemplars must list exactly 2 files");
    for (const auto& p : *it) cfg.exemplars.push_back(read_text(resolve(base_dir, p.get<std::string>()), "exemplar"));
  }

  const auto models = doc.find("models");
  if (models == doc.end() || !models->is_array() || models->empty()) {
    throw ConfigError("config: models must be a non-empty array");
  }
  std::set<std::string> model_ids;
  for (std::size_t i = 0; i < models->size(); ++i) {
    auto spec = parse_model((*models)[i], base_dir, i);
    if (!model_ids.insert(spec.model_id).second) throw ConfigError("config: duplicate model_id " + spec.model_id);
    if (spec.http && cfg.seed && !spec.http->request_params.seed) spec.http->request_params.seed = cfg.seed;
    cfg.models.push_back(std::move(spec));
  }

  const auto strategies = doc.find("strategies");
  if (strategies == doc.end() || !strategies->is_array() || strategies->empty()) {
    throw ConfigError("config: strategies must be a non-empty array");
  }
  std::set<StrategyKind> seen;
  for (const auto& s : *strategies) {
    std::string name;
    int iterations = cfg.iteration_cap;
    if (s.is_string()) {
      name = s.get<std::string>();
    } else if (s.is_object()) {
      reject_unknown_keys(s, {"kind", "max_iterations"}, "strategies");
      name = get_or<std::string>(s, "kind", "", "strategies");
      iterations = get_or<int>(s, "max_iterations", cfg.iteration_cap, "strategies");
    } else {
      throw ConfigError("config: strategies entries must be names or objects");
    }
    const auto kind = parse_strategy_kind(name);
    if (!kind) throw ConfigError("config: unknown strategy '" + name + "'");
    if (!seen.insert(*kind).second) throw ConfigError("config: duplicate strategy '" + name + "'");
    iterations = std::min(iterations, cfg.iteration_cap);
    cfg.strategies.push_back(Strategy::make(
        *kind, iterations, *kind == StrategyKind::fewshot_feedback ? cfg.exemplars : std::vector<std::string>{}));
  }

  cfg.exec.workdir = cfg.output_dir / cfg.run_id / "scratch";
  if (const auto it = doc.find("exec"); it != doc.end()) {
    reject_unknown_keys(*it,
                        {"evaluator", "javac", "java", "budget_s", "test_adaptation", "workdir", "keep_scratch",
                         "outcomes", "outcomes_file"},
                        "exec");
    auto& e = cfg.exec;
    const auto evaluator = get_or<std::string>(*it, "evaluator", "java", "exec");
    if (evaluator == "java") e.evaluator = EvaluatorKind::java;
    else if (evaluator == "scripted") e.evaluator = EvaluatorKind::scripted;
    else throw ConfigError("exec: evaluator must be 'java' or 'scripted'");
    e.toolchain.javac = get_or<std::string>(*it, "javac", "javac", "exec");
    e.toolchain.java = get_or<std::string>(*it, "java", "java", "exec");
    e.budget_s = get_or<int>(*it, "budget_s", 30, "exec");
    if (e.budget_s <= 0) throw ConfigError("exec: budget_s must be > 0");
    e.test_adaptation = get_or<bool>(*it, "test_adaptation", false, "exec");
    e.keep_scratch = get_or<bool>(*it, "keep_scratch", false, "exec");
    if (it->contains("workdir")) e.workdir = resolve(base_dir, get_or<std::string>(*it, "workdir", "", "exec"));
    if (it->contains("outcomes")) e.outcomes = parse_outcome_table(it->at("outcomes"), "exec.outcomes");
    if (it->contains("outcomes_file")) {
      const auto path = resolve(base_dir, get_or<std::string>(*it, "outcomes_file", "", "exec"));
      json table;
      try {
        table = json::parse(read_text(path, "outcomes file"));
      } catch (const json::parse_error& err) {
        throw ConfigError("outcomes file " + path.string() + ": " + err.what());
      }
      e.outcomes = parse_outcome_table(table, path.string());
    }
    if (e.evaluator == EvaluatorKind::scripted && e.outcomes.empty()) {
      throw ConfigError("exec: the scripted evaluator needs 'outcomes' or 'outcomes_file'");
    }
  } else {
    cfg.exec.evaluator = EvaluatorKind::java;
  }

  if (const auto it = doc.find("parallelism"); it != doc.end()) {
    reject_unknown_keys(*it, {"pairs", "per_endpoint", "exec_workers"}, "parallelism");
    auto& p = cfg.parallelism;
    p.pairs = get_or<int>(*it, "pairs", 1, "parallelism");
    p.per_endpoint = get_or<int>(*it, "per_endpoint", 4, "parallelism");
    p.exec_workers = get_or<int>(*it, "exec_workers", 0, "parallelism");
    if (p.pairs < 1 || p.per_endpoint < 1 || p.exec_workers < 0) {
      throw ConfigError("parallelism: limits must be positive");
    }
  }
  if (cfg.parallelism.exec_workers == 0) {
    cfg.parallelism.exec_workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_text(path, "config file"));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_run_config(doc, fs::absolute(path).parent_path());
}

json config_snapshot(const RunConfig& cfg, const std::string& dataset_digest) {
  json models = json::array();
  for (const auto& m : cfg.models) {
    if (m.http) {
      const auto& h = *m.http;
      models.push_back({{"model_id", m.model_id},
                        {"kind", "http"},
                        {"endpoint", h.endpoint},
                        {"auth_ref", h.auth_ref},
                        {"temperature", h.request_params.temperature},
                        {"max_tokens", h.request_params.max_tokens},
                        {"timeout_s", h.request_params.timeout_s},
                        {"seed", h.request_params.seed ? json(*h.request_params.seed) : json(nullptr)},
                        {"max_retries", h.retry.max_retries}});
    } else {
      std::string digest;
      try {
        digest = sha256_hex(read_text(*m.script, "script"));
      } catch (const ConfigError&) {
        digest = "";
      }
      models.push_back({{"model_id", m.model_id},
                        {"kind", "scripted"},
                        {"script", m.script->string()},
                        {"script_digest", digest}});
    }
  }
  json strategies = json::array();
  for (const auto& s : cfg.strategies) {
    strategies.push_back({{"kind", to_string(s.kind)}, {"max_iterations", s.max_iterations}});
  }
  json exemplars = json::array();
  if (cfg.exemplars.empty()) {
    for (auto ex : default_exemplars()) exemplars.push_back(std::string(ex));
  } else {
    for (const auto& ex : cfg.exemplars) exemplars.push_back(ex);
  }
  const auto& f = cfg.field_map;
  return json{
      {"run_id", cfg.run_id},
      {"dataset", {{"path", cfg.dataset_path.string()}, {"digest", dataset_digest}}},
      {"field_map",
       {{"task_id", f.task_id},
        {"prompt", f.prompt},
        {"declaration", f.declaration},
        {"test", f.test},
        {"example_test", f.example_test},
        {"canonical_solution", f.canonical_solution},
        {"language", f.language}}},
      {"output_dir", cfg.output_dir.string()},
      {"models", std::move(models)},
      {"strategies", std::move(strategies)},
      {"iteration_cap", cfg.iteration_cap},
      {"exemplars", std::move(exemplars)},
      {"exec",
       {{"evaluator", to_string(cfg.exec.evaluator)},
        {"javac", cfg.exec.toolchain.javac},
        {"java", cfg.exec.toolchain.java},
        {"budget_s", cfg.exec.budget_s},
        {"test_adaptation", cfg.exec.test_adaptation},
        {"workdir", cfg.exec.workdir.string()},
        {"keep_scratch", cfg.exec.keep_scratch},
        {"outcomes", cfg.exec.outcomes}}},
      {"parallelism",
       {{"pairs", cfg.parallelism.pairs},
        {"per_endpoint", cfg.parallelism.per_endpoint},
        {"exec_workers", cfg.parallelism.exec_workers}}},
      {"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)},
  };
}

std::string config_digest(const json& snapshot) {
  json core = snapshot;
  core.erase("output_dir");
  core.erase("parallelism");
  core.erase("config_digest");
  if (core.contains("dataset")) core["dataset"].erase("path");
  if (core.contains("exec")) {
    core["exec"].erase("workdir");
    core["exec"].erase("keep_scratch");
  }
  if (core.contains("models")) {
    for (auto& m : core["models"]) m.erase("script");
  }
  return sha256_hex(core.dump());
}

}  // namespace sbench
