// sbench: check Java sources for Singleton conformance, run guided-generation
// experiments and render their reports.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sbench/error.hpp"
#include "sbench/pattern_checker.hpp"
#include "sbench/records.hpp"
#include "sbench/report.hpp"
#include "sbench/run_config.hpp"
#include "sbench/run_store.hpp"
#include "sbench/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kNonconforming = 1;
constexpr int kUsage = 2;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sbench::Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<fs::path> collect_java_files(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& input : inputs) {
    const fs::path p(input);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::recursive_directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".java") found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p)) {
      files.push_back(p);
    } else {
      throw sbench::Error("no such file or directory: " + input);
    }
  }
  return files;
}

int cmd_check(const std::vector<std::string>& paths, bool as_json, const std::string& class_name) {
  const auto files = collect_java_files(paths);
  if (files.empty()) {
    std::cerr << "sbench check: no .java files found\n";
    return kUsage;
  }
  bool all_conform = true;
  json rows = json::array();
  for (const auto& file : files) {
    const auto source = read_text(file);
    const auto expected = class_name.empty() ? file.stem().string() : class_name;
    const auto report = sbench::check_candidate(source, expected);
    const auto score = sbench::singleton_score(report).value;
    all_conform = all_conform && report.is_singleton();
    if (as_json) {
      json row = report;
      row["path"] = file.string();
      row["singleton_score"] = score;
      rows.push_back(std::move(row));
    } else {
      std::ostringstream line;
      line << file.string() << "  score " << std::fixed << std::setprecision(2) << score << "  "
           << (report.is_singleton() ? "conforming" : "nonconforming");
      std::cout << line.str() << '\n';
      for (const auto& f : report.failed_checks) std::cout << "    " << f << '\n';
    }
  }
  if (as_json) std::cout << rows.dump(2) << '\n';
  return all_conform ? kOk : kNonconforming;
}

int execute_run(const sbench::RunConfig& config, const sbench::RunOptions& options) {
  const auto result = sbench::run_experiment(config, options);
  std::cerr << "store " << result.store_root.string() << ": " << result.new_records << " new record(s), "
            << result.skipped_records << " already present\n";
  for (const auto& f : result.failed_models) std::cerr << "warning: " << f << '\n';
  if (result.stopped_early) std::cerr << "stopped early; rerun with --resume to finish\n";
  return kOk;
}

sbench::Summary load_summary(const fs::path& path) {
  if (fs::is_directory(path)) {
    const auto store = sbench::RunStore::open(path);
    const auto records = store.read_records();
    return sbench::summarize(records, store.snapshot().value("run_id", ""), store.config_digest());
  }
  if (!fs::exists(path)) throw sbench::StoreError("no such store or summary file: " + path.string());
  try {
    return sbench::summary_from_json(json::parse(read_text(path)));
  } catch (const json::exception& e) {
    throw sbench::StoreError(path.string() + ": " + e.what());
  } catch (const sbench::Error& e) {
    throw sbench::StoreError(path.string() + ": " + e.what());
  }
}

int cmd_report(const std::string& path, const std::string& format, const std::string& output) {
  const auto summary = load_summary(path);
  std::string text;
  if (format == "text") text = sbench::render_text(summary);
  else if (format == "csv") text = sbench::render_csv(summary);
  else text = sbench::render_json(summary);
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out || !(out << text)) throw sbench::Error("cannot write " + output);
  }
  return kOk;
}

struct MockArgs {
  std::string script;
  std::string dataset;
  std::string output_dir = "sbench-runs";
  std::string run_id = "mock";
  std::string model_id = "scripted";
  std::vector<std::string> strategies{"baseline", "binary_feedback", "predicate_feedback"};
  int iteration_cap = 10;
};

sbench::RunConfig mock_config(const MockArgs& args) {
  json script_doc;
  try {
    script_doc = json::parse(read_text(args.script));
  } catch (const json::parse_error& e) {
    throw sbench::ConfigError(args.script + ": " + e.what());
  } catch (const sbench::Error& e) {
    throw sbench::ConfigError(e.what());
  }
  json doc = {
      {"run_id", args.run_id},
      {"dataset_path", fs::absolute(args.dataset).string()},
      {"output_dir", fs::absolute(args.output_dir).string()},
      {"models", json::array({{{"model_id", args.model_id}, {"script", fs::absolute(args.script).string()}}})},
      {"strategies", args.strategies},
      {"iteration_cap", args.iteration_cap},
  };
  if (script_doc.is_object() && script_doc.contains("outcomes")) {
    doc["exec"] = {{"evaluator", "scripted"}, {"outcomes_file", fs::absolute(args.script).string()}};
  }
  return sbench::parse_run_config(doc, fs::current_path());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singleton-pattern guidance benchmark"};
  app.require_subcommand(1);

  std::vector<std::string> check_paths;
  bool check_json = false;
  std::string check_class;
  auto* check = app.add_subcommand("check", "Check Java files or directories for Singleton conformance");
  check->add_option("paths", check_paths, "Java files or directories")->required();
  check->add_flag("--json", check_json, "Emit per-file reports as JSON");
  check->add_option("--class", check_class, "Primary class name (default: the file name)");

  std::string config_path;
  bool resume = false;
  int max_new = -1;
  auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
  run->add_option("--config", config_path, "Run configuration (JSON)")->required();
  run->add_flag("--resume", resume, "Continue an existing run, skipping persisted tasks");
  run->add_option("--max-new-records", max_new, "Stop after this many new records")->group("");

  std::string report_path;
  std::string format = "text";
  std::string report_output;
  auto* report = app.add_subcommand("report", "Render a report from a run store or a summary JSON file");
  report->add_option("store", report_path, "Run store directory or summary JSON")->required();
  report->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
  report->add_option("-o,--output", report_output, "Write to a file instead of stdout");

  MockArgs mock;
  bool mock_resume = false;
  int mock_max_new = -1;
  auto* mock_run = app.add_subcommand("mock-run", "Run the protocol end to end against a scripted model");
  mock_run->add_option("--script", mock.script, "Scripted responses (JSON)")->required();
  mock_run->add_option("--dataset", mock.dataset, "Task file (JSON lines)")->required();
  mock_run->add_option("--output-dir", mock.output_dir, "Directory holding run stores");
  mock_run->add_option("--run-id", mock.run_id, "Run id");
  mock_run->add_option("--model-id", mock.model_id, "Model id recorded for the scripted model");
  mock_run->add_option("--strategies", mock.strategies, "Strategies to run")->delimiter(',');
  mock_run->add_option("--iteration-cap", mock.iteration_cap, "Iteration cap");
  mock_run->add_flag("--resume", mock_resume, "Continue an existing run");
  mock_run->add_option("--max-new-records", mock_max_new, "Stop after this many new records")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*check) return cmd_check(check_paths, check_json, check_class);
    if (*report) return cmd_report(report_path, format, report_output);

    sbench::RunOptions options;
    options.log = &std::cerr;
    if (*run) {
      options.resume = resume;
      if (max_new >= 0) options.max_new_records = max_new;
      return execute_run(sbench::load_run_config(config_path), options);
    }
    if (*mock_run) {
      options.resume = mock_resume;
      if (mock_max_new >= 0) options.max_new_records = mock_max_new;
      const auto config = mock_config(mock);
      const int code = execute_run(config, options);
      if (code == kOk && !options.max_new_records) {
        std::cout << sbench::render_text(load_summary(config.output_dir / config.run_id));
      }
      return code;
    }
  } catch (const sbench::Error& e) {
    std::cerr << "sbench: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "sbench: unexpected error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
