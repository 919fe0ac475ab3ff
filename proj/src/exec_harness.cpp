#include "sbench/exec_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <regex>
#include <thread>

#include "sbench/error.hpp"
#include "sbench/run_store.hpp"
#include "sbench/source_model.hpp"
#include "subprocess.hpp"

namespace sbench {
namespace {

namespace fs = std::filesystem;
using std::chrono::milliseconds;
using std::chrono::steady_clock;

constexpr std::size_t kMaxDetail = 4000;

std::string truncate_detail(std::string s) {
  if (s.size() > kMaxDetail) {
    s.resize(kMaxDetail);
    s += "\n[truncated]";
  }
  return s;
}

std::string sanitize(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "_";
  return out;
}

bool write_file(const fs::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  return static_cast<bool>(out);
}

OutcomeLabel label(OutcomeKind kind, std::string detail) {
  return OutcomeLabel{kind, truncate_detail(std::move(detail)), std::nullopt};
}

OutcomeLabel compile_error(std::string diagnostics, std::string_view candidate) {
  auto category = classify_compile_error(diagnostics, candidate);
  return OutcomeLabel{OutcomeKind::CompileError, truncate_detail(std::move(diagnostics)), category};
}

milliseconds remaining(steady_clock::time_point deadline) {
  return std::max(milliseconds(0), std::chrono::duration_cast<milliseconds>(deadline - steady_clock::now()));
}

bool only_whitespace(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

class ScratchDir {
 public:
  ScratchDir(fs::path path, bool keep) : path_(std::move(path)), keep_(keep) {}
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  ~ScratchDir() {
    if (!keep_) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  bool keep_;
};

}  // namespace

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Pass: return "Pass";
    case OutcomeKind::TestFail: return "TestFail";
    case OutcomeKind::CompileError: return "CompileError";
    case OutcomeKind::Timeout: return "Timeout";
    case OutcomeKind::Aborted: return "Aborted";
  }
  return "Aborted";
}

std::optional<OutcomeKind> parse_outcome_kind(std::string_view text) {
  for (auto k : {OutcomeKind::Pass, OutcomeKind::TestFail, OutcomeKind::CompileError, OutcomeKind::Timeout,
                 OutcomeKind::Aborted}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(CompileErrorCategory category) {
  switch (category) {
    case CompileErrorCategory::missing_external_library: return "missing_external_library";
    case CompileErrorCategory::non_code_output: return "non_code_output";
    case CompileErrorCategory::other_compile_error: return "other_compile_error";
  }
  return "other_compile_error";
}

std::optional<CompileErrorCategory> parse_compile_error_category(std::string_view text) {
  for (auto c : {CompileErrorCategory::missing_external_library, CompileErrorCategory::non_code_output,
                 CompileErrorCategory::other_compile_error}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

CompileErrorCategory classify_compile_error(std::string_view diagnostics, std::string_view candidate) {
  if (parse_compilation_unit(candidate).empty()) return CompileErrorCategory::non_code_output;
  static const std::regex kMissingPackage(R"(package\s+[A-Za-z_$][\w$]*(\.[A-Za-z_$][\w$]*)*\s+does not exist)");
  static const std::regex kMissingInPackage(R"(location:\s+package\s+[A-Za-z_$][\w$.]*)");
  static const std::regex kMissingModule(R"(module not found:\s+\S+)");
  const std::string diag(diagnostics);
  if (std::regex_search(diag, kMissingPackage) || std::regex_search(diag, kMissingInPackage) ||
      std::regex_search(diag, kMissingModule)) {
    return CompileErrorCategory::missing_external_library;
  }
  return CompileErrorCategory::other_compile_error;
}

std::string adapt_test_code(std::string_view test_code, std::string_view class_name, std::string_view accessor) {
  const std::regex pattern("new\\s+" + std::string(class_name) + "\\s*\\(\\s*\\)");
  return std::regex_replace(std::string(test_code), pattern, std::string(class_name) + "." + std::string(accessor) + "()");
}

std::optional<std::string> public_class_name(std::string_view source) {
  const auto tokens = tokenize(source);
  int depth = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.kind == TokenKind::punctuation) {
      if (t.text == "{") ++depth;
      if (t.text == "}") depth = std::max(0, depth - 1);
      continue;
    }
    if (depth != 0 || t.kind != TokenKind::keyword || t.text != "public") continue;
    std::size_t j = i + 1;
    while (j < tokens.size() && tokens[j].kind == TokenKind::keyword &&
           (tokens[j].text == "final" || tokens[j].text == "abstract" || tokens[j].text == "static" ||
            tokens[j].text == "strictfp")) {
      ++j;
    }
    if (j + 1 < tokens.size() && tokens[j].text == "class" && tokens[j + 1].kind == TokenKind::identifier) {
      return tokens[j + 1].text;
    }
  }
  return std::nullopt;
}

bool toolchain_available(const Toolchain& toolchain) noexcept {
  try {
    check_toolchain(toolchain);
    return true;
  } catch (...) {
    return false;
  }
}

void check_toolchain(const Toolchain& toolchain) {
  const auto dir = fs::temp_directory_path();
  const auto log = dir / ("sbench-toolchain-" + std::to_string(::getpid()) + "-" +
                          std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + ".log");
  for (const auto& [tool, argv] : {std::pair{toolchain.javac, std::vector<std::string>{toolchain.javac, "-version"}},
                                   std::pair{toolchain.java, std::vector<std::string>{toolchain.java, "-version"}}}) {
    const auto r = detail::run_process(argv, dir, log, std::chrono::seconds(60));
    if (r.spawn_failed || r.timed_out || r.exit_code != 0) {
      std::error_code ec;
      fs::remove(log, ec);
      throw ConfigError("Java toolchain unavailable: '" + tool + " -version' failed" +
                        (r.output.empty() ? std::string() : ": " + r.output));
    }
  }
  std::error_code ec;
  fs::remove(log, ec);
}

OutcomeLabel evaluate_functionality(std::string_view candidate, const Task& task, const ExecOptions& options,
                                    std::string_view scratch_tag) {
  const auto deadline = steady_clock::now() + std::chrono::seconds(options.budget_s);
  if (only_whitespace(candidate)) {
    return OutcomeLabel{OutcomeKind::CompileError, "empty candidate", CompileErrorCategory::non_code_output};
  }

  const auto classes = parse_compilation_unit(candidate);
  std::optional<std::string_view> expected;
  if (!task.expected_class_name.empty()) expected = task.expected_class_name;
  const auto primary = select_primary_class(classes, expected);

  std::string candidate_class = public_class_name(candidate).value_or(
      primary ? primary->class_name : (task.expected_class_name.empty() ? "Solution" : task.expected_class_name));
  const std::string entry_class = public_class_name(task.test_code).value_or("Main");
  if (candidate_class == entry_class) {
    return compile_error("candidate declares the test entry class " + entry_class, candidate);
  }

  std::string test_code = task.test_code;
  if (options.test_adaptation && primary) {
    const auto report = evaluate_predicates(*primary);
    if (report.private_constructor) {
      test_code = adapt_test_code(test_code, primary->class_name,
                                  global_access_point_name(*primary).value_or("getInstance"));
    }
  }

  ScratchDir scratch(options.workdir / sanitize(options.run_id) / sanitize(task.task_id) / sanitize(scratch_tag),
                     options.keep_scratch);
  try {
    std::error_code ec;
    fs::remove_all(scratch.path(), ec);
    fs::create_directories(scratch.path() / "classes");
    if (!write_file(scratch.path() / (candidate_class + ".java"), candidate) ||
        !write_file(scratch.path() / (entry_class + ".java"), test_code)) {
      return label(OutcomeKind::Aborted, "cannot write scratch sources in " + scratch.path().string());
    }
  } catch (const fs::filesystem_error& e) {
    return label(OutcomeKind::Aborted, std::string("scratch directory: ") + e.what());
  }

  const auto compile = detail::run_process(
      {options.toolchain.javac, "-encoding", "UTF-8", "-nowarn", "-d", "classes", candidate_class + ".java",
       entry_class + ".java"},
      scratch.path(), scratch.path() / "javac.log", remaining(deadline));
  if (compile.spawn_failed) return label(OutcomeKind::Aborted, compile.output);
  if (compile.timed_out) return label(OutcomeKind::Timeout, "compilation exceeded the time budget");
  if (compile.exit_code != 0) return compile_error(compile.output, candidate);

  const auto run = detail::run_process({options.toolchain.java, "-cp", "classes", entry_class}, scratch.path(),
                                       scratch.path() / "java.log", remaining(deadline));
  if (run.spawn_failed) return label(OutcomeKind::Aborted, run.output);
  if (run.timed_out) return label(OutcomeKind::Timeout, "test run exceeded the time budget");
  if (run.exit_code == 0) return label(OutcomeKind::Pass, run.output);
  return label(OutcomeKind::TestFail, "exit code " + std::to_string(run.exit_code) + "\n" + run.output);
}

JavaEvaluator::JavaEvaluator(ExecOptions options, int workers)
    : options_(std::move(options)), slots_(std::max(1, workers)) {
  check_toolchain(options_.toolchain);
}

OutcomeLabel JavaEvaluator::evaluate(const RunRecord& record, const Task& task) {
  slots_.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{slots_};
  const auto tag = sanitize_model_id(record.model_id) + "__" + std::string(to_string(record.strategy));
  return evaluate_functionality(record.selected_candidate, task, options_, tag);
}

ScriptedEvaluator::ScriptedEvaluator(Table outcomes) : outcomes_(std::move(outcomes)) {
  for (const auto& [strategy, by_task] : outcomes_) {
    for (const auto& [task, value] : by_task) {
      const auto kind_text = std::string_view(value).substr(0, value.find(':'));
      const auto kind = parse_outcome_kind(kind_text);
      if (!kind) throw ConfigError("scripted outcome for " + strategy + "/" + task + ": unknown kind '" + value + "'");
      if (const auto colon = value.find(':'); colon != std::string::npos) {
        if (*kind != OutcomeKind::CompileError ||
            !parse_compile_error_category(std::string_view(value).substr(colon + 1))) {
          throw ConfigError("scripted outcome for " + strategy + "/" + task + ": bad category in '" + value + "'");
        }
      }
    }
  }
}

OutcomeLabel ScriptedEvaluator::evaluate(const RunRecord& record, const Task& task) {
  const std::string strategy(to_string(record.strategy));
  const std::string* found = nullptr;
  for (const auto* s : {&strategy, static_cast<const std::string*>(nullptr)}) {
    const auto sit = outcomes_.find(s ? *s : "*");
    if (sit == outcomes_.end()) continue;
    for (const auto& key : {task.task_id, std::string("*")}) {
      const auto tit = sit->second.find(key);
      if (tit != sit->second.end()) {
        found = &tit->second;
        break;
      }
    }
    if (found) break;
  }
  if (!found) return label(OutcomeKind::Aborted, "no scripted outcome for " + strategy + "/" + task.task_id);

  const auto colon = found->find(':');
  const auto kind = *parse_outcome_kind(std::string_view(*found).substr(0, colon));
  OutcomeLabel out{kind, "scripted", std::nullopt};
  if (kind == OutcomeKind::CompileError) {
    out.compile_error = colon == std::string::npos
                            ? classify_compile_error("", record.selected_candidate)
                            : *parse_compile_error_category(std::string_view(*found).substr(colon + 1));
  }
  return out;
}

}  // namespace sbench
