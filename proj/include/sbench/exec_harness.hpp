#pragma once

// Functional evaluation of candidates: compile the candidate together with the
// task's test harness using an external Java toolchain and run it.

#include <filesystem>
#include <map>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>

#include "sbench/dataset.hpp"
#include "sbench/guidance.hpp"
#include "sbench/outcome.hpp"

namespace sbench {

struct Toolchain {
  std::string javac = "javac";
  std::string java = "java";
};

struct ExecOptions {
  Toolchain toolchain;
  int budget_s = 30;  // compile plus run
  /// Rewrite `new C()` in the test to `C.<accessor>()` for private-constructor candidates.
  bool test_adaptation = false;
  std::filesystem::path workdir = std::filesystem::temp_directory_path() / "sbench-work";
  std::string run_id = "adhoc";
  bool keep_scratch = false;
};

/// Throws ConfigError unless both javac and java start and report a version.
void check_toolchain(const Toolchain& toolchain);
bool toolchain_available(const Toolchain& toolchain) noexcept;

/// Scratch layout: <workdir>/<run_id>/<task_id>/<scratch_tag>/. Callers that
/// evaluate concurrently must pass distinct tags for the same task.
OutcomeLabel evaluate_functionality(std::string_view candidate, const Task& task, const ExecOptions& options,
                                    std::string_view scratch_tag = "eval");

CompileErrorCategory classify_compile_error(std::string_view diagnostics, std::string_view candidate);

/// Replaces instantiations `new <class_name>()` with `<class_name>.<accessor>()`.
std::string adapt_test_code(std::string_view test_code, std::string_view class_name, std::string_view accessor);

/// Name of the `public` top-level class in `source`, if one is declared.
std::optional<std::string> public_class_name(std::string_view source);

class FunctionalEvaluator {
 public:
  virtual ~FunctionalEvaluator() = default;
  virtual OutcomeLabel evaluate(const RunRecord& record, const Task& task) = 0;
};

/// Compiles and runs through the Java toolchain, at most `workers` at a time.
class JavaEvaluator final : public FunctionalEvaluator {
 public:
  JavaEvaluator(ExecOptions options, int workers);
  OutcomeLabel evaluate(const RunRecord& record, const Task& task) override;

 private:
  ExecOptions options_;
  std::counting_semaphore<> slots_;
};

/// Looks verdicts up by (strategy, task_id) with "*" wildcards, for offline
/// runs without a JDK. Values are "Pass", "TestFail", "Timeout", "Aborted",
/// "CompileError" or "CompileError:<category>".
class ScriptedEvaluator final : public FunctionalEvaluator {
 public:
  using Table = std::map<std::string, std::map<std::string, std::string>>;
  explicit ScriptedEvaluator(Table outcomes);
  OutcomeLabel evaluate(const RunRecord& record, const Task& task) override;

 private:
  Table outcomes_;
};

}  // namespace sbench
