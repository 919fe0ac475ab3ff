#pragma once

// Prompting protocols: the role-only baseline and four Singleton-guiding
// strategies, run as a bounded generate/check/feedback loop per task.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbench/dataset.hpp"
#include "sbench/llm_gateway.hpp"
#include "sbench/outcome.hpp"
#include "sbench/pattern_checker.hpp"

namespace sbench {

inline constexpr std::string_view kRolePrompt =
    "You are a Java programmer. You respond with the code in Java to solve the task. No comments or explanations";
inline constexpr std::string_view kInstructPrefix =
    "The primary class in the following task should follow the singleton design pattern.";
inline constexpr std::string_view kInstructFeedbackPrefix =
    "Make sure that the primary class in the following code follows the singleton design pattern. ";
inline constexpr std::string_view kBinaryFeedbackPrefix =
    "The following code does not include a correctly formatted Singleton class: ";
inline constexpr std::string_view kBinaryFeedbackSuffix = ". Please correct the code and return the complete code.";
inline constexpr std::string_view kPredicateFeedbackMiddle = ". It failed the following checks ";
inline constexpr std::string_view kPredicateFeedbackSuffix = ". Please correct the code and return the complete code";
inline constexpr std::string_view kExemplarHeader = "Examples of correctly implemented Singleton classes:";
inline constexpr std::string_view kFailedChecksSeparator = "; ";

enum class StrategyKind { baseline, instruct, binary_feedback, predicate_feedback, fewshot_feedback };

inline constexpr std::array<StrategyKind, 5> kAllStrategyKinds = {
    StrategyKind::baseline, StrategyKind::instruct, StrategyKind::binary_feedback,
    StrategyKind::predicate_feedback, StrategyKind::fewshot_feedback,
};

std::string_view to_string(StrategyKind kind);
std::optional<StrategyKind> parse_strategy_kind(std::string_view text);

/// The two shipped few-shot exemplars (eager and lazy initialisation).
const std::array<std::string_view, 2>& default_exemplars();

struct Strategy {
  StrategyKind kind = StrategyKind::baseline;
  int max_iterations = 10;
  std::vector<std::string> exemplars;  // exactly two for fewshot_feedback, else empty

  /// Validated construction. Baseline is forced to one iteration; few-shot
  /// falls back to the shipped exemplars when none are given.
  static Strategy make(StrategyKind kind, int max_iterations = 10, std::vector<std::string> exemplars = {});
};

struct IterationRecord {
  int index = 1;
  std::string prompt_sent;
  std::string raw_response;
  std::string extracted_code;
  PredicateReport predicate_report;
  bool conforming = false;

  bool operator==(const IterationRecord&) const = default;
};

struct RunRecord {
  std::string model_id;
  StrategyKind strategy = StrategyKind::baseline;
  std::string task_id;
  std::vector<IterationRecord> iterations;
  std::string selected_candidate;
  int selected_iteration = 0;  // 0 when no iteration completed
  double singleton_score = 0.0;
  PredicateReport selected_report;
  std::optional<OutcomeLabel> functional_outcome;
  std::optional<std::string> error;  // gateway failure that aborted the run
  std::int64_t wall_time_ms = 0;
  std::string config_digest;

  bool operator==(const RunRecord&) const = default;
};

/// System role message plus the strategy's opening user message.
std::vector<ChatMessage> initial_prompt(const Strategy& strategy, const Task& task);

/// Interior of the longest fenced block, or the whole response when unfenced.
std::string extract_code(std::string_view raw_response);

/// Re-prompt after a nonconforming candidate. Throws std::logic_error for a
/// conforming report or the baseline strategy.
ChatMessage feedback_prompt(const Strategy& strategy, std::string_view candidate, const PredicateReport& report);

/// Checks `code` the way the loop does: primary class by expected name, else
/// the first class, else the all-false report.
PredicateReport check_candidate(std::string_view code, std::string_view expected_class_name);

/// Runs the protocol for one task. Gateway failures end the run with an
/// Aborted outcome instead of propagating.
RunRecord run_task(ChatModel& model, const Strategy& strategy, const Task& task, std::string_view config_digest = {});

}  // namespace sbench
