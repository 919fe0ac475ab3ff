#include "sbench/guidance.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace sbench {
namespace {

std::string exemplar_block(const std::vector<std::string>& exemplars) {
  std::string out = "\n\n";
  out += kExemplarHeader;
  for (const auto& ex : exemplars) {
    out += "\n\n";
    out += ex;
  }
  return out;
}

std::string join_failed_checks(const PredicateReport& report) {
  std::string out;
  for (std::size_t i = 0; i < report.failed_checks.size(); ++i) {
    if (i > 0) out += kFailedChecksSeparator;
    out += report.failed_checks[i];
  }
  return out;
}

std::string_view strip_trailing_newline(std::string_view s) {
  if (!s.empty() && s.back() == '\n') s.remove_suffix(1);
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::baseline: return "baseline";
    case StrategyKind::instruct: return "instruct";
    case StrategyKind::binary_feedback: return "binary_feedback";
    case StrategyKind::predicate_feedback: return "predicate_feedback";
    case StrategyKind::fewshot_feedback: return "fewshot_feedback";
  }
  return "baseline";
}

std::optional<StrategyKind> parse_strategy_kind(std::string_view text) {
  for (auto kind : kAllStrategyKinds) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

Strategy Strategy::make(StrategyKind kind, int max_iterations, std::vector<std::string> exemplars) {
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  Strategy s;
  s.kind = kind;
  s.max_iterations = kind == StrategyKind::baseline ? 1 : max_iterations;
  if (kind == StrategyKind::fewshot_feedback) {
    if (exemplars.empty()) {
      for (auto ex : default_exemplars()) exemplars.emplace_back(ex);
    }
    if (exemplars.size() != 2) throw ConfigError("fewshot_feedback needs exactly 2 exemplars");
    s.exemplars = std::move(exemplars);
  } else if (!exemplars.empty()) {
    throw ConfigError("exemplars are only used by fewshot_feedback");
  }
  return s;
}

std::vector<ChatMessage> initial_prompt(const Strategy& strategy, const Task& task) {
  std::vector<ChatMessage> messages;
  messages.push_back({Role::system, std::string(kRolePrompt)});
  if (strategy.kind == StrategyKind::baseline) {
    messages.push_back({Role::user, task.description});
    return messages;
  }
  std::string user(kInstructPrefix);
  user += task.description;
  if (strategy.kind == StrategyKind::fewshot_feedback) user += exemplar_block(strategy.exemplars);
  messages.push_back({Role::user, std::move(user)});
  return messages;
}

std::string extract_code(std::string_view raw) {
  constexpr std::string_view kFence = "```";
  std::optional<std::string_view> best;
  std::size_t pos = 0;
  while (true) {
    const auto open = raw.find(kFence, pos);
    if (open == std::string_view::npos) break;
    const auto after_open = open + kFence.size();
    const auto line_end = raw.find('\n', after_open);
    const auto inline_close = raw.find(kFence, after_open);

    std::string_view body;
    std::size_t next;
    if (inline_close != std::string_view::npos && (line_end == std::string_view::npos || inline_close < line_end)) {
      body = raw.substr(after_open, inline_close - after_open);
      next = inline_close + kFence.size();
    } else if (line_end == std::string_view::npos) {
      break;
    } else {
      // The rest of the opening line is the language tag.
      const auto start = line_end + 1;
      const auto close = raw.find(kFence, start);
      const auto stop = close == std::string_view::npos ? raw.size() : close;
      body = strip_trailing_newline(raw.substr(start, stop - start));
      next = close == std::string_view::npos ? raw.size() : close + kFence.size();
    }
    if (!best || body.size() > best->size()) best = body;
    pos = next;
  }
  return best ? std::string(*best) : std::string(raw);
}

ChatMessage feedback_prompt(const Strategy& strategy, std::string_view candidate, const PredicateReport& report) {
  if (report.is_singleton()) throw std::logic_error("feedback requested for a conforming candidate");
  std::string text;
  switch (strategy.kind) {
    case StrategyKind::baseline:
      throw std::logic_error("baseline strategy sends no feedback");
    case StrategyKind::instruct:
      text = kInstructFeedbackPrefix;
      text += candidate;
      break;
    case StrategyKind::binary_feedback:
      text = kBinaryFeedbackPrefix;
      text += candidate;
      text += kBinaryFeedbackSuffix;
      break;
    case StrategyKind::predicate_feedback:
    case StrategyKind::fewshot_feedback:
      text = kBinaryFeedbackPrefix;
      text += candidate;
      text += kPredicateFeedbackMiddle;
      text += join_failed_checks(report);
      text += kPredicateFeedbackSuffix;
      if (strategy.kind == StrategyKind::fewshot_feedback) text += exemplar_block(strategy.exemplars);
      break;
  }
  return {Role::user, std::move(text)};
}

PredicateReport check_candidate(std::string_view code, std::string_view expected_class_name) {
  std::optional<std::string_view> expected;
  if (!expected_class_name.empty()) expected = expected_class_name;
  return evaluate_source(code, expected);
}

RunRecord run_task(ChatModel& model, const Strategy& strategy, const Task& task, std::string_view config_digest) {
  const auto started = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.model_id = model.model_id();
  rec.strategy = strategy.kind;
  rec.task_id = task.task_id;
  rec.config_digest = std::string(config_digest);

  auto history = initial_prompt(strategy, task);
  std::string prompt = history.back().content;
  const int max_iterations = strategy.kind == StrategyKind::baseline ? 1 : strategy.max_iterations;

  for (int i = 1; i <= max_iterations; ++i) {
    ChatMessage reply;
    try {
      reply = model.complete(history);
    } catch (const Error& e) {
      rec.error = e.what();
      rec.functional_outcome = OutcomeLabel{OutcomeKind::Aborted, e.what(), std::nullopt};
      break;
    }
    IterationRecord it;
    it.index = i;
    it.prompt_sent = prompt;
    it.raw_response = reply.content;
    it.extracted_code = extract_code(reply.content);
    it.predicate_report = check_candidate(it.extracted_code, task.expected_class_name);
    it.conforming = it.predicate_report.is_singleton();
    history.push_back(std::move(reply));
    rec.iterations.push_back(it);

    if (strategy.kind == StrategyKind::baseline || it.conforming || i == max_iterations) break;
    auto feedback = feedback_prompt(strategy, it.extracted_code, it.predicate_report);
    prompt = feedback.content;
    history.push_back(std::move(feedback));
  }

  if (!rec.iterations.empty()) {
    const auto first_ok = std::find_if(rec.iterations.begin(), rec.iterations.end(),
                                       [](const IterationRecord& r) { return r.conforming; });
    const auto& chosen = first_ok != rec.iterations.end() ? *first_ok : rec.iterations.back();
    rec.selected_candidate = chosen.extracted_code;
    rec.selected_iteration = chosen.index;
    rec.selected_report = chosen.predicate_report;
  } else {
    rec.selected_report = make_report(false, false, false);
  }
  rec.singleton_score = singleton_score(rec.selected_report).value;
  rec.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - started)
                         .count();
  return rec;
}

}  // namespace sbench
