#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace sbench {

enum class OutcomeKind { Pass, TestFail, CompileError, Timeout, Aborted };

enum class CompileErrorCategory { missing_external_library, non_code_output, other_compile_error };

std::string_view to_string(OutcomeKind kind);
std::optional<OutcomeKind> parse_outcome_kind(std::string_view text);
std::string_view to_string(CompileErrorCategory category);
std::optional<CompileErrorCategory> parse_compile_error_category(std::string_view text);

/// Functional verdict for one selected candidate.
struct OutcomeLabel {
  OutcomeKind kind = OutcomeKind::Aborted;
  std::string detail;
  /// Set only for CompileError.
  std::optional<CompileErrorCategory> compile_error;

  bool operator==(const OutcomeLabel&) const = default;
};

}  // namespace sbench
