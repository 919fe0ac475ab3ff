#pragma once

// Summary model built from stored records, and its text, CSV and JSON renderings.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "sbench/guidance.hpp"
#include "sbench/stats.hpp"

namespace sbench {

struct OutcomeBreakdown {
  int pass = 0;
  int test_fail = 0;
  int timeout = 0;
  int aborted = 0;
  int missing_external_library = 0;
  int non_code_output = 0;
  int other_compile_error = 0;
  int unevaluated = 0;  // records without a functional outcome

  int compile_error() const { return missing_external_library + non_code_output + other_compile_error; }
  int total() const { return pass + test_fail + timeout + aborted + compile_error() + unevaluated; }
  bool operator==(const OutcomeBreakdown&) const = default;
};

struct StrategySummary {
  StrategyKind strategy = StrategyKind::baseline;
  int n = 0;
  int passes = 0;
  double pass_rate = 0.0;
  /// Versus the same model's baseline; absent for the baseline itself or
  /// when the model has no baseline records.
  std::optional<double> delta_pp;
  std::optional<McNemarResult> mcnemar;
  int paired_n = 0;
  int paired_excluded = 0;
  double avg_singleton_score = 0.0;
  PredicateCounts predicates;
  OutcomeBreakdown outcomes;

  bool operator==(const StrategySummary&) const = default;
};

struct ModelSummary {
  std::string model_id;
  std::vector<StrategySummary> strategies;  // canonical strategy order

  const StrategySummary* find(StrategyKind kind) const;
  bool operator==(const ModelSummary&) const = default;
};

struct Summary {
  std::string run_id;
  std::string config_digest;
  std::vector<StrategyKind> strategies;  // columns present in any model, canonical order
  std::vector<ModelSummary> models;       // descending baseline pass rate, then model_id

  bool operator==(const Summary&) const = default;
};

Summary summarize(std::span<const RunRecord> records, std::string run_id = {}, std::string config_digest = {});

nlohmann::json summary_to_json(const Summary& summary);
/// Throws sbench::Error when the document is not a summary.
Summary summary_from_json(const nlohmann::json& doc);

std::string render_text(const Summary& summary);
std::string render_csv(const Summary& summary);
std::string render_json(const Summary& summary);

/// "+25.0", "-20.0", or "0.0" when the rounded value is zero.
std::string format_delta(double delta);

}  // namespace sbench
