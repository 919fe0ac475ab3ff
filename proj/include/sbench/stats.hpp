#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "sbench/guidance.hpp"

namespace sbench {

/// Paired pass/fail counts over tasks shared by a baseline arm and a strategy arm.
struct PairedOutcomes {
  int both_pass = 0;           // a
  int baseline_only_pass = 0;  // b
  int strategy_only_pass = 0;  // c
  int both_fail = 0;           // d

  int total() const { return both_pass + baseline_only_pass + strategy_only_pass + both_fail; }
};

enum class McNemarMethod { exact_binomial, chi_square_cc };

std::string_view to_string(McNemarMethod method);
std::optional<McNemarMethod> parse_mcnemar_method(std::string_view text);

struct McNemarResult {
  int b = 0;
  int c = 0;
  std::optional<double> statistic;  // absent for the exact method
  double p_value = 1.0;
  McNemarMethod method = McNemarMethod::exact_binomial;
  std::string stars;

  bool operator==(const McNemarResult&) const = default;
};

/// Discordant totals below this use the exact binomial test.
inline constexpr int kExactMcNemarLimit = 25;

/// "***" for p < 0.001, "**" for p < 0.01, "*" for p < 0.05, else "".
std::string significance_stars(double p_value);

/// Two-sided exact binomial p-value for `min_count` successes out of n at p = 1/2.
double exact_binomial_two_sided(int b, int c);

/// Upper tail of the chi-square distribution with one degree of freedom.
double chi_square_1dof_survival(double statistic);

McNemarResult mcnemar(const PairedOutcomes& pairs);

/// Percentage of records whose functional outcome is Pass.
double pass_at_1(std::span<const RunRecord> records);

double delta_pp(double strategy_rate, double baseline_rate);

/// Pairs records by task_id. Tasks missing from either arm, or Aborted in
/// either arm, are dropped; `excluded` receives the count of dropped tasks.
PairedOutcomes pair_outcomes(std::span<const RunRecord> baseline, std::span<const RunRecord> strategy,
                             int* excluded = nullptr);

struct PredicateCounts {
  int private_constructor = 0;
  int instance_field = 0;
  int global_access_point = 0;
  int total = 0;

  bool operator==(const PredicateCounts&) const = default;
};

/// Fulfilled-predicate counts over the selected candidates.
PredicateCounts predicate_counts(std::span<const RunRecord> records);

/// Mean singleton_score of the records; 0 for an empty span.
double average_singleton_score(std::span<const RunRecord> records);

}  // namespace sbench
