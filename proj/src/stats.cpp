#include "sbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

namespace sbench {
namespace {

bool passed(const RunRecord& r) {
  return r.functional_outcome && r.functional_outcome->kind == OutcomeKind::Pass;
}

bool aborted(const RunRecord& r) {
  return !r.functional_outcome || r.functional_outcome->kind == OutcomeKind::Aborted;
}

}  // namespace

std::string_view to_string(McNemarMethod method) {
  return method == McNemarMethod::exact_binomial ? "exact_binomial" : "chi_square_cc";
}

std::optional<McNemarMethod> parse_mcnemar_method(std::string_view text) {
  if (text == "exact_binomial") return McNemarMethod::exact_binomial;
  if (text == "chi_square_cc") return McNemarMethod::chi_square_cc;
  return std::nullopt;
}

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

double exact_binomial_two_sided(int b, int c) {
  const int n = b + c;
  if (n == 0) return 1.0;
  const int k_max = std::min(b, c);
  double tail = 0.0;
  if (n <= 60) {
    // Exact integer binomial coefficients.
    unsigned long long coeff = 1;
    unsigned long long sum = 0;
    for (int k = 0; k <= k_max; ++k) {
      sum += coeff;
      coeff = coeff * static_cast<unsigned long long>(n - k) / static_cast<unsigned long long>(k + 1);
    }
    tail = std::ldexp(static_cast<double>(sum), -n);
  } else {
    const double log_half_n = n * std::log(0.5);
    for (int k = 0; k <= k_max; ++k) {
      tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + log_half_n);
    }
  }
  return std::min(1.0, 2.0 * tail);
}

double chi_square_1dof_survival(double statistic) {
  if (statistic <= 0.0) return 1.0;
  return std::erfc(std::sqrt(statistic / 2.0));
}

McNemarResult mcnemar(const PairedOutcomes& pairs) {
  McNemarResult r;
  r.b = pairs.baseline_only_pass;
  r.c = pairs.strategy_only_pass;
  const int n = r.b + r.c;
  if (n < kExactMcNemarLimit) {
    r.method = McNemarMethod::exact_binomial;
    r.p_value = exact_binomial_two_sided(r.b, r.c);
  } else {
    r.method = McNemarMethod::chi_square_cc;
    // Clamped at zero so equal discordant counts give p = 1.
    const double corrected = std::max(0, std::abs(r.b - r.c) - 1);
    r.statistic = corrected * corrected / n;
    r.p_value = chi_square_1dof_survival(*r.statistic);
  }
  r.stars = significance_stars(r.p_value);
  return r;
}

double pass_at_1(std::span<const RunRecord> records) {
  if (records.empty()) return 0.0;
  const auto passes = std::count_if(records.begin(), records.end(), passed);
  return 100.0 * static_cast<double>(passes) / static_cast<double>(records.size());
}

double delta_pp(double strategy_rate, double baseline_rate) { return strategy_rate - baseline_rate; }

PairedOutcomes pair_outcomes(std::span<const RunRecord> baseline, std::span<const RunRecord> strategy,
                             int* excluded) {
  std::map<std::string, const RunRecord*> base_by_task;
  for (const auto& r : baseline) base_by_task[r.task_id] = &r;

  std::set<std::string> strategy_tasks;
  for (const auto& s : strategy) strategy_tasks.insert(s.task_id);

  PairedOutcomes out;
  int dropped = 0;
  for (const auto& [task, _] : base_by_task) dropped += strategy_tasks.count(task) == 0;
  for (const auto& s : strategy) {
    const auto it = base_by_task.find(s.task_id);
    if (it == base_by_task.end()) {
      ++dropped;
      continue;
    }
    if (aborted(*it->second) || aborted(s)) {
      ++dropped;
      continue;
    }
    const bool bp = passed(*it->second);
    const bool sp = passed(s);
    if (bp && sp) ++out.both_pass;
    else if (bp) ++out.baseline_only_pass;
    else if (sp) ++out.strategy_only_pass;
    else ++out.both_fail;
  }
  if (excluded) *excluded = dropped;
  return out;
}

PredicateCounts predicate_counts(std::span<const RunRecord> records) {
  PredicateCounts counts;
  for (const auto& r : records) {
    counts.private_constructor += r.selected_report.private_constructor;
    counts.instance_field += r.selected_report.instance_field;
    counts.global_access_point += r.selected_report.global_access_point;
    ++counts.total;
  }
  return counts;
}

double average_singleton_score(std::span<const RunRecord> records) {
  if (records.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : records) sum += r.singleton_score;
  return sum / static_cast<double>(records.size());
}

}  // namespace sbench
