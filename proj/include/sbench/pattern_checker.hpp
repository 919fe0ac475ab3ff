#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbench/source_model.hpp"

namespace sbench {

inline constexpr std::string_view kPrivateConstructorFailure =
    "Private Constructor: the class must have at least one constructor and all constructors must be private.";
inline constexpr std::string_view kInstanceFieldFailure =
    "Instance Field: the class must have a private static field of its own type.";
inline constexpr std::string_view kGlobalAccessPointFailure =
    "Global Access Point: the class must have a public static method returning its own type.";

/// Verdicts for the three Singleton predicates of one class.
struct PredicateReport {
  bool private_constructor = false;
  bool instance_field = false;
  bool global_access_point = false;
  /// One fixed sentence per false predicate, in predicate order.
  std::vector<std::string> failed_checks;

  bool is_singleton() const { return private_constructor && instance_field && global_access_point; }
  int fulfilled() const {
    return int{private_constructor} + int{instance_field} + int{global_access_point};
  }

  bool operator==(const PredicateReport&) const = default;
};

/// Percentage in [0, 100]; a single class scores a multiple of 100/3.
struct SingletonScore {
  double value = 0.0;
};

/// Builds a report from raw verdicts, filling failed_checks consistently.
PredicateReport make_report(bool private_constructor, bool instance_field, bool global_access_point);

PredicateReport evaluate_predicates(const ClassModel& cls);

/// Parses `source`, picks the primary class and evaluates it. Text without an
/// extractable class gets the all-false report.
PredicateReport evaluate_source(std::string_view source, std::optional<std::string_view> expected_class = {});

SingletonScore singleton_score(const PredicateReport& report);

/// Mean Singleton Score of a corpus. Throws sbench::Error on an empty list.
double corpus_score(std::span<const PredicateReport> reports);

/// Name of the first public static method returning the class type, if any.
std::optional<std::string> global_access_point_name(const ClassModel& cls);

}  // namespace sbench
