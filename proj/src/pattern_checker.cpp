#include "sbench/pattern_checker.hpp"

#include <algorithm>
#include <numeric>

#include "sbench/error.hpp"

namespace sbench {
namespace {

bool is_accessor(const MemberModel& m, std::string_view class_name) {
  return m.member_kind == MemberKind::method && m.declared_type == class_name &&
         m.modifiers.has_all({Modifier::public_, Modifier::static_});
}

}  // namespace

PredicateReport make_report(bool private_constructor, bool instance_field, bool global_access_point) {
  PredicateReport r;
  r.private_constructor = private_constructor;
  r.instance_field = instance_field;
  r.global_access_point = global_access_point;
  if (!private_constructor) r.failed_checks.emplace_back(kPrivateConstructorFailure);
  if (!instance_field) r.failed_checks.emplace_back(kInstanceFieldFailure);
  if (!global_access_point) r.failed_checks.emplace_back(kGlobalAccessPointFailure);
  return r;
}

PredicateReport evaluate_predicates(const ClassModel& cls) {
  const auto& members = cls.members;
  const auto is_ctor = [](const MemberModel& m) { return m.member_kind == MemberKind::constructor; };

  // An undeclared constructor is the implicit public one.
  const bool private_constructor =
      std::any_of(members.begin(), members.end(), is_ctor) &&
      std::all_of(members.begin(), members.end(), [&](const MemberModel& m) {
        return !is_ctor(m) || m.modifiers.has(Modifier::private_);
      });

  const bool instance_field = std::any_of(members.begin(), members.end(), [&](const MemberModel& m) {
    return m.member_kind == MemberKind::field && m.declared_type == cls.class_name &&
           m.modifiers.has_all({Modifier::private_, Modifier::static_});
  });

  const bool global_access_point = std::any_of(
      members.begin(), members.end(), [&](const MemberModel& m) { return is_accessor(m, cls.class_name); });

  return make_report(private_constructor, instance_field, global_access_point);
}

PredicateReport evaluate_source(std::string_view source, std::optional<std::string_view> expected_class) {
  const auto classes = parse_compilation_unit(source);
  const auto primary = select_primary_class(classes, expected_class);
  return primary ? evaluate_predicates(*primary) : make_report(false, false, false);
}

SingletonScore singleton_score(const PredicateReport& report) {
  return {100.0 * report.fulfilled() / 3.0};
}

double corpus_score(std::span<const PredicateReport> reports) {
  if (reports.empty()) throw Error("no instances to average");
  const double total = std::accumulate(reports.begin(), reports.end(), 0.0,
                                       [](double acc, const PredicateReport& r) {
                                         return acc + singleton_score(r).value;
                                       });
  return total / static_cast<double>(reports.size());
}

std::optional<std::string> global_access_point_name(const ClassModel& cls) {
  for (const auto& m : cls.members) {
    if (is_accessor(m, cls.class_name)) return m.name;
  }
  return std::nullopt;
}

}  // namespace sbench
