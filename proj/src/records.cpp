#include "sbench/records.hpp"

#include "sbench/error.hpp"

namespace sbench {

using nlohmann::json;

void to_json(json& j, const PredicateReport& r) {
  j = json{{"private_constructor", r.private_constructor},
           {"instance_field", r.instance_field},
           {"global_access_point", r.global_access_point},
           {"failed_checks", r.failed_checks}};
}

void from_json(const json& j, PredicateReport& r) {
  r = make_report(j.at("private_constructor").get<bool>(), j.at("instance_field").get<bool>(),
                  j.at("global_access_point").get<bool>());
}

void to_json(json& j, const OutcomeLabel& o) {
  j = json{{"kind", to_string(o.kind)}, {"detail", o.detail}};
  if (o.compile_error) j["compile_error_category"] = to_string(*o.compile_error);
}

void from_json(const json& j, OutcomeLabel& o) {
  const auto kind_text = j.at("kind").get<std::string>();
  const auto kind = parse_outcome_kind(kind_text);
  if (!kind) throw Error("unknown outcome kind '" + kind_text + "'");
  o.kind = *kind;
  o.detail = j.value("detail", "");
  o.compile_error.reset();
  if (const auto it = j.find("compile_error_category"); it != j.end() && !it->is_null()) {
    const auto text = it->get<std::string>();
    o.compile_error = parse_compile_error_category(text);
    if (!o.compile_error) throw Error("unknown compile error category '" + text + "'");
  }
}

void to_json(json& j, const IterationRecord& it) {
  j = json{{"index", it.index},
           {"prompt_sent", it.prompt_sent},
           {"raw_response", it.raw_response},
           {"extracted_code", it.extracted_code},
           {"predicate_report", it.predicate_report},
           {"conforming", it.conforming}};
}

void from_json(const json& j, IterationRecord& it) {
  it.index = j.at("index").get<int>();
  it.prompt_sent = j.at("prompt_sent").get<std::string>();
  it.raw_response = j.at("raw_response").get<std::string>();
  it.extracted_code = j.at("extracted_code").get<std::string>();
  it.predicate_report = j.at("predicate_report").get<PredicateReport>();
  it.conforming = j.at("conforming").get<bool>();
}

void to_json(json& j, const RunRecord& r) {
  j = json{{"model_id", r.model_id},
           {"strategy", to_string(r.strategy)},
           {"task_id", r.task_id},
           {"iterations", r.iterations},
           {"selected_candidate", r.selected_candidate},
           {"selected_iteration", r.selected_iteration},
           {"selected_report", r.selected_report},
           {"singleton_score", r.singleton_score},
           {"functional_outcome", r.functional_outcome ? json(*r.functional_outcome) : json(nullptr)},
           {"error", r.error ? json(*r.error) : json(nullptr)},
           {"wall_time_ms", r.wall_time_ms},
           {"config_digest", r.config_digest}};
}

void from_json(const json& j, RunRecord& r) {
  r.model_id = j.at("model_id").get<std::string>();
  const auto strategy = j.at("strategy").get<std::string>();
  const auto kind = parse_strategy_kind(strategy);
  if (!kind) throw Error("unknown strategy '" + strategy + "'");
  r.strategy = *kind;
  r.task_id = j.at("task_id").get<std::string>();
  r.iterations = j.at("iterations").get<std::vector<IterationRecord>>();
  r.selected_candidate = j.at("selected_candidate").get<std::string>();
  r.selected_iteration = j.at("selected_iteration").get<int>();
  r.selected_report = j.at("selected_report").get<PredicateReport>();
  r.singleton_score = j.at("singleton_score").get<double>();
  r.functional_outcome.reset();
  if (const auto& o = j.at("functional_outcome"); !o.is_null()) r.functional_outcome = o.get<OutcomeLabel>();
  r.error.reset();
  if (const auto it = j.find("error"); it != j.end() && !it->is_null()) r.error = it->get<std::string>();
  r.wall_time_ms = j.value("wall_time_ms", std::int64_t{0});
  r.config_digest = j.value("config_digest", "");
}

void to_json(json& j, const McNemarResult& m) {
  j = json{{"b", m.b},
           {"c", m.c},
           {"statistic", m.statistic ? json(*m.statistic) : json(nullptr)},
           {"p_value", m.p_value},
           {"method", to_string(m.method)},
           {"stars", m.stars}};
}

void from_json(const json& j, McNemarResult& m) {
  m.b = j.at("b").get<int>();
  m.c = j.at("c").get<int>();
  m.statistic.reset();
  if (const auto& s = j.at("statistic"); !s.is_null()) m.statistic = s.get<double>();
  m.p_value = j.at("p_value").get<double>();
  const auto method = parse_mcnemar_method(j.at("method").get<std::string>());
  if (!method) throw Error("unknown McNemar method");
  m.method = *method;
  m.stars = j.at("stars").get<std::string>();
}

void to_json(json& j, const PredicateCounts& c) {
  j = json{{"private_constructor", c.private_constructor},
           {"instance_field", c.instance_field},
           {"global_access_point", c.global_access_point},
           {"total", c.total}};
}

void from_json(const json& j, PredicateCounts& c) {
  c.private_constructor = j.at("private_constructor").get<int>();
  c.instance_field = j.at("instance_field").get<int>();
  c.global_access_point = j.at("global_access_point").get<int>();
  c.total = j.at("total").get<int>();
}

void to_json(json& j, const MemberModel& m) {
  json mods = json::array();
  for (auto mod : m.modifiers.to_vector()) mods.push_back(to_string(mod));
  j = json{{"member_kind", to_string(m.member_kind)},
           {"name", m.name},
           {"declared_type", m.declared_type},
           {"modifiers", std::move(mods)},
           {"nesting_depth", m.nesting_depth}};
}

void to_json(json& j, const ClassModel& c) {
  j = json{{"class_name", c.class_name},
           {"members", c.members},
           {"is_top_level", c.is_top_level},
           {"source_span", {c.source_span.begin, c.source_span.end}}};
}

}  // namespace sbench
