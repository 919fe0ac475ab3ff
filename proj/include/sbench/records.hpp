#pragma once

// JSON forms of persisted records. Field names are the on-disk schema of the
// run store and must stay stable.

#include "json.hpp"

#include "sbench/guidance.hpp"
#include "sbench/outcome.hpp"
#include "sbench/pattern_checker.hpp"
#include "sbench/source_model.hpp"
#include "sbench/stats.hpp"

namespace sbench {

void to_json(nlohmann::json& j, const PredicateReport& r);
void from_json(const nlohmann::json& j, PredicateReport& r);

void to_json(nlohmann::json& j, const OutcomeLabel& o);
void from_json(const nlohmann::json& j, OutcomeLabel& o);

void to_json(nlohmann::json& j, const IterationRecord& it);
void from_json(const nlohmann::json& j, IterationRecord& it);

void to_json(nlohmann::json& j, const RunRecord& r);
void from_json(const nlohmann::json& j, RunRecord& r);

void to_json(nlohmann::json& j, const McNemarResult& m);
void from_json(const nlohmann::json& j, McNemarResult& m);

void to_json(nlohmann::json& j, const PredicateCounts& c);
void from_json(const nlohmann::json& j, PredicateCounts& c);

void to_json(nlohmann::json& j, const MemberModel& m);
void to_json(nlohmann::json& j, const ClassModel& c);

}  // namespace sbench
