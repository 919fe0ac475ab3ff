// Python bindings. Structured results cross the boundary as JSON text and
// are decoded by the package's __init__.py.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include "sbench/guidance.hpp"
#include "sbench/pattern_checker.hpp"
#include "sbench/records.hpp"
#include "sbench/report.hpp"
#include "sbench/run_store.hpp"
#include "sbench/stats.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

sbench::StrategyKind strategy_kind(const std::string& name) {
  const auto kind = sbench::parse_strategy_kind(name);
  if (!kind) throw py::value_error("unknown strategy '" + name + "'");
  return *kind;
}

sbench::Task task_from(const std::string& description, const std::string& expected_class_name) {
  sbench::Task task;
  task.task_id = "adhoc";
  task.description = description;
  task.expected_class_name = expected_class_name;
  return task;
}

std::vector<std::pair<std::string, std::string>> messages(const std::vector<sbench::ChatMessage>& history) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& m : history) out.emplace_back(std::string(sbench::to_string(m.role)), m.content);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Singleton conformance checking, prompting protocols and statistics";

  m.def(
      "parse_classes",
      [](const std::string& source) {
        std::vector<std::string> warnings;
        const auto classes = sbench::parse_compilation_unit(source, &warnings);
        return json{{"classes", classes}, {"warnings", warnings}}.dump();
      },
      py::arg("source"));

  m.def(
      "check_source",
      [](const std::string& source, const std::string& expected_class) {
        const auto report = sbench::check_candidate(source, expected_class);
        json j = report;
        j["singleton_score"] = sbench::singleton_score(report).value;
        return j.dump();
      },
      py::arg("source"), py::arg("expected_class") = "");

  m.def(
      "singleton_score",
      [](bool private_constructor, bool instance_field, bool global_access_point) {
        return sbench::singleton_score(sbench::make_report(private_constructor, instance_field, global_access_point))
            .value;
      },
      py::arg("private_constructor"), py::arg("instance_field"), py::arg("global_access_point"));

  m.def("extract_code", [](const std::string& raw) { return sbench::extract_code(raw); }, py::arg("raw_response"));

  m.def(
      "initial_prompt",
      [](const std::string& strategy, const std::string& description, const std::string& expected_class_name) {
        const auto s = sbench::Strategy::make(strategy_kind(strategy));
        return messages(sbench::initial_prompt(s, task_from(description, expected_class_name)));
      },
      py::arg("strategy"), py::arg("description"), py::arg("expected_class_name") = "");

  m.def(
      "feedback_prompt",
      [](const std::string& strategy, const std::string& candidate, bool private_constructor, bool instance_field,
         bool global_access_point) {
        const auto s = sbench::Strategy::make(strategy_kind(strategy));
        const auto report = sbench::make_report(private_constructor, instance_field, global_access_point);
        return sbench::feedback_prompt(s, candidate, report).content;
      },
      py::arg("strategy"), py::arg("candidate"), py::arg("private_constructor"), py::arg("instance_field"),
      py::arg("global_access_point"));

  m.def(
      "mcnemar",
      [](int b, int c) {
        sbench::PairedOutcomes pairs;
        pairs.baseline_only_pass = b;
        pairs.strategy_only_pass = c;
        return json(sbench::mcnemar(pairs)).dump();
      },
      py::arg("b"), py::arg("c"));

  m.def("significance_stars", &sbench::significance_stars, py::arg("p_value"));

  m.def(
      "render_report",
      [](const std::string& store, const std::string& format) {
        const auto opened = sbench::RunStore::open(store);
        const auto records = opened.read_records();
        const auto summary = sbench::summarize(records, opened.snapshot().value("run_id", ""), opened.config_digest());
        if (format == "text") return sbench::render_text(summary);
        if (format == "csv") return sbench::render_csv(summary);
        if (format == "json") return sbench::render_json(summary);
        throw py::value_error("format must be text, csv or json");
      },
      py::arg("store"), py::arg("format") = "text");

  m.attr("ROLE_PROMPT") = std::string(sbench::kRolePrompt);
  py::list strategies;
  for (auto k : sbench::kAllStrategyKinds) strategies.append(std::string(sbench::to_string(k)));
  m.attr("STRATEGIES") = strategies;

  py::register_exception<sbench::Error>(m, "Error", PyExc_RuntimeError);
}
