#include "sbench/dataset.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "sbench/digest.hpp"
#include "sbench/error.hpp"
#include "sbench/source_model.hpp"

namespace sbench {
namespace {

using json = nlohmann::json;

std::string line_error(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

std::optional<std::string> optional_string(const json& obj, const std::string& key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DatasetError(line_error(line, "field '" + key + "' is not a string"));
  return it->get<std::string>();
}

std::string required_string(const json& obj, const std::string& key, std::size_t line) {
  auto value = optional_string(obj, key, line);
  if (!value) throw DatasetError(line_error(line, "missing mandatory field '" + key + "'"));
  return std::move(*value);
}

}  // namespace

const Task* TaskSet::find(std::string_view task_id) const {
  for (const auto& t : tasks) {
    if (t.task_id == task_id) return &t;
  }
  return nullptr;
}

TaskSet parse_tasks(std::string_view bytes, const FieldMap& fields) {
  TaskSet set;
  set.source_digest = sha256_hex(bytes);
  std::set<std::string> seen;

  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin < bytes.size()) {
    auto end = bytes.find('\n', begin);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(begin, end - begin);
    begin = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DatasetError(line_error(line_no, std::string("invalid JSON: ") + e.what()));
    }
    if (!obj.is_object()) throw DatasetError(line_error(line_no, "not a JSON object"));

    Task task;
    task.task_id = required_string(obj, fields.task_id, line_no);

    std::string language;
    if (auto tag = optional_string(obj, fields.language, line_no)) {
      language = *tag;
    } else if (const auto slash = task.task_id.find('/'); slash != std::string::npos) {
      language = task.task_id.substr(0, slash);
    }
    if (!language.empty() && language != "Java" && language != "java") {
      set.warnings.push_back(line_error(line_no, "skipping non-Java task " + task.task_id));
      continue;
    }

    task.description = required_string(obj, fields.prompt, line_no);
    task.test_code = required_string(obj, fields.test, line_no);
    if (task.test_code.empty()) throw DatasetError(line_error(line_no, "empty test code"));
    task.declaration = optional_string(obj, fields.declaration, line_no).value_or("");
    task.example_test = optional_string(obj, fields.example_test, line_no);
    task.canonical_solution = optional_string(obj, fields.canonical_solution, line_no);

    const auto& stub = task.declaration.empty() ? task.description : task.declaration;
    const auto classes = parse_compilation_unit(stub);
    if (!classes.empty()) {
      task.expected_class_name = classes.front().class_name;
    } else {
      set.warnings.push_back(line_error(line_no, "no class declaration found for " + task.task_id));
    }

    if (!seen.insert(task.task_id).second) {
      throw DatasetError(line_error(line_no, "duplicate task_id '" + task.task_id + "'"));
    }
    set.tasks.push_back(std::move(task));
  }
  if (set.tasks.empty()) set.warnings.emplace_back("dataset contains no tasks");
  return set;
}

TaskSet load_tasks(const std::filesystem::path& path, const FieldMap& fields) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot read dataset file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw DatasetError("error reading dataset file " + path.string());
  return parse_tasks(buf.str(), fields);
}

}  // namespace sbench
