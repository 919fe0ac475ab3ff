#include "sbench/run_store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sbench/error.hpp"
#include "sbench/records.hpp"
#include "sbench/run_config.hpp"

namespace sbench {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kConfigFile = "config.json";
constexpr const char* kRecordsDir = "records";
constexpr const char* kSummaryFile = "summary.json";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw StoreError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw StoreError("cannot write " + path.string() + ": " + ec.message());
}

}  // namespace

std::string sanitize_model_id(std::string_view model_id) {
  std::string out(model_id);
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '_' || c == '-';
    if (!ok) c = '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

RunStore::RunStore(fs::path root, json snapshot)
    : root_(std::move(root)), snapshot_(std::move(snapshot)), map_mu_(std::make_unique<std::mutex>()) {
  digest_ = snapshot_.value("config_digest", "");
}

RunStore::RunStore(RunStore&&) noexcept = default;
RunStore& RunStore::operator=(RunStore&&) noexcept = default;
RunStore::~RunStore() = default;

bool RunStore::exists(const fs::path& root) { return fs::exists(root / kConfigFile); }

RunStore RunStore::create(const fs::path& root, json snapshot) {
  if (exists(root)) throw StoreError("a run store already exists at " + root.string());
  std::error_code ec;
  fs::create_directories(root / kRecordsDir, ec);
  if (ec) throw StoreError("cannot create " + (root / kRecordsDir).string() + ": " + ec.message());
  snapshot["config_digest"] = sbench::config_digest(snapshot);
  write_file(root / kConfigFile, snapshot.dump(2) + "\n");
  return RunStore(root, std::move(snapshot));
}

RunStore RunStore::open(const fs::path& root) {
  const auto config_path = root / kConfigFile;
  if (!fs::exists(config_path)) throw StoreError("no run store at " + root.string() + " (missing " + config_path.string() + ")");
  json snapshot;
  try {
    snapshot = json::parse(read_file(config_path));
  } catch (const json::parse_error& e) {
    throw StoreError(config_path.string() + ": " + e.what());
  }
  if (!snapshot.is_object() || !snapshot.contains("config_digest") || !snapshot["config_digest"].is_string()) {
    throw StoreError(config_path.string() + ": missing config_digest");
  }
  if (sbench::config_digest(snapshot) != snapshot["config_digest"].get<std::string>()) {
    throw StoreError(config_path.string() + ": config_digest does not match the snapshot");
  }
  std::error_code ec;
  fs::create_directories(root / kRecordsDir, ec);
  return RunStore(root, std::move(snapshot));
}

fs::path RunStore::records_path(std::string_view model_id, StrategyKind strategy) const {
  return root_ / kRecordsDir / (sanitize_model_id(model_id) + "__" + std::string(to_string(strategy)) + ".jsonl");
}

std::mutex& RunStore::file_mutex(const fs::path& path) {
  std::lock_guard lock(*map_mu_);
  auto& slot = file_mu_[path];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

std::set<std::string> RunStore::completed_tasks(std::string_view model_id, StrategyKind strategy) {
  const auto path = records_path(model_id, strategy);
  std::lock_guard lock(file_mutex(path));
  std::set<std::string> done;
  if (!fs::exists(path)) return done;
  const auto text = read_file(path);
  const auto last_newline = text.rfind('\n');
  const std::size_t complete = last_newline == std::string::npos ? 0 : last_newline + 1;
  if (complete != text.size()) fs::resize_file(path, complete);

  std::istringstream lines(text.substr(0, complete));
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      done.insert(j.at("task_id").get<std::string>());
    } catch (const json::exception& e) {
      throw StoreError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return done;
}

void RunStore::append(const RunRecord& record) {
  const auto path = records_path(record.model_id, record.strategy);
  const std::string line = json(record).dump() + "\n";
  std::lock_guard lock(file_mutex(path));
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw StoreError("cannot append to " + path.string());
  out << line;
  if (!out.flush()) throw StoreError("cannot append to " + path.string());
}

std::vector<RunRecord> RunStore::read_records() const {
  std::vector<fs::path> files;
  const auto dir = root_ / kRecordsDir;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<RunRecord> records;
  for (const auto& path : files) {
    const auto text = read_file(path);
    std::size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
      const auto end = text.find('\n', pos);
      if (end == std::string::npos) break;  // unterminated tail of an interrupted write
      ++line_no;
      const std::string_view line(text.data() + pos, end - pos);
      pos = end + 1;
      if (line.empty()) continue;
      try {
        records.push_back(json::parse(line).get<RunRecord>());
      } catch (const std::exception& e) {
        throw StoreError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  return records;
}

void RunStore::write_summary(const json& summary) const {
  write_file(root_ / kSummaryFile, summary.dump(2) + "\n");
}

}  // namespace sbench
