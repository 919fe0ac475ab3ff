// Acceptance checks. Prints one line per criterion: PASS, FAIL or NOT RUN.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"
#include "sbench/dataset.hpp"
#include "sbench/exec_harness.hpp"
#include "sbench/guidance.hpp"
#include "sbench/llm_gateway.hpp"
#include "sbench/pattern_checker.hpp"
#include "sbench/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sbench;

namespace {

const fs::path kFixtures = SBENCH_FIXTURES_DIR;
const fs::path kSource = SBENCH_SOURCE_DIR;
const std::string kCli = SBENCH_CLI_PATH;

enum class Verdict { pass, fail, not_run };

struct Outcome {
  Verdict verdict;
  std::string note;
};

// Collects failure messages for one criterion.
struct Checks {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  Outcome outcome(const std::string& ok_note) const {
    if (failures.empty()) return {Verdict::pass, ok_note};
    std::string msg = failures.front();
    if (failures.size() > 1) msg += fmt::format(" (+{} more)", failures.size() - 1);
    return {Verdict::fail, msg};
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CommandResult {
  int status = -1;
  std::string output;
};

CommandResult run_command(const std::string& cmd) {
  CommandResult r;
  FILE* pipe = ::popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

fs::path fresh_dir(const std::string& name) {
  std::mt19937_64 rng{std::random_device{}()};
  auto dir = fs::temp_directory_path() / fmt::format("sbench-accept-{}-{}", name, rng() % 1000000000ULL);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------

Outcome checker_fidelity() {
  Checks c;
  const auto labels = json::parse(slurp(kFixtures / "checker/labels.json"));
  std::vector<std::pair<std::string, std::string>> sources;
  for (const auto& [file, _] : labels.items()) sources.emplace_back(file, slurp(kFixtures / "checker" / file));
  c.expect(sources.size() >= 30, fmt::format("only {} labeled files", sources.size()));
  for (const auto* required : {"EnginePlain.java", "EngineSingleton.java", "EagerSingleton.java", "LazySynchronized.java",
                               "ProtectedConstructor.java", "NoConstructor.java", "ProseOnly.java"}) {
    c.expect(labels.contains(required), std::string("corpus lacks ") + required);
  }

  int matched = 0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& [file, src] : sources) {
    const auto& want = labels.at(file);
    const auto r = evaluate_source(src, want.at("class").get<std::string>());
    const bool ok = r.private_constructor == want.at("private_constructor").get<bool>() &&
                    r.instance_field == want.at("instance_field").get<bool>() &&
                    r.global_access_point == want.at("global_access_point").get<bool>();
    c.expect(ok, "mismatch on " + file);
    matched += ok;
  }
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(elapsed < 1.0, fmt::format("took {:.3f} s", elapsed));
  return c.outcome(fmt::format("{}/{} files match on all 3 predicates in {:.3f} s", matched, sources.size(), elapsed));
}

Outcome score_semantics() {
  Checks c;
  for (int mask = 0; mask < 8; ++mask) {
    const bool pc = mask & 1, inf = mask & 2, gap = mask & 4;
    const auto score = singleton_score(make_report(pc, inf, gap)).value;
    c.expect((score == 100.0) == (pc && inf && gap), fmt::format("combination {} gives score {}", mask, score));
    c.expect(score == 100.0 * (pc + inf + gap) / 3.0, fmt::format("combination {} gives score {}", mask, score));
  }
  return c.outcome("score is 100 exactly for the all-true combination among 8");
}

double brute_force_exact(int b, int c) {
  const int n = b + c;
  if (n == 0) return 1.0;
  const int k = std::min(b, c);
  unsigned long long tail = 0;
  for (unsigned long long mask = 0; mask < (1ULL << n); ++mask) tail += __builtin_popcountll(mask) <= k;
  return std::min(1.0, 2.0 * static_cast<double>(tail) / static_cast<double>(1ULL << n));
}

// Upper tail of chi-square(1) as 2 * integral of the normal density from sqrt(x).
double numeric_chi2_tail(double x) {
  const double z = std::sqrt(x);
  const int steps = 200000;
  const double hi = 40.0;
  const double h = (hi - z) / steps;
  auto phi = [](double t) { return std::exp(-t * t / 2) / std::sqrt(2 * M_PI); };
  double s = phi(z) + phi(hi);
  for (int i = 1; i < steps; ++i) s += (i % 2 ? 4 : 2) * phi(z + i * h);
  return 2.0 * s * h / 3.0;
}

Outcome mcnemar_correctness() {
  Checks c;
  double worst = 0;
  for (int n = 0; n <= 24; ++n) {
    for (int b = 0; b <= n; ++b) {
      const auto r = mcnemar(PairedOutcomes{0, b, n - b, 0});
      const double err = std::abs(r.p_value - brute_force_exact(b, n - b));
      worst = std::max(worst, err);
      c.expect(r.method == McNemarMethod::exact_binomial, fmt::format("({},{}) not exact", b, n - b));
      c.expect(err <= 1e-12, fmt::format("exact p off by {} at ({},{})", err, b, n - b));
    }
  }
  const auto chi = mcnemar(PairedOutcomes{0, 30, 10, 0});
  const double oracle = chi.statistic ? numeric_chi2_tail(*chi.statistic) : -1;
  c.expect(chi.method == McNemarMethod::chi_square_cc, "(30,10) not chi-square");
  c.expect(std::abs(chi.p_value - 0.00266) <= 0.0005, fmt::format("(30,10) p = {}", chi.p_value));
  c.expect(std::abs(chi.p_value - oracle) <= 1e-9, fmt::format("(30,10) p = {} vs oracle {}", chi.p_value, oracle));

  const double eps = 1e-9;
  const std::vector<std::pair<double, std::string>> boundaries = {
      {0.05 - eps, "*"}, {0.05, ""}, {0.01 - eps, "**"}, {0.01, "*"}, {0.001 - eps, "***"}, {0.001, "**"}};
  for (const auto& [p, stars] : boundaries) {
    c.expect(significance_stars(p) == stars, fmt::format("stars({}) = '{}'", p, significance_stars(p)));
  }
  return c.outcome(fmt::format("max exact error {:.1e}; chi-square (30,10) p = {:.5f}, oracle {:.5f}; star boundaries ok",
                               worst, chi.p_value, oracle));
}

// Model that records every history and replays a script.
class Recorder final : public ChatModel {
 public:
  explicit Recorder(std::vector<std::string> script) : inner_(std::move(script), "recorder") {}
  const std::string& model_id() const override { return inner_.model_id(); }
  ChatMessage complete(std::span<const ChatMessage> history) override {
    calls.emplace_back(history.begin(), history.end());
    return inner_.complete(history);
  }
  std::vector<std::vector<ChatMessage>> calls;

 private:
  ScriptedModel inner_;
};

Outcome protocol_fidelity() {
  Checks c;
  // Golden strings are spelled out here rather than taken from the library.
  const std::string role =
      "You are a Java programmer. You respond with the code in Java to solve the task. No comments or explanations";
  const std::string instruct = "The primary class in the following task should follow the singleton design pattern.";
  const std::string reinstruct = "Make sure that the primary class in the following code follows the singleton design pattern. ";
  const std::string fb = "The following code does not include a correctly formatted Singleton class: ";
  const std::string fb_end = ". Please correct the code and return the complete code.";
  const std::string pred_mid = ". It failed the following checks ";
  const std::string pred_end = ". Please correct the code and return the complete code";
  const std::string pc_fail =
      "Private Constructor: the class must have at least one constructor and all constructors must be private.";
  const std::string if_fail = "Instance Field: the class must have a private static field of its own type.";
  const std::string gap_fail = "Global Access Point: the class must have a public static method returning its own type.";
  const std::string examples = "\n\nExamples of correctly implemented Singleton classes:\n\n" +
                               slurp(kSource / "data/exemplars/EagerSingleton.java") + "\n\n" +
                               slurp(kSource / "data/exemplars/LazySingleton.java");

  const auto set = load_tasks(kFixtures / "tasks/mock_tasks.jsonl");
  const Task& task = set.tasks.at(0);
  const std::string plain = "class Solution {\n    public int f() { return 1; }\n}";
  const std::string partial = "class Solution {\n    private static Solution instance;\n    private Solution() {}\n}";
  const std::string single =
      "class Solution {\n    private static Solution instance = new Solution();\n    private Solution() {}\n"
      "    public static Solution getInstance() { return instance; }\n}";
  auto fence = [](const std::string& code) { return "```java\n" + code + "\n```"; };

  struct Golden {
    StrategyKind kind;
    std::string first_user;
    std::vector<std::string> feedback;  // after plain, after partial
  };
  const std::vector<Golden> golden = {
      {StrategyKind::baseline, task.description, {}},
      {StrategyKind::instruct, instruct + task.description, {reinstruct + plain, reinstruct + partial}},
      {StrategyKind::binary_feedback, instruct + task.description, {fb + plain + fb_end, fb + partial + fb_end}},
      {StrategyKind::predicate_feedback, instruct + task.description,
       {fb + plain + pred_mid + pc_fail + "; " + if_fail + "; " + gap_fail + pred_end,
        fb + partial + pred_mid + gap_fail + pred_end}},
      {StrategyKind::fewshot_feedback, instruct + task.description + examples,
       {fb + plain + pred_mid + pc_fail + "; " + if_fail + "; " + gap_fail + pred_end + examples,
        fb + partial + pred_mid + gap_fail + pred_end + examples}},
  };

  for (const auto& g : golden) {
    const auto name = std::string(to_string(g.kind));
    Recorder model({fence(plain), fence(partial), fence(single)});
    const auto rec = run_task(model, Strategy::make(g.kind), task);
    const std::size_t expected_calls = g.kind == StrategyKind::baseline ? 1 : 3;
    c.expect(model.calls.size() == expected_calls, name + ": wrong number of model calls");
    if (model.calls.size() != expected_calls) continue;
    const auto& last = model.calls.back();
    c.expect(last.front().role == Role::system && last.front().content == role, name + ": system prompt differs");
    c.expect(last.at(1).content == g.first_user, name + ": opening user prompt differs");
    for (std::size_t i = 0; i < g.feedback.size(); ++i) {
      const auto& msg = last.at(3 + 2 * i);
      c.expect(msg.role == Role::user && msg.content == g.feedback[i], name + fmt::format(": feedback {} differs", i + 1));
      c.expect(last.at(2 + 2 * i).role == Role::assistant, name + ": assistant turn missing from history");
    }
    c.expect(rec.iterations.size() == expected_calls, name + ": iteration count");
    if (g.kind == StrategyKind::baseline) {
      std::string lower = last.at(1).content;
      std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
      c.expect(lower.find("singleton") == std::string::npos, "baseline prompt mentions singleton");
    }
  }

  for (auto kind : {StrategyKind::instruct, StrategyKind::binary_feedback, StrategyKind::predicate_feedback,
                    StrategyKind::fewshot_feedback}) {
    const auto name = std::string(to_string(kind));
    std::vector<std::string> never(15, fence(plain));
    Recorder capped(never);
    const auto rec = run_task(capped, Strategy::make(kind), task);
    c.expect(rec.iterations.size() == 10 && capped.calls.size() == 10, name + ": cap of 10 not enforced");
    c.expect(rec.selected_iteration == 10, name + ": last iteration not selected at the cap");
    for (int k : {1, 5, 10}) {
      std::vector<std::string> script(static_cast<std::size_t>(k - 1), fence(plain));
      script.push_back(fence(single));
      script.push_back(fence(plain));
      Recorder m(script);
      const auto r = run_task(m, Strategy::make(kind), task);
      c.expect(static_cast<int>(r.iterations.size()) == k && r.selected_iteration == k && r.singleton_score == 100.0,
               fmt::format("{}: no early stop at k={}", name, k));
    }
  }
  return c.outcome("system and user prompts byte-match for all 5 strategies; cap 10; early stop at k=1,5,10");
}

std::string mock_run_cmd(const fs::path& out, const std::string& extra = "") {
  return fmt::format("{} mock-run --script {} --dataset {} --output-dir {} --run-id mock {}", quote(kCli),
                     quote(kFixtures / "mock/script.json"), quote(kFixtures / "tasks/mock_tasks.jsonl"), quote(out),
                     extra);
}

int count_lines(const fs::path& dir) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto text = slurp(e.path());
    n += static_cast<int>(std::count(text.begin(), text.end(), '\n'));
  }
  return n;
}

Outcome end_to_end_mock() {
  Checks c;
  const auto dir = fresh_dir("e2e");
  const auto start = std::chrono::steady_clock::now();
  const auto run = run_command(mock_run_cmd(dir));
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(run.status == 0, "mock-run exited " + std::to_string(run.status) + ": " + run.output.substr(0, 300));
  c.expect(elapsed < 60.0, fmt::format("run took {:.1f} s", elapsed));
  if (run.status != 0) return c.outcome("");
  const auto store = dir / "mock";
  const int records = count_lines(store / "records");
  c.expect(records == 15, fmt::format("{} records instead of 15", records));

  const auto text = run_command(fmt::format("{} report {} --format text", quote(kCli), quote(store)));
  const auto js = run_command(fmt::format("{} report {} --format json", quote(kCli), quote(store)));
  c.expect(text.status == 0 && js.status == 0, "report failed");
  if (js.status != 0) return c.outcome("");
  const auto summary = json::parse(js.output);

  // Hand-computed from the fixed script and outcome table:
  //   baseline            Pass on Java/0, Java/1                       -> 40.0
  //   binary_feedback     Pass on Java/0..3, Java/4 aborted (unpaired)  -> +40.0, b=0 c=2, p=0.5
  //   predicate_feedback  Pass on Java/2 only                           -> -20.0, b=2 c=1, p=1
  struct Want {
    std::string strategy;
    double rate;
    std::optional<double> delta;
    int b, c;
    double p;
    std::string stars;
  };
  const std::vector<Want> want = {{"baseline", 40.0, std::nullopt, 0, 0, 1.0, ""},
                                  {"binary_feedback", 80.0, 40.0, 0, 2, 0.5, ""},
                                  {"predicate_feedback", 20.0, -20.0, 2, 1, 1.0, ""}};
  const auto& arms = summary.at("models").at(0).at("strategies");
  c.expect(arms.size() == 3, "expected 3 strategy columns");
  for (std::size_t i = 0; i < want.size() && i < arms.size(); ++i) {
    const auto& a = arms[i];
    const auto& w = want[i];
    c.expect(a.at("strategy") == w.strategy, "column order");
    c.expect(std::abs(a.at("pass_rate").get<double>() - w.rate) < 1e-9, w.strategy + ": pass rate");
    c.expect(a.at("n") == 5, w.strategy + ": n");
    if (w.delta) {
      c.expect(!a.at("delta_pp").is_null() && std::abs(a.at("delta_pp").get<double>() - *w.delta) < 1e-9,
               w.strategy + ": delta");
      const auto& m = a.at("mcnemar");
      c.expect(!m.is_null() && m.at("b") == w.b && m.at("c") == w.c, w.strategy + ": discordant counts");
      c.expect(!m.is_null() && std::abs(m.at("p_value").get<double>() - w.p) < 1e-12, w.strategy + ": p-value");
      c.expect(!m.is_null() && m.at("stars") == w.stars, w.strategy + ": stars");
    }
  }
  c.expect(text.output.find("+40.0") != std::string::npos && text.output.find("-20.0") != std::string::npos,
           "text table lacks the deltas");
  c.expect(text.output.find("+40.0*") == std::string::npos, "unexpected stars in text table");
  fs::remove_all(dir);
  return c.outcome(fmt::format("15 records in {:.2f} s; baseline 40.0, binary_feedback +40.0, predicate_feedback "
                               "-20.0, no stars",
                               elapsed));
}

// JDK-backed checks; skipped when javac/java are not available.
Outcome functional_harness() {
  const Toolchain tc;
  if (!toolchain_available(tc)) return {Verdict::not_run, "no Java toolchain (javac/java) on PATH"};
  Checks c;
  ExecOptions opts;
  opts.toolchain = tc;
  opts.budget_s = 20;
  opts.workdir = fresh_dir("jdk");
  opts.run_id = "accept";
  const auto set = load_tasks(kFixtures / "tasks/java_tasks.jsonl");
  int passes = 0;
  for (const auto& t : set.tasks) {
    const auto r = evaluate_functionality(t.declaration + *t.canonical_solution, t, opts);
    c.expect(r.kind == OutcomeKind::Pass, t.task_id + ": canonical solution " + std::string(to_string(r.kind)));
    passes += r.kind == OutcomeKind::Pass;
  }
  const auto& t0 = set.tasks.at(0);
  auto mutated = t0.declaration + *t0.canonical_solution;
  if (const auto pos = mutated.find("return true;"); pos != std::string::npos) {
    mutated.replace(pos, 12, "return false;");
  } else if (const auto ret = mutated.find("return "); ret != std::string::npos) {
    mutated.insert(ret + 7, "0 * ");
  }
  c.expect(evaluate_functionality(mutated, t0, opts).kind == OutcomeKind::TestFail, "mutated solution not TestFail");
  const auto prose = evaluate_functionality("I would solve this by thinking hard.", t0, opts);
  c.expect(prose.kind == OutcomeKind::CompileError && prose.compile_error == CompileErrorCategory::non_code_output,
           "prose not non_code_output");
  const auto lib = evaluate_functionality("import org.nonexistent.Widget;\n" + t0.declaration + *t0.canonical_solution,
                                          t0, opts);
  c.expect(lib.kind == OutcomeKind::CompileError && lib.compile_error == CompileErrorCategory::missing_external_library,
           "missing import not missing_external_library");
  opts.budget_s = 5;
  const auto start = std::chrono::steady_clock::now();
  auto loop = t0.declaration + "        while (true) {}\n    }\n}\n";
  const auto hang = evaluate_functionality(loop, t0, opts);
  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(hang.kind == OutcomeKind::Timeout && secs < opts.budget_s + 5, "infinite loop not a timely Timeout");
  fs::remove_all(opts.workdir);
  return c.outcome(fmt::format("{}/{} canonical solutions pass; mutation, prose, import and loop classified", passes,
                               set.tasks.size()));
}

std::string strip_wall_time(const std::string& jsonl) {
  std::istringstream in(jsonl);
  std::string line, out;
  while (std::getline(in, line)) {
    auto j = json::parse(line);
    j.erase("wall_time_ms");
    out += j.dump() + "\n";
  }
  return out;
}

json location_free(json config) {
  config.erase("output_dir");
  if (config.contains("exec")) config["exec"].erase("workdir");
  return config;
}

Outcome resume_idempotence() {
  Checks c;
  const auto dir = fresh_dir("resume");
  const auto whole = run_command(mock_run_cmd(dir / "whole"));
  const auto cut = run_command(mock_run_cmd(dir / "cut", "--max-new-records 4"));
  c.expect(whole.status == 0 && cut.status == 0, "mock-run failed: " + whole.output + cut.output);
  if (!c.failures.empty()) return c.outcome("");
  const auto a = dir / "whole/mock";
  const auto b = dir / "cut/mock";
  const int before = count_lines(b / "records");
  c.expect(before == 4, fmt::format("interrupted store holds {} records", before));

  // Leave a torn line as a killed writer would.
  { std::ofstream(b / "records/scripted__baseline.jsonl", std::ios::app) << R"({"model_id":"scripted","task)"; }
  const auto resumed = run_command(mock_run_cmd(dir / "cut", "--resume"));
  c.expect(resumed.status == 0, "resume failed: " + resumed.output.substr(0, 300));

  std::vector<std::string> names_a, names_b;
  for (const auto& e : fs::directory_iterator(a / "records")) names_a.push_back(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b / "records")) names_b.push_back(e.path().filename().string());
  std::sort(names_a.begin(), names_a.end());
  std::sort(names_b.begin(), names_b.end());
  c.expect(names_a == names_b, "different record files");
  for (const auto& n : names_a) {
    if (std::find(names_b.begin(), names_b.end(), n) == names_b.end()) continue;
    c.expect(strip_wall_time(slurp(a / "records" / n)) == strip_wall_time(slurp(b / "records" / n)), n + " differs");
  }
  c.expect(location_free(json::parse(slurp(a / "config.json"))) == location_free(json::parse(slurp(b / "config.json"))),
           "config.json differs beyond output locations");
  c.expect(slurp(a / "summary.json") == slurp(b / "summary.json"), "summary.json differs");
  const int after = count_lines(b / "records");
  fs::remove_all(dir);
  return c.outcome(fmt::format("interrupted after {} records, resumed to {}; records, config and summary match", before,
                               after));
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "checker fidelity", checker_fidelity},
      {2, "score semantics", score_semantics},
      {3, "McNemar correctness", mcnemar_correctness},
      {4, "protocol fidelity", protocol_fidelity},
      {5, "end-to-end mock run", end_to_end_mock},
      {6, "functional harness", functional_harness},
      {7, "full-dataset smoke", [] { return Outcome{Verdict::not_run, "needs network and a live model endpoint"}; }},
      {8, "resume idempotence", resume_idempotence},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Verdict::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::pass ? "PASS" : o.verdict == Verdict::fail ? "FAIL" : "NOT RUN";
    failed += o.verdict == Verdict::fail;
    std::cout << fmt::format("[{}] {}. {}: {}", tag, c.id, c.name, o.note) << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
