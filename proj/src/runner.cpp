#include "sbench/runner.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include "sbench/error.hpp"
#include "sbench/exec_harness.hpp"
#include "sbench/report.hpp"
#include "sbench/run_store.hpp"

namespace sbench {
namespace {

namespace fs = std::filesystem;

struct ModelSlot {
  std::string model_id;
  std::shared_ptr<HttpChatModel> http;
  std::optional<ScriptBook> script;
};

class Logger {
 public:
  explicit Logger(std::ostream* out) : out_(out) {}
  void line(const std::string& text) {
    if (!out_) return;
    std::lock_guard lock(mu_);
    *out_ << text << '\n';
    out_->flush();
  }

 private:
  std::ostream* out_;
  std::mutex mu_;
};

void verify_exemplars(const std::vector<Strategy>& strategies) {
  for (const auto& s : strategies) {
    for (std::size_t i = 0; i < s.exemplars.size(); ++i) {
      const auto report = check_candidate(s.exemplars[i], "");
      if (!report.is_singleton()) {
        std::string why;
        for (const auto& f : report.failed_checks) why += " " + f;
        throw ConfigError("few-shot exemplar " + std::to_string(i + 1) + " is not a conforming Singleton:" + why);
      }
    }
  }
}

std::unique_ptr<FunctionalEvaluator> make_evaluator(const RunConfig& cfg) {
  if (cfg.exec.evaluator == EvaluatorKind::scripted) return std::make_unique<ScriptedEvaluator>(cfg.exec.outcomes);
  ExecOptions opts;
  opts.toolchain = cfg.exec.toolchain;
  opts.budget_s = cfg.exec.budget_s;
  opts.test_adaptation = cfg.exec.test_adaptation;
  opts.workdir = cfg.exec.workdir;
  opts.run_id = cfg.run_id;
  opts.keep_scratch = cfg.exec.keep_scratch;
  return std::make_unique<JavaEvaluator>(std::move(opts), cfg.parallelism.exec_workers);
}

}  // namespace

void write_store_summary(const fs::path& store_root) {
  const auto store = RunStore::open(store_root);
  const auto records = store.read_records();
  const auto summary = summarize(records, store.snapshot().value("run_id", ""), store.config_digest());
  store.write_summary(summary_to_json(summary));
}

RunResult run_experiment(const RunConfig& cfg, const RunOptions& options) {
  Logger log(options.log);
  RunResult result;

  const TaskSet tasks = load_tasks(cfg.dataset_path, cfg.field_map);
  for (const auto& w : tasks.warnings) {
    result.warnings.push_back(w);
    log.line("warning: " + w);
  }
  verify_exemplars(cfg.strategies);

  std::set<std::string> file_names;
  for (const auto& m : cfg.models) {
    if (!file_names.insert(sanitize_model_id(m.model_id)).second) {
      throw ConfigError("model ids collide after sanitising for file names: " + m.model_id);
    }
  }

  auto evaluator = make_evaluator(cfg);

  auto snapshot = config_snapshot(cfg, tasks.source_digest);
  const auto digest = config_digest(snapshot);
  result.store_root = cfg.output_dir / cfg.run_id;
  std::optional<RunStore> store;
  if (RunStore::exists(result.store_root)) {
    if (!options.resume) {
      throw StoreError("run '" + cfg.run_id + "' already exists in " + cfg.output_dir.string() +
                       "; use --resume to continue it");
    }
    store.emplace(RunStore::open(result.store_root));
    if (store->config_digest() != digest) {
      throw StoreError("cannot resume " + result.store_root.string() +
                       ": the stored configuration or dataset differs from the current one");
    }
  } else {
    store.emplace(RunStore::create(result.store_root, std::move(snapshot)));
  }

  auto limiter = std::make_shared<EndpointLimiter>(cfg.parallelism.per_endpoint);
  std::vector<ModelSlot> models;
  for (const auto& spec : cfg.models) {
    ModelSlot slot{spec.model_id, nullptr, std::nullopt};
    try {
      if (spec.http) {
        const auto& ref = spec.http->auth_ref;
        if (!ref.empty() && std::getenv(ref.c_str()) == nullptr) {
          throw ConfigError("credential variable " + ref + " is not set");
        }
        slot.http = std::make_shared<HttpChatModel>(*spec.http, limiter);
      } else {
        slot.script = ScriptBook::load(spec.script->string());
      }
    } catch (const Error& e) {
      const auto msg = "model " + spec.model_id + " skipped: " + e.what();
      result.failed_models.push_back(msg);
      result.warnings.push_back(msg);
      log.line("warning: " + msg);
      continue;
    }
    models.push_back(std::move(slot));
  }
  if (models.empty()) throw ConfigError("no configured model is usable");

  struct Job {
    const ModelSlot* model;
    const Strategy* strategy;
  };
  std::vector<Job> jobs;
  for (const auto& m : models) {
    for (const auto& s : cfg.strategies) jobs.push_back({&m, &s});
  }

  std::atomic<std::size_t> next_job{0};
  std::atomic<int> started{0};
  std::atomic<int> written{0};
  std::atomic<int> skipped{0};
  std::atomic<bool> stop{false};
  std::mutex err_mu;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      const auto j = next_job.fetch_add(1);
      if (j >= jobs.size() || stop) return;
      const auto& job = jobs[j];
      const auto& model_id = job.model->model_id;
      const auto strategy_name = std::string(to_string(job.strategy->kind));
      try {
        const auto done = store->completed_tasks(model_id, job.strategy->kind);
        for (const auto& task : tasks.tasks) {
          if (done.count(task.task_id)) {
            ++skipped;
            continue;
          }
          if (stop) break;
          if (options.max_new_records && started.fetch_add(1) >= *options.max_new_records) {
            stop = true;
            break;
          }
          const auto t0 = std::chrono::steady_clock::now();
          RunRecord record;
          if (job.model->script) {
            auto scripted = job.model->script->model_for(strategy_name, task.task_id, model_id);
            record = run_task(scripted, *job.strategy, task, digest);
          } else {
            record = run_task(*job.model->http, *job.strategy, task, digest);
          }
          if (!record.functional_outcome) {
            try {
              record.functional_outcome = evaluator->evaluate(record, task);
            } catch (const std::exception& e) {
              record.functional_outcome = OutcomeLabel{OutcomeKind::Aborted, std::string("evaluation failed: ") + e.what(),
                                                       std::nullopt};
            }
          }
          record.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count();
          store->append(record);
          ++written;
          log.line(model_id + " " + strategy_name + " " + task.task_id + ": score " +
                   std::to_string(static_cast<int>(record.singleton_score + 0.5)) + ", " +
                   std::string(to_string(record.functional_outcome->kind)) +
                   (record.error ? " (" + *record.error + ")" : ""));
        }
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        stop = true;
        return;
      }
    }
  };

  const int threads = std::max(1, std::min<int>(cfg.parallelism.pairs, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  result.new_records = written;
  result.skipped_records = skipped;
  result.stopped_early = stop;
  if (!result.stopped_early) write_store_summary(result.store_root);
  return result;
}

}  // namespace sbench
