#include "sbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "sbench/error.hpp"
#include "sbench/records.hpp"

namespace sbench {
namespace {

using nlohmann::json;

// Left-aligned columns separated by two spaces, trailing blanks trimmed.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string render() const {
    std::vector<std::size_t> width;
    for (const auto& row : rows_) {
      if (row.size() > width.size()) width.resize(row.size(), 0);
      for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    std::string out;
    for (const auto& row : rows_) {
      std::string line;
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) line += "  ";
        line += row[i];
        if (i + 1 < row.size()) line.append(width[i] - row[i].size(), ' ');
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out += line;
      out += '\n';
    }
    return out;
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

std::string pct(double value) { return fmt::format("{:.1f}", value); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(double v) { return fmt::format("{}", v); }

void tally(OutcomeBreakdown& b, const RunRecord& r) {
  if (!r.functional_outcome) {
    ++b.unevaluated;
    return;
  }
  switch (r.functional_outcome->kind) {
    case OutcomeKind::Pass: ++b.pass; break;
    case OutcomeKind::TestFail: ++b.test_fail; break;
    case OutcomeKind::Timeout: ++b.timeout; break;
    case OutcomeKind::Aborted: ++b.aborted; break;
    case OutcomeKind::CompileError:
      switch (r.functional_outcome->compile_error.value_or(CompileErrorCategory::other_compile_error)) {
        case CompileErrorCategory::missing_external_library: ++b.missing_external_library; break;
        case CompileErrorCategory::non_code_output: ++b.non_code_output; break;
        case CompileErrorCategory::other_compile_error: ++b.other_compile_error; break;
      }
      break;
  }
}

json breakdown_to_json(const OutcomeBreakdown& b) {
  return json{{"Pass", b.pass},
              {"TestFail", b.test_fail},
              {"Timeout", b.timeout},
              {"Aborted", b.aborted},
              {"CompileError",
               {{"missing_external_library", b.missing_external_library},
                {"non_code_output", b.non_code_output},
                {"other_compile_error", b.other_compile_error}}},
              {"unevaluated", b.unevaluated}};
}

OutcomeBreakdown breakdown_from_json(const json& j) {
  OutcomeBreakdown b;
  b.pass = j.at("Pass").get<int>();
  b.test_fail = j.at("TestFail").get<int>();
  b.timeout = j.at("Timeout").get<int>();
  b.aborted = j.at("Aborted").get<int>();
  const auto& ce = j.at("CompileError");
  b.missing_external_library = ce.at("missing_external_library").get<int>();
  b.non_code_output = ce.at("non_code_output").get<int>();
  b.other_compile_error = ce.at("other_compile_error").get<int>();
  b.unevaluated = j.value("unevaluated", 0);
  return b;
}

std::optional<double> baseline_rate(const ModelSummary& m) {
  if (const auto* b = m.find(StrategyKind::baseline)) return b->pass_rate;
  return std::nullopt;
}

}  // namespace

const StrategySummary* ModelSummary::find(StrategyKind kind) const {
  for (const auto& s : strategies) {
    if (s.strategy == kind) return &s;
  }
  return nullptr;
}

std::string format_delta(double delta) {
  const auto text = fmt::format("{:+.1f}", delta);
  if (text == "+0.0" || text == "-0.0") return "0.0";
  return text;
}

Summary summarize(std::span<const RunRecord> records, std::string run_id, std::string config_digest) {
  std::map<std::string, std::map<StrategyKind, std::vector<RunRecord>>> arms;
  for (const auto& r : records) arms[r.model_id][r.strategy].push_back(r);

  Summary summary;
  summary.run_id = std::move(run_id);
  summary.config_digest = std::move(config_digest);
  for (auto kind : kAllStrategyKinds) {
    const bool present = std::any_of(arms.begin(), arms.end(), [&](const auto& m) { return m.second.count(kind) > 0; });
    if (present) summary.strategies.push_back(kind);
  }

  for (const auto& [model_id, by_strategy] : arms) {
    ModelSummary model;
    model.model_id = model_id;
    const auto base_it = by_strategy.find(StrategyKind::baseline);
    for (auto kind : kAllStrategyKinds) {
      const auto it = by_strategy.find(kind);
      if (it == by_strategy.end()) continue;
      const auto& arm = it->second;
      StrategySummary s;
      s.strategy = kind;
      s.n = static_cast<int>(arm.size());
      s.pass_rate = pass_at_1(arm);
      for (const auto& r : arm) {
        tally(s.outcomes, r);
        if (r.functional_outcome && r.functional_outcome->kind == OutcomeKind::Pass) ++s.passes;
      }
      s.avg_singleton_score = average_singleton_score(arm);
      s.predicates = predicate_counts(arm);
      if (kind != StrategyKind::baseline && base_it != by_strategy.end()) {
        s.delta_pp = delta_pp(s.pass_rate, pass_at_1(base_it->second));
        int excluded = 0;
        const auto pairs = pair_outcomes(base_it->second, arm, &excluded);
        s.mcnemar = mcnemar(pairs);
        s.paired_n = pairs.total();
        s.paired_excluded = excluded;
      }
      model.strategies.push_back(std::move(s));
    }
    summary.models.push_back(std::move(model));
  }

  std::stable_sort(summary.models.begin(), summary.models.end(), [](const ModelSummary& a, const ModelSummary& b) {
    const auto ra = baseline_rate(a);
    const auto rb = baseline_rate(b);
    if (ra.has_value() != rb.has_value()) return ra.has_value();
    if (ra && *ra != *rb) return *ra > *rb;
    return a.model_id < b.model_id;
  });
  return summary;
}

json summary_to_json(const Summary& summary) {
  json strategies = json::array();
  for (auto k : summary.strategies) strategies.push_back(to_string(k));
  json models = json::array();
  for (const auto& m : summary.models) {
    json arms = json::array();
    for (const auto& s : m.strategies) {
      arms.push_back({{"strategy", to_string(s.strategy)},
                      {"n", s.n},
                      {"passes", s.passes},
                      {"pass_rate", s.pass_rate},
                      {"delta_pp", s.delta_pp ? json(*s.delta_pp) : json(nullptr)},
                      {"mcnemar", s.mcnemar ? json(*s.mcnemar) : json(nullptr)},
                      {"paired_n", s.paired_n},
                      {"paired_excluded", s.paired_excluded},
                      {"avg_singleton_score", s.avg_singleton_score},
                      {"predicate_counts", s.predicates},
                      {"outcomes", breakdown_to_json(s.outcomes)}});
    }
    models.push_back({{"model_id", m.model_id}, {"strategies", std::move(arms)}});
  }
  return json{{"run_id", summary.run_id},
              {"config_digest", summary.config_digest},
              {"strategies", std::move(strategies)},
              {"models", std::move(models)}};
}

Summary summary_from_json(const json& doc) {
  try {
    Summary summary;
    summary.run_id = doc.at("run_id").get<std::string>();
    summary.config_digest = doc.at("config_digest").get<std::string>();
    for (const auto& k : doc.at("strategies")) {
      const auto kind = parse_strategy_kind(k.get<std::string>());
      if (!kind) throw Error("unknown strategy '" + k.get<std::string>() + "'");
      summary.strategies.push_back(*kind);
    }
    for (const auto& mj : doc.at("models")) {
      ModelSummary m;
      m.model_id = mj.at("model_id").get<std::string>();
      for (const auto& sj : mj.at("strategies")) {
        StrategySummary s;
        const auto kind = parse_strategy_kind(sj.at("strategy").get<std::string>());
        if (!kind) throw Error("unknown strategy in summary");
        s.strategy = *kind;
        s.n = sj.at("n").get<int>();
        s.passes = sj.at("passes").get<int>();
        s.pass_rate = sj.at("pass_rate").get<double>();
        if (!sj.at("delta_pp").is_null()) s.delta_pp = sj.at("delta_pp").get<double>();
        if (!sj.at("mcnemar").is_null()) s.mcnemar = sj.at("mcnemar").get<McNemarResult>();
        s.paired_n = sj.at("paired_n").get<int>();
        s.paired_excluded = sj.at("paired_excluded").get<int>();
        s.avg_singleton_score = sj.at("avg_singleton_score").get<double>();
        s.predicates = sj.at("predicate_counts").get<PredicateCounts>();
        s.outcomes = breakdown_from_json(sj.at("outcomes"));
        m.strategies.push_back(std::move(s));
      }
      summary.models.push_back(std::move(m));
    }
    return summary;
  } catch (const json::exception& e) {
    throw Error(std::string("not a summary document: ") + e.what());
  }
}

std::string render_text(const Summary& summary) {
  std::string out;
  if (!summary.run_id.empty()) out += "Run " + summary.run_id + "\n";
  if (!summary.config_digest.empty()) out += "Config digest " + summary.config_digest + "\n";
  if (!out.empty()) out += "\n";

  // Pass-rate table: baseline percentage, then change per strategy.
  out += "Pass rate (pass@1, %): baseline, and change in percentage points per strategy\n";
  std::vector<std::string> header{"Model"};
  for (auto k : summary.strategies) header.emplace_back(to_string(k));
  TextTable rates(header);
  for (const auto& m : summary.models) {
    std::vector<std::string> row{m.model_id};
    for (auto k : summary.strategies) {
      const auto* s = m.find(k);
      if (!s) {
        row.emplace_back("-");
      } else if (k == StrategyKind::baseline) {
        row.push_back(pct(s->pass_rate));
      } else if (s->delta_pp) {
        row.push_back(format_delta(*s->delta_pp) + (s->mcnemar ? s->mcnemar->stars : ""));
      } else {
        row.push_back(pct(s->pass_rate) + " (no baseline)");
      }
    }
    rates.add(std::move(row));
  }
  out += rates.render();
  out += "* = p<0.05, ** = p<0.01, *** = p<0.001 (McNemar, paired by task)\n\n";

  out += "McNemar tests against baseline\n";
  TextTable tests({"Model", "Strategy", "b", "c", "statistic", "p", "method", "paired", "excluded"});
  bool any_test = false;
  for (const auto& m : summary.models) {
    for (const auto& s : m.strategies) {
      if (!s.mcnemar) continue;
      any_test = true;
      const auto& t = *s.mcnemar;
      tests.add({m.model_id, std::string(to_string(s.strategy)), std::to_string(t.b), std::to_string(t.c),
                 t.statistic ? fmt::format("{:.4f}", *t.statistic) : "-", fmt::format("{:.4g}", t.p_value),
                 std::string(to_string(t.method)), std::to_string(s.paired_n), std::to_string(s.paired_excluded)});
    }
  }
  out += any_test ? tests.render() : "(no strategy has a baseline to compare with)\n";
  out += "\n";

  out += "Average Singleton Score\n";
  TextTable scores(header);
  for (const auto& m : summary.models) {
    std::vector<std::string> row{m.model_id};
    for (auto k : summary.strategies) {
      const auto* s = m.find(k);
      row.push_back(s ? fmt::format("{:.2f}", s->avg_singleton_score) : "-");
    }
    scores.add(std::move(row));
  }
  out += scores.render();
  out += "\n";

  out += "Fulfilled predicates (selected candidates)\n";
  TextTable preds({"Model", "Strategy", "private_constructor", "instance_field", "global_access_point", "total"});
  for (const auto& m : summary.models) {
    for (const auto& s : m.strategies) {
      preds.add({m.model_id, std::string(to_string(s.strategy)), std::to_string(s.predicates.private_constructor),
                 std::to_string(s.predicates.instance_field), std::to_string(s.predicates.global_access_point),
                 std::to_string(s.predicates.total)});
    }
  }
  out += preds.render();
  out += "\n";

  out += "Outcome breakdown\n";
  TextTable outcomes({"Model", "Strategy", "n", "Pass", "CompileError", "missing_external_library", "non_code_output",
                      "other_compile_error", "TestFail", "Timeout", "Aborted"});
  for (const auto& m : summary.models) {
    for (const auto& s : m.strategies) {
      const auto& b = s.outcomes;
      outcomes.add({m.model_id, std::string(to_string(s.strategy)), std::to_string(s.n), std::to_string(b.pass),
                    std::to_string(b.compile_error()), std::to_string(b.missing_external_library),
                    std::to_string(b.non_code_output), std::to_string(b.other_compile_error),
                    std::to_string(b.test_fail), std::to_string(b.timeout), std::to_string(b.aborted)});
    }
  }
  out += outcomes.render();
  return out;
}

std::string render_csv(const Summary& summary) {
  std::string out =
      "model_id,strategy,n,passes,pass_rate,delta_pp,stars,mcnemar_b,mcnemar_c,mcnemar_statistic,mcnemar_p,"
      "mcnemar_method,paired_n,paired_excluded,avg_singleton_score,private_constructor,instance_field,"
      "global_access_point,predicate_total,pass,compile_error,missing_external_library,non_code_output,"
      "other_compile_error,test_fail,timeout,aborted,unevaluated\n";
  for (const auto& m : summary.models) {
    for (const auto& s : m.strategies) {
      const auto& t = s.mcnemar;
      const auto& b = s.outcomes;
      std::vector<std::string> f{
          csv_field(m.model_id),
          std::string(to_string(s.strategy)),
          std::to_string(s.n),
          std::to_string(s.passes),
          csv_number(s.pass_rate),
          s.delta_pp ? csv_number(*s.delta_pp) : "",
          t ? t->stars : "",
          t ? std::to_string(t->b) : "",
          t ? std::to_string(t->c) : "",
          t && t->statistic ? csv_number(*t->statistic) : "",
          t ? csv_number(t->p_value) : "",
          t ? std::string(to_string(t->method)) : "",
          std::to_string(s.paired_n),
          std::to_string(s.paired_excluded),
          csv_number(s.avg_singleton_score),
          std::to_string(s.predicates.private_constructor),
          std::to_string(s.predicates.instance_field),
          std::to_string(s.predicates.global_access_point),
          std::to_string(s.predicates.total),
          std::to_string(b.pass),
          std::to_string(b.compile_error()),
          std::to_string(b.missing_external_library),
          std::to_string(b.non_code_output),
          std::to_string(b.other_compile_error),
          std::to_string(b.test_fail),
          std::to_string(b.timeout),
          std::to_string(b.aborted),
          std::to_string(b.unevaluated),
      };
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (i > 0) out += ',';
        out += f[i];
      }
      out += '\n';
    }
  }
  return out;
}

std::string render_json(const Summary& summary) { return summary_to_json(summary).dump(2) + "\n"; }

}  // namespace sbench
