#include "taxlogic/runner.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "json.hpp"
#include "taxlogic/report.hpp"

namespace taxlogic::strat {

using corpus::CaseRecord;
using corpus::Corpus;
using nlohmann::json;

std::string MethodSpec::label() const {
  std::string out;
  for (size_t i = 0; i < legs.size(); ++i) {
    if (i) out += "+";
    out += legs[i];
  }
  return out;
}

bool is_baseline_leg(const std::string& leg) {
  return leg == "AlwaysAbstain" || leg == "AlwaysZero";
}

namespace {

bool valid_leg(const std::string& leg) {
  return is_baseline_leg(leg) || parse_method(leg).has_value();
}

std::string canonical_leg(const std::string& leg) {
  if (is_baseline_leg(leg)) return leg;
  return method_name(*parse_method(leg));
}

}  // namespace

std::optional<MethodSpec> parse_method_spec(const std::string& text) {
  MethodSpec spec;
  size_t plus = text.find('+');
  if (plus == std::string::npos) {
    spec.legs = {text};
  } else {
    spec.legs = {text.substr(0, plus), text.substr(plus + 1)};
  }
  for (auto& leg : spec.legs) {
    // trim spaces
    size_t a = leg.find_first_not_of(' ');
    size_t b = leg.find_last_not_of(' ');
    if (a == std::string::npos) return std::nullopt;
    leg = leg.substr(a, b - a + 1);
    if (!valid_leg(leg)) return std::nullopt;
    leg = canonical_leg(leg);
  }
  if (spec.legs.size() == 2 && (is_baseline_leg(spec.legs[0]) || is_baseline_leg(spec.legs[1]))) {
    return std::nullopt;  // baselines are single rows
  }
  return spec;
}

namespace {

struct LegKey {
  std::string leg;
  unsigned sample;
  bool operator<(const LegKey& o) const { return std::tie(leg, sample) < std::tie(o.leg, o.sample); }
};

Attempt baseline_attempt(const CaseRecord& record, const std::string& leg) {
  Attempt attempt;
  attempt.case_id = record.case_id;
  attempt.method = Method::Direct;
  attempt.sample_index = 0;
  attempt.model_name = leg;
  attempt.prediction = leg == "AlwaysZero" ? Prediction::answer(0.0)
                                           : Prediction::abstain(AbstainReason::NoMarker);
  return attempt;
}

}  // namespace

ExperimentResult run_experiment(const Corpus& corpus, const ExperimentConfig& config,
                                llm::Gateway& gateway) {
  std::vector<const CaseRecord*> cases = corpus::tax_cases(corpus);

  // Which (leg, sample) pairs each case needs.
  std::set<LegKey> needed;
  bool any_few_shot = false;
  for (const auto& spec : config.methods) {
    if (spec.legs.size() == 1) {
      needed.insert({spec.legs[0], 0});
    } else if (spec.legs[0] == spec.legs[1]) {
      needed.insert({spec.legs[0], 0});
      needed.insert({spec.legs[0], 1});
    } else {
      needed.insert({spec.legs[0], 0});
      needed.insert({spec.legs[1], 0});
    }
    for (const auto& leg : spec.legs) {
      if (leg == "FewShot") any_few_shot = true;
    }
  }

  struct CaseResult {
    std::map<LegKey, Attempt> attempts;
    std::optional<ExemplarRanking> ranking;
    std::vector<std::tuple<std::string, std::string, unsigned, long long>> timings;
  };
  std::vector<CaseResult> per_case(cases.size());

  auto run_case = [&](size_t index) {
    const CaseRecord& record = *cases[index];
    CaseResult& result = per_case[index];
    StrategyContext ctx;
    ctx.corpus = &corpus;
    ctx.gateway = &gateway;
    ctx.model = config.model;
    ctx.budget = config.budget;
    ctx.k_exemplars = config.k_exemplars;
    ctx.template_dir = config.template_dir;

    if (any_few_shot) {
      if (config.ranking_source == "random") {
        result.ranking = rank_exemplars_random(record, cases, config.seed_exemplars);
      } else if (config.ranking_source == "llm") {
        result.ranking = rank_exemplars_llm(record, cases, ctx);
      } else {
        result.ranking = rank_exemplars_lexical(record, cases);
      }
    }

    for (const LegKey& key : needed) {
      Attempt attempt;
      if (is_baseline_leg(key.leg)) {
        attempt = baseline_attempt(record, key.leg);
      } else if (key.leg == "Direct") {
        attempt = run_direct(record, ctx, key.sample);
      } else if (key.leg == "Parsed") {
        attempt = run_zero_shot_parsed(record, ctx, key.sample);
      } else {
        attempt = run_few_shot(record, *result.ranking, ctx, key.sample);
      }
      if (attempt.engine) {
        result.timings.emplace_back(record.case_id, key.leg, key.sample,
                                    attempt.engine->elapsed_ms);
        // Wall-clock artifacts stay out of the deterministic rows. A timed-out
        // resolution also has a time-dependent inference count; zero it.
        attempt.engine->elapsed_ms = 0;
        if (attempt.engine->status == "timeout") attempt.engine->inferences = 0;
      }
      result.attempts.emplace(key, std::move(attempt));
    }
  };

  unsigned jobs = std::max(1u, config.jobs);
  if (jobs == 1) {
    for (size_t i = 0; i < cases.size(); ++i) run_case(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::mutex error_mu;
    std::exception_ptr first_error;
    for (unsigned t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          size_t i = next.fetch_add(1);
          if (i >= cases.size()) return;
          try {
            run_case(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  ExperimentResult result;
  for (size_t i = 0; i < cases.size(); ++i) {
    for (const auto& [key, attempt] : per_case[i].attempts) result.attempts.push_back(attempt);
    if (per_case[i].ranking) result.rankings.push_back(*per_case[i].ranking);
    for (const auto& t : per_case[i].timings) result.timings.push_back(t);
  }

  // Per-method predictions and reports.
  for (const auto& spec : config.methods) {
    std::map<std::string, Prediction> by_case;
    std::vector<eval::CaseOutcome> outcomes;
    for (size_t i = 0; i < cases.size(); ++i) {
      const CaseRecord& record = *cases[i];
      const auto& attempts = per_case[i].attempts;
      Prediction prediction;
      if (spec.legs.size() == 1) {
        prediction = attempts.at({spec.legs[0], 0}).prediction;
      } else if (spec.legs[0] == spec.legs[1]) {
        prediction = combine_self_consistency(attempts.at({spec.legs[0], 0}),
                                              attempts.at({spec.legs[0], 1}));
      } else {
        prediction = combine_self_consistency(attempts.at({spec.legs[0], 0}),
                                              attempts.at({spec.legs[1], 0}));
      }
      by_case.emplace(record.case_id, prediction);
      outcomes.push_back(eval::score_case(record.case_id,
                                          static_cast<double>(record.gold_answer_dollars),
                                          prediction, config.cost_params));
    }
    std::string model_label = spec.legs.size() == 1 && is_baseline_leg(spec.legs[0])
                                  ? "baseline"
                                  : config.model.model_name;
    result.reports.push_back(eval::make_report(model_label, spec.label(), std::move(outcomes),
                                               config.bootstrap_resamples,
                                               config.seed_bootstrap));
    result.method_predictions.emplace_back(spec.label(), std::move(by_case));
  }
  return result;
}

// --- attempt row serialization ----------------------------------------------

std::string attempt_to_json_line(const Attempt& attempt) {
  json j;
  j["case_id"] = attempt.case_id;
  j["method"] = method_name(attempt.method);
  j["sample_index"] = attempt.sample_index;
  j["model"] = attempt.model_name;
  if (attempt.prediction.answered) {
    j["prediction"] = {{"kind", "answer"}, {"value", attempt.prediction.value}};
  } else {
    j["prediction"] = {{"kind", "abstain"},
                       {"reason", abstain_reason_name(attempt.prediction.reason)}};
  }
  if (attempt.engine) {
    j["engine"] = {{"status", attempt.engine->status},
                   {"error", attempt.engine->error},
                   {"inferences", attempt.engine->inferences}};
  }
  j["transcripts"] = attempt.transcript_digests;
  return j.dump();
}

Attempt attempt_from_json_line(const std::string& line) {
  json j = json::parse(line);
  Attempt attempt;
  attempt.case_id = j.at("case_id").get<std::string>();
  auto method = parse_method(j.at("method").get<std::string>());
  if (!method) throw std::runtime_error("unknown method in attempt row: " + line);
  attempt.method = *method;
  attempt.sample_index = j.at("sample_index").get<unsigned>();
  attempt.model_name = j.value("model", "");
  const json& p = j.at("prediction");
  if (p.at("kind") == "answer") {
    attempt.prediction = Prediction::answer(p.at("value").get<double>());
  } else {
    auto reason = parse_abstain_reason(p.at("reason").get<std::string>());
    attempt.prediction =
        Prediction::abstain(reason.value_or(AbstainReason::NoConsensus));
  }
  if (j.contains("engine")) {
    EngineSummary summary;
    summary.status = j["engine"].value("status", "");
    summary.error = j["engine"].value("error", "");
    summary.inferences = j["engine"].value("inferences", 0ULL);
    attempt.engine = std::move(summary);
  }
  for (const auto& d : j.value("transcripts", json::array())) {
    attempt.transcript_digests.push_back(d.get<std::string>());
  }
  return attempt;
}

std::vector<Attempt> read_attempt_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open attempt file: " + path.string());
  std::vector<Attempt> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(attempt_from_json_line(line));
  }
  return out;
}

namespace {

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string corpus_digest(const Corpus& corpus) {
  std::string blob;
  for (const CaseRecord* c : corpus::tax_cases(corpus)) {
    blob += c->case_id + ":" + std::to_string(c->gold_answer_dollars) + "\n";
  }
  return llm::sha256_hex(blob);
}

}  // namespace

void write_run_outputs(const std::filesystem::path& output_dir, const Corpus& corpus,
                       const ExperimentConfig& config, const ExperimentResult& result,
                       const llm::TranscriptStore* store) {
  std::filesystem::create_directories(output_dir);

  std::string attempts;
  for (const auto& attempt : result.attempts) {
    attempts += attempt_to_json_line(attempt);
    attempts += "\n";
  }
  write_text_file(output_dir / "attempts.jsonl", attempts);

  write_text_file(output_dir / "report.jsonl", eval::reports_to_jsonl(result.reports));
  write_text_file(output_dir / "report.txt", eval::render_report_table(result.reports));

  if (result.method_predictions.size() >= 2) {
    std::map<std::string, double> golds;
    for (const CaseRecord* c : corpus::tax_cases(corpus)) {
      golds.emplace(c->case_id, static_cast<double>(c->gold_answer_dollars));
    }
    eval::OverlapMatrix matrix = eval::overlap_matrix(result.method_predictions, golds);
    write_text_file(output_dir / "overlap.tsv", eval::overlap_matrix_tsv(matrix));
  }

  if (!result.rankings.empty()) {
    std::string rankings;
    for (const auto& r : result.rankings) {
      json j;
      j["target"] = r.target_case_id;
      j["ranker"] = r.ranker;
      j["ranked_ids"] = r.ranked_ids;
      rankings += j.dump();
      rankings += "\n";
    }
    write_text_file(output_dir / "rankings.jsonl", rankings);
  }

  json manifest;
  manifest["corpus_version"] = corpus.version;
  manifest["corpus_digest"] = corpus_digest(corpus);
  manifest["model"] = {{"name", config.model.model_name},
                       {"reasoning_class", config.model.reasoning_class},
                       {"sampling",
                        {{"temperature", config.model.sampling.temperature},
                         {"top_p", config.model.sampling.top_p},
                         {"max_tokens", config.model.sampling.max_tokens}}}};
  json methods = json::array();
  for (const auto& m : config.methods) methods.push_back(m.label());
  manifest["methods"] = std::move(methods);
  manifest["mode"] = llm::gateway_mode_name(config.mode);
  manifest["budget_ms"] = config.budget.count();
  manifest["k_exemplars"] = config.k_exemplars;
  manifest["ranking_source"] = config.ranking_source;
  manifest["seeds"] = {{"exemplars", config.seed_exemplars},
                       {"bootstrap", config.seed_bootstrap}};
  manifest["bootstrap_resamples"] = config.bootstrap_resamples;
  json templates;
  for (const auto& id : llm::known_template_ids()) {
    templates[id] = llm::sha256_hex(llm::template_text(id, config.template_dir));
  }
  manifest["template_versions"] = std::move(templates);
  if (store != nullptr) manifest["transcript_store_sha256"] = store->file_sha256();
  write_text_file(output_dir / "manifest.json", manifest.dump(2) + "\n");

  std::string timings;
  for (const auto& [case_id, leg, sample, elapsed] : result.timings) {
    json j;
    j["case_id"] = case_id;
    j["method"] = leg;
    j["sample_index"] = sample;
    j["elapsed_ms"] = elapsed;
    timings += j.dump();
    timings += "\n";
  }
  write_text_file(output_dir / "timings.jsonl", timings);
}

}  // namespace taxlogic::strat
