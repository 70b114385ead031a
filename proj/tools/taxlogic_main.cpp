#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "taxlogic/fixture.hpp"
#include "taxlogic/report.hpp"
#include "taxlogic/runner.hpp"
#include "taxlogic/writer.hpp"

namespace fs = std::filesystem;
using namespace taxlogic;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;

// --- validate ----------------------------------------------------------------

int cmd_validate(const fs::path& corpus_root, long long budget_ms, unsigned jobs,
                 const fs::path& report_path) {
  corpus::Corpus corpus = corpus::load_corpus(corpus_root);
  std::cout << "corpus " << corpus.version << ": " << corpus.sections.size() << " sections, "
            << corpus.cases.size() << " cases, " << corpus::tax_cases(corpus).size()
            << " numeric tax cases\n";
  for (const auto& warning : corpus.warnings) {
    std::cout << "  warning: " << warning << "\n";
  }
  corpus::ValidationReport report =
      corpus::validate_gold(corpus, std::chrono::milliseconds(budget_ms), jobs);

  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::trunc);
    for (const auto& row : report.rows) {
      json j;
      j["case_id"] = row.case_id;
      j["status"] = row.status;
      j["expected"] = row.expected;
      if (row.has_actual) j["actual"] = row.actual;
      j["elapsed_ms"] = row.elapsed.count();
      j["inferences"] = row.inferences;
      if (!row.detail.empty()) j["detail"] = row.detail;
      out << j.dump() << "\n";
    }
  }
  for (const auto& row : report.rows) {
    if (row.status != "match") {
      std::cout << "  " << row.case_id << ": " << row.status << " (expected " << row.expected;
      if (row.has_actual) std::cout << ", got " << row.actual;
      if (!row.detail.empty()) std::cout << "; " << row.detail;
      std::cout << ")\n";
    }
  }
  std::cout << report.matched << "/" << report.rows.size() << " gold cases match\n";
  return report.all_matched() ? kExitOk : kExitMismatch;
}

// --- run ----------------------------------------------------------------------

void apply_config_file(const fs::path& path, strat::ExperimentConfig& config,
                       std::vector<std::string>& methods, std::string& mode_name) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  json j = json::parse(in);
  if (j.contains("corpus_root")) config.corpus_root = j["corpus_root"].get<std::string>();
  if (j.contains("output_dir")) config.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("transcripts")) config.transcript_path = j["transcripts"].get<std::string>();
  if (j.contains("methods")) methods = j["methods"].get<std::vector<std::string>>();
  if (j.contains("mode")) mode_name = j["mode"].get<std::string>();
  if (j.contains("budget_ms")) config.budget = std::chrono::milliseconds(j["budget_ms"].get<long long>());
  if (j.contains("k_exemplars")) config.k_exemplars = j["k_exemplars"].get<unsigned>();
  if (j.contains("ranking_source")) config.ranking_source = j["ranking_source"].get<std::string>();
  if (j.contains("seed_exemplars")) config.seed_exemplars = j["seed_exemplars"].get<uint64_t>();
  if (j.contains("seed_bootstrap")) config.seed_bootstrap = j["seed_bootstrap"].get<uint64_t>();
  // Run manifests are valid configs: re-running from manifest.json with the
  // same store reproduces the run.
  if (j.contains("seeds")) {
    config.seed_exemplars = j["seeds"].value("exemplars", config.seed_exemplars);
    config.seed_bootstrap = j["seeds"].value("bootstrap", config.seed_bootstrap);
  }
  if (j.contains("bootstrap_resamples")) config.bootstrap_resamples = j["bootstrap_resamples"].get<int>();
  if (j.contains("jobs")) config.jobs = j["jobs"].get<unsigned>();
  if (j.contains("templates")) config.template_dir = j["templates"].get<std::string>();
  if (j.contains("model")) {
    const json& m = j["model"];
    if (m.contains("name")) config.model.model_name = m["name"].get<std::string>();
    if (m.contains("base_url")) config.model.base_url = m["base_url"].get<std::string>();
    if (m.contains("api_key_env")) config.model.api_key_env = m["api_key_env"].get<std::string>();
    if (m.contains("reasoning_class")) config.model.reasoning_class = m["reasoning_class"].get<std::string>();
    if (m.contains("temperature")) config.model.sampling.temperature = m["temperature"].get<double>();
    if (m.contains("top_p")) config.model.sampling.top_p = m["top_p"].get<double>();
    if (m.contains("max_tokens")) config.model.sampling.max_tokens = m["max_tokens"].get<unsigned>();
  }
}

std::shared_ptr<llm::Gateway> make_gateway(const strat::ExperimentConfig& config,
                                           std::shared_ptr<llm::TranscriptStore>& store_out) {
  std::shared_ptr<llm::TranscriptStore> store;
  if (config.mode != llm::GatewayMode::Live) {
    if (config.transcript_path.empty()) {
      throw std::runtime_error("record/replay modes need --transcripts");
    }
    store = std::make_shared<llm::TranscriptStore>(config.transcript_path,
                                                   config.mode == llm::GatewayMode::Record);
  }
  std::shared_ptr<llm::ChatClient> client;
  if (config.mode != llm::GatewayMode::Replay) {
    client = std::make_shared<llm::HttpChatClient>();
  }
  store_out = store;
  return std::make_shared<llm::Gateway>(config.mode, client, store);
}

int run_one_experiment(const corpus::Corpus& corpus, const strat::ExperimentConfig& config) {
  bool needs_gateway = false;
  for (const auto& spec : config.methods) {
    for (const auto& leg : spec.legs) {
      if (!strat::is_baseline_leg(leg)) needs_gateway = true;
    }
  }
  std::shared_ptr<llm::TranscriptStore> store;
  std::shared_ptr<llm::Gateway> gateway;
  if (needs_gateway || config.ranking_source == "llm") {
    gateway = make_gateway(config, store);
  } else {
    gateway = std::make_shared<llm::Gateway>(llm::GatewayMode::Live,
                                             std::make_shared<llm::StubChatClient>(
                                                 [](const llm::CompletionRequest&) {
                                                   return std::string();
                                                 }),
                                             nullptr);
  }
  strat::ExperimentResult result = strat::run_experiment(corpus, config, *gateway);
  strat::write_run_outputs(config.output_dir, corpus, config, result, store.get());
  std::cout << eval::render_report_table(result.reports);
  std::cout << "run written to " << config.output_dir.string() << "\n";
  return kExitOk;
}

// --- report -------------------------------------------------------------------

int cmd_report(const fs::path& corpus_root, const std::vector<fs::path>& attempt_files,
               const fs::path& out_dir, uint64_t seed_bootstrap, int resamples) {
  corpus::Corpus corpus = corpus::load_corpus(corpus_root);
  std::map<std::string, double> golds;
  std::map<std::string, uint64_t> words;
  for (const corpus::CaseRecord* c : corpus::tax_cases(corpus)) {
    golds[c->case_id] = static_cast<double>(c->gold_answer_dollars);
    words[c->case_id] = c->word_count;
  }

  // Group attempts by (model, method, sample).
  struct Key {
    std::string model, method;
    unsigned sample;
    bool operator<(const Key& o) const {
      return std::tie(model, method, sample) < std::tie(o.model, o.method, o.sample);
    }
  };
  std::map<Key, std::map<std::string, Prediction>> groups;
  for (const fs::path& file : attempt_files) {
    for (const strat::Attempt& a : strat::read_attempt_file(file)) {
      groups[{a.model_name, strat::method_name(a.method), a.sample_index}][a.case_id] =
          a.prediction;
    }
  }
  if (groups.empty()) throw std::runtime_error("no attempt rows found");

  // Coverage check: every group must cover the same 100 cases.
  for (const auto& [key, by_case] : groups) {
    if (by_case.size() != golds.size()) {
      std::cerr << "coverage mismatch: " << key.model << "/" << key.method << "/s"
                << key.sample << " covers " << by_case.size() << " of " << golds.size()
                << " cases\n";
      return kExitMismatch;
    }
  }

  eval::CostModelParams params;
  std::vector<eval::CostReport> reports;
  auto outcomes_for = [&](const std::map<std::string, Prediction>& preds) {
    std::vector<eval::CaseOutcome> outcomes;
    for (const auto& [id, gold] : golds) {
      outcomes.push_back(eval::score_case(id, gold, preds.at(id), params));
    }
    return outcomes;
  };
  auto is_baseline_model = [](const std::string& model) {
    return strat::is_baseline_leg(model);
  };
  std::set<std::string> models_present;
  for (const auto& [key, by_case] : groups) {
    if (!is_baseline_model(key.model)) models_present.insert(key.model);
  }

  // Single-method rows (sample 0), then self-pairs, then cross pairs.
  // Baseline attempt rows (model AlwaysAbstain/AlwaysZero) stay single rows.
  struct Single {
    std::string label, model;
    const std::map<std::string, Prediction>* preds;
  };
  std::vector<Single> singles;
  for (const auto& [key, by_case] : groups) {
    if (key.sample != 0) continue;
    if (is_baseline_model(key.model)) {
      reports.push_back(eval::make_report("baseline", key.model, outcomes_for(by_case),
                                          resamples, seed_bootstrap));
      continue;
    }
    std::string label =
        models_present.size() > 1 ? key.model + ":" + key.method : key.method;
    reports.push_back(eval::make_report(key.model, key.method, outcomes_for(by_case),
                                        resamples, seed_bootstrap));
    singles.push_back({label, key.model, &by_case});
  }
  auto combine_maps = [](const std::map<std::string, Prediction>& a,
                         const std::map<std::string, Prediction>& b) {
    std::map<std::string, Prediction> out;
    for (const auto& [id, pa] : a) {
      const Prediction& pb = b.at(id);
      if (pa.answered && pb.answered &&
          std::llround(pa.value) == std::llround(pb.value)) {
        out[id] = pa;
      } else {
        out[id] = Prediction::abstain(AbstainReason::NoConsensus);
      }
    }
    return out;
  };
  for (const auto& [key, by_case] : groups) {
    if (key.sample != 1 || is_baseline_model(key.model)) continue;
    Key zero{key.model, key.method, 0};
    auto it = groups.find(zero);
    if (it == groups.end()) continue;
    reports.push_back(eval::make_report(key.model, key.method + "+" + key.method,
                                        outcomes_for(combine_maps(it->second, by_case)),
                                        resamples, seed_bootstrap));
  }
  for (size_t i = 0; i < singles.size(); ++i) {
    for (size_t j = i + 1; j < singles.size(); ++j) {
      std::string model = singles[i].model == singles[j].model
                              ? singles[i].model
                              : singles[i].model + "/" + singles[j].model;
      reports.push_back(eval::make_report(
          model, singles[i].label + "+" + singles[j].label,
          outcomes_for(combine_maps(*singles[i].preds, *singles[j].preds)), resamples,
          seed_bootstrap));
    }
  }

  // Failure counts across model attempts (wrong answers only; baselines and
  // repeated samples excluded so counts mirror one attempt per method).
  std::map<std::string, int> failures;
  for (const auto& [id, gold] : golds) failures[id] = 0;
  for (const auto& [key, by_case] : groups) {
    if (is_baseline_model(key.model) || key.sample != 0) continue;
    for (const auto& [id, p] : by_case) {
      if (p.answered && !eval::exact_match(p.value, golds.at(id))) ++failures[id];
    }
  }

  fs::create_directories(out_dir);
  std::ofstream(out_dir / "report.txt") << eval::render_report_table(reports);
  std::ofstream(out_dir / "report.jsonl") << eval::reports_to_jsonl(reports);
  if (!singles.empty()) {
    std::vector<std::pair<std::string, std::map<std::string, Prediction>>> named;
    for (const auto& s : singles) named.emplace_back(s.label, *s.preds);
    eval::OverlapMatrix matrix = eval::overlap_matrix(named, golds);
    std::ofstream(out_dir / "overlap.tsv") << eval::overlap_matrix_tsv(matrix);
  }
  std::vector<std::tuple<std::string, uint64_t, int>> scatter_rows;
  std::vector<std::pair<uint64_t, int>> points;
  for (const auto& [id, count] : failures) {
    scatter_rows.emplace_back(id, words.at(id), count);
    points.emplace_back(words.at(id), count);
  }
  std::ofstream(out_dir / "scatter.tsv") << eval::scatter_tsv(scatter_rows);
  eval::HardestCases hardest = eval::hardest_cases(failures, 5);
  std::ofstream(out_dir / "hardest_cases.txt") << eval::hardest_cases_text(hardest);

  std::cout << eval::render_report_table(reports);
  if (auto r = eval::length_failure_correlation(points)) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", *r);
    std::cout << "length-failure Pearson r = " << buf << "\n";
  } else {
    std::cout << "length-failure Pearson r undefined (zero variance)\n";
  }
  std::cout << eval::hardest_cases_text(hardest);
  std::cout << "analysis written to " << out_dir.string() << "\n";
  return kExitOk;
}

// --- scan-builtins -------------------------------------------------------------

int cmd_scan_builtins(const fs::path& corpus_root, const fs::path& out_path) {
  corpus::Corpus corpus = corpus::load_corpus(corpus_root);
  logic::KnowledgeBase merged;
  merged.append(corpus.statutes_kb);
  for (const auto& c : corpus.cases) merged.append(c.gold_facts);

  std::set<std::string> referenced = merged.referenced_predicates();
  // Gold queries call predicates too.
  for (const auto& c : corpus.cases) {
    logic::TermPtr goal = c.gold_query.goal;
    referenced.insert(logic::pred_indicator(logic::pred_key(*goal)));
  }

  std::ostringstream out;
  bool missing = false;
  for (const std::string& pi : referenced) {
    size_t slash = pi.rfind('/');
    logic::PredKey key{pi.substr(0, slash),
                       static_cast<uint32_t>(std::stoul(pi.substr(slash + 1)))};
    std::string kind;
    if (merged.defines(key)) {
      kind = "defined";
    } else if (logic::is_control_or_builtin(key)) {
      kind = "builtin";
    } else if (merged.is_dynamic(key)) {
      kind = "dynamic";
    } else {
      kind = "MISSING";
      missing = true;
    }
    out << pi << "\t" << kind << "\n";
  }
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::trunc);
    f << out.str();
  }
  std::cout << out.str();
  if (missing) {
    std::cout << "MISSING predicates found: the engine does not cover this corpus\n";
    return kExitMismatch;
  }
  std::cout << "builtin closure: every referenced predicate is covered\n";
  return kExitOk;
}

// --- repl -----------------------------------------------------------------------

void print_trace_event(const logic::TraceEvent& ev) {
  logic::WriteOptions opts;
  opts.bindings = ev.bindings;
  opts.max_depth = 40;
  std::string indent(static_cast<size_t>(ev.depth) * 2, ' ');
  switch (ev.kind) {
    case logic::TraceEvent::Kind::Call:
      std::cout << indent << "CALL " << logic::term_to_string(ev.goal, opts) << "\n";
      break;
    case logic::TraceEvent::Kind::ClauseTry:
      if (ev.clause != nullptr) {
        std::cout << indent << "  try " << logic::term_to_string(ev.clause->head, {})
                  << "  [" << ev.clause->span.file << ":" << ev.clause->span.line << "]\n";
      }
      break;
    case logic::TraceEvent::Kind::Redo:
      std::cout << indent << "REDO " << logic::term_to_string(ev.goal, opts) << "\n";
      break;
    case logic::TraceEvent::Kind::Fail:
      std::cout << indent << "FAIL " << logic::term_to_string(ev.goal, opts) << "\n";
      break;
    case logic::TraceEvent::Kind::Solution:
      break;
  }
}

int cmd_repl(const fs::path& corpus_root, long long budget_ms) {
  std::optional<corpus::Corpus> corpus;
  if (!corpus_root.empty()) {
    corpus = corpus::load_corpus(corpus_root);
    std::cout << "corpus loaded: " << corpus->cases.size() << " cases\n";
  }
  logic::KnowledgeBase kb;
  const corpus::CaseRecord* current_case = nullptr;
  bool trace = false;

  std::cout << "taxlogic repl — :help for commands\n";
  std::string line;
  while (true) {
    std::cout << "tax> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    std::string trimmed = line;
    while (!trimmed.empty() && isspace(static_cast<unsigned char>(trimmed.back()))) {
      trimmed.pop_back();
    }
    if (trimmed.empty()) continue;

    try {
      if (trimmed == ":quit" || trimmed == ":q") break;
      if (trimmed == ":help") {
        std::cout << ":load case <id>   load gold statutes + a case's gold facts\n"
                     ":load file <path> load a Prolog file into the session\n"
                     ":gold             run the loaded case's gold query\n"
                     ":trace on|off     print resolution traces\n"
                     ":quit             leave\n"
                     "<goal>.           query the loaded knowledge base\n";
        continue;
      }
      if (trimmed == ":trace on") {
        trace = true;
        continue;
      }
      if (trimmed == ":trace off") {
        trace = false;
        continue;
      }
      if (trimmed.rfind(":load case ", 0) == 0) {
        if (!corpus) {
          std::cout << "no corpus loaded (start with --corpus)\n";
          continue;
        }
        std::string id = trimmed.substr(11);
        current_case = nullptr;
        for (const auto& c : corpus->cases) {
          if (c.case_id == id) current_case = &c;
        }
        if (current_case == nullptr) {
          std::cout << "no case named " << id << "\n";
          continue;
        }
        kb = corpus::case_execution_kb(*corpus, *current_case);
        std::cout << "loaded " << id << " (" << kb.clauses().size() << " clauses)";
        if (current_case->kind == corpus::CaseKind::NumericTax) {
          std::cout << "; gold query: "
                    << logic::term_to_string(current_case->gold_query.goal, {}) << ", gold $"
                    << current_case->gold_answer_dollars;
        }
        std::cout << "\n";
        continue;
      }
      if (trimmed.rfind(":load file ", 0) == 0) {
        std::ifstream in(trimmed.substr(11));
        if (!in) {
          std::cout << "cannot open file\n";
          continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        logic::ParseOptions opts;
        opts.file = trimmed.substr(11);
        opts.collect_directives = true;
        logic::parse_program_into(kb, buf.str(), opts);
        std::cout << "loaded (" << kb.clauses().size() << " clauses total)\n";
        continue;
      }

      std::string query_text = trimmed;
      if (trimmed == ":gold") {
        if (current_case == nullptr) {
          std::cout << "no case loaded\n";
          continue;
        }
        query_text = logic::term_to_string(current_case->gold_query.goal, {}) + ".";
      }

      logic::ParsedQuery query = logic::parse_query(query_text, kb.operators());
      logic::SolveOptions opts;
      opts.budget = std::chrono::milliseconds(budget_ms);
      if (trace) opts.trace = print_trace_event;
      logic::Solver solver(kb, opts);
      bool more = true;
      int solutions = 0;
      logic::ExecutionOutcome outcome =
          solver.solve_all(query, [&](const logic::AnswerBindings& answers) {
            ++solutions;
            if (answers.empty()) {
              std::cout << "true";
            } else {
              for (size_t i = 0; i < answers.size(); ++i) {
                if (i) std::cout << ", ";
                std::cout << answers[i].first << " = "
                          << logic::term_to_string(answers[i].second, {});
              }
            }
            std::cout << " ? ";
            std::string cont;
            if (!std::getline(std::cin, cont) || cont != ";") {
              more = false;
              return false;
            }
            return true;
          });
      if (outcome.kind == logic::OutcomeKind::NoSolution && solutions == 0) {
        std::cout << "false.\n";
      } else if (outcome.kind == logic::OutcomeKind::Timeout) {
        std::cout << "timeout after " << outcome.elapsed.count() << " ms\n";
      } else if (outcome.kind == logic::OutcomeKind::EngineError) {
        std::cout << "error: " << outcome.error_message << "\n";
      } else if (!more || outcome.kind == logic::OutcomeKind::Solved ||
                 outcome.kind == logic::OutcomeKind::NoSolution) {
        std::cout << (solutions > 0 ? "done.\n" : "false.\n");
      }
    } catch (const ParseError& e) {
      std::cout << "parse error: " << e.what() << "\n";
    } catch (const std::exception& e) {
      std::cout << "error: " << e.what() << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"taxlogic: a Prolog-subset engine and LLM pipeline for statutory tax calculation"};
  app.require_subcommand(1);

  // validate
  auto* validate = app.add_subcommand("validate", "execute every gold tax case and compare");
  fs::path v_corpus;
  long long v_budget = 10000;
  unsigned v_jobs = 1;
  fs::path v_report;
  validate->add_option("--corpus", v_corpus, "corpus root directory")->required();
  validate->add_option("--budget-ms", v_budget, "per-case execution budget (ms)");
  validate->add_option("--jobs", v_jobs, "worker threads");
  validate->add_option("--report", v_report, "write per-case JSONL report here");

  // run
  auto* run = app.add_subcommand("run", "run solution methods over the 100 tax cases");
  strat::ExperimentConfig config;
  std::vector<std::string> method_names;
  std::string mode_name = "replay";
  fs::path config_file;
  bool ablation = false;
  long long r_budget = -1;
  run->add_option("--config", config_file, "JSON config file (flags override it)");
  run->add_option("--corpus", config.corpus_root, "corpus root directory");
  run->add_option("--out", config.output_dir, "run output directory");
  run->add_option("--method", method_names,
                  "method rows: Direct, Parsed, FewShot, pairs like Direct+Parsed, "
                  "or baselines AlwaysAbstain / AlwaysZero");
  run->add_option("--mode", mode_name, "live | record | replay");
  run->add_option("--transcripts", config.transcript_path, "transcript store path");
  run->add_option("--model-name", config.model.model_name, "provider model name");
  run->add_option("--base-url", config.model.base_url, "OpenAI-compatible base URL");
  run->add_option("--api-key-env", config.model.api_key_env,
                  "environment variable holding the bearer token");
  run->add_option("--temperature", config.model.sampling.temperature, "sampling temperature");
  run->add_option("--top-p", config.model.sampling.top_p, "nucleus sampling");
  run->add_option("--max-tokens", config.model.sampling.max_tokens, "completion token cap");
  run->add_option("--reasoning-class", config.model.reasoning_class, "chat | reasoning");
  run->add_option("--budget-ms", r_budget, "execution budget per generated program (ms)");
  run->add_option("--k", config.k_exemplars, "few-shot exemplar count");
  run->add_option("--ranking", config.ranking_source, "llm | lexical | random");
  run->add_option("--seed-exemplars", config.seed_exemplars, "seed for random exemplars");
  run->add_option("--seed-bootstrap", config.seed_bootstrap, "seed for bootstrap intervals");
  run->add_option("--resamples", config.bootstrap_resamples, "bootstrap resamples");
  run->add_option("--jobs", config.jobs, "concurrent cases");
  run->add_option("--templates", config.template_dir, "prompt template override directory");
  run->add_flag("--ablation-ranked-vs-random", ablation,
                "run FewShot twice: configured ranking vs random exemplars");
  run->add_flag("--fixture-model", [&config](int64_t) { config.model = fixture::fixture_model_spec(); },
                "use the synthetic fixture model spec (offline replay)");

  // report
  auto* report = app.add_subcommand("report", "render tables and analyses from attempt rows");
  fs::path rep_corpus, rep_out = "report_out";
  std::vector<fs::path> rep_attempts;
  uint64_t rep_seed = 17;
  int rep_resamples = 10000;
  report->add_option("--corpus", rep_corpus, "corpus root (gold answers)")->required();
  report->add_option("--attempts", rep_attempts, "attempt JSONL files")->required();
  report->add_option("--out", rep_out, "analysis output directory");
  report->add_option("--seed-bootstrap", rep_seed, "bootstrap seed");
  report->add_option("--resamples", rep_resamples, "bootstrap resamples");

  // repl
  auto* repl = app.add_subcommand("repl", "interactive query and audit-trace session");
  fs::path repl_corpus;
  long long repl_budget = 10000;
  repl->add_option("--corpus", repl_corpus, "corpus root directory");
  repl->add_option("--budget-ms", repl_budget, "per-query budget (ms)");

  // scan-builtins
  auto* scan = app.add_subcommand("scan-builtins",
                                  "list every predicate the gold corpus needs, classified");
  fs::path scan_corpus, scan_out;
  scan->add_option("--corpus", scan_corpus, "corpus root directory")->required();
  scan->add_option("--out", scan_out, "write the manifest here");

  // make-fixture
  auto* mkfix = app.add_subcommand("make-fixture",
                                   "write the deterministic synthetic corpus (and transcripts)");
  fs::path fix_out;
  bool fix_transcripts = false;
  mkfix->add_option("--out", fix_out, "target directory")->required();
  mkfix->add_flag("--transcripts", fix_transcripts,
                  "also synthesize replay transcripts (transcripts.jsonl)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      return cmd_validate(v_corpus, v_budget, v_jobs, v_report);
    }
    if (*run) {
      if (!config_file.empty()) {
        strat::ExperimentConfig file_config;
        std::vector<std::string> file_methods;
        std::string file_mode = mode_name;
        apply_config_file(config_file, file_config, file_methods, file_mode);
        // Flags given on the command line win; unset ones take config values.
        if (config.corpus_root.empty()) config.corpus_root = file_config.corpus_root;
        if (config.output_dir.empty()) config.output_dir = file_config.output_dir;
        if (config.transcript_path.empty()) config.transcript_path = file_config.transcript_path;
        if (method_names.empty()) method_names = file_methods;
        if (run->count("--mode") == 0) mode_name = file_mode;
        if (run->count("--model-name") == 0 && !file_config.model.model_name.empty()) {
          config.model = file_config.model;
        }
        if (r_budget < 0 && file_config.budget.count() != 10000) {
          r_budget = file_config.budget.count();
        }
        if (run->count("--k") == 0) config.k_exemplars = file_config.k_exemplars;
        if (run->count("--ranking") == 0) config.ranking_source = file_config.ranking_source;
        if (run->count("--seed-exemplars") == 0) config.seed_exemplars = file_config.seed_exemplars;
        if (run->count("--seed-bootstrap") == 0) config.seed_bootstrap = file_config.seed_bootstrap;
        if (run->count("--resamples") == 0) config.bootstrap_resamples = file_config.bootstrap_resamples;
        if (run->count("--jobs") == 0) config.jobs = file_config.jobs;
        if (config.template_dir.empty()) config.template_dir = file_config.template_dir;
      }
      if (r_budget >= 0) config.budget = std::chrono::milliseconds(r_budget);
      if (config.corpus_root.empty() || config.output_dir.empty() || method_names.empty()) {
        std::cerr << "run needs --corpus, --out, and at least one --method\n";
        return kExitConfig;
      }
      auto mode = llm::parse_gateway_mode(mode_name);
      if (!mode) {
        std::cerr << "unknown mode '" << mode_name << "'\n";
        return kExitConfig;
      }
      config.mode = *mode;
      for (const auto& name : method_names) {
        auto spec = strat::parse_method_spec(name);
        if (!spec) {
          std::cerr << "unknown method spec '" << name << "'\n";
          return kExitConfig;
        }
        config.methods.push_back(*spec);
      }
      corpus::Corpus corpus = corpus::load_corpus(config.corpus_root);
      if (!ablation) {
        return run_one_experiment(corpus, config);
      }
      // Table-4-style ablation: same method set, ranked vs random exemplars.
      strat::ExperimentConfig ranked = config;
      ranked.output_dir = config.output_dir / "ranked";
      strat::ExperimentConfig random_arm = config;
      random_arm.ranking_source = "random";
      random_arm.output_dir = config.output_dir / "random";
      int rc1 = run_one_experiment(corpus, ranked);
      int rc2 = run_one_experiment(corpus, random_arm);
      return rc1 != kExitOk ? rc1 : rc2;
    }
    if (*report) {
      return cmd_report(rep_corpus, rep_attempts, rep_out, rep_seed, rep_resamples);
    }
    if (*repl) {
      return cmd_repl(repl_corpus, repl_budget);
    }
    if (*scan) {
      return cmd_scan_builtins(scan_corpus, scan_out);
    }
    if (*mkfix) {
      fixture::write_corpus(fix_out);
      std::cout << "fixture corpus written to " << fix_out.string() << "\n";
      if (fix_transcripts) {
        corpus::Corpus corpus = corpus::load_corpus(fix_out);
        fs::path store = fix_out / "transcripts.jsonl";
        fixture::write_transcripts(corpus, store);
        std::cout << "fixture transcripts written to " << store.string() << "\n";
      }
      return kExitOk;
    }
  } catch (const corpus::CorpusError& e) {
    std::cerr << "corpus error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const llm::CacheMissError& e) {
    std::cerr << "transcript cache miss: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
