#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "taxlogic/evaluator.hpp"
#include "taxlogic/strategies.hpp"

namespace taxlogic::strat {

/// A method row: one leg ("Direct") or a self-consistency pair
/// ("Direct+Parsed", "FewShot+FewShot"). The trivial baselines
/// ("AlwaysAbstain", "AlwaysZero") are stub predictors with no model behind
/// them.
struct MethodSpec {
  std::vector<std::string> legs;  // size 1 or 2
  std::string label() const;
};

std::optional<MethodSpec> parse_method_spec(const std::string& text);
bool is_baseline_leg(const std::string& leg);

struct ExperimentConfig {
  std::filesystem::path corpus_root;
  llm::ModelSpec model;
  std::vector<MethodSpec> methods;
  llm::GatewayMode mode = llm::GatewayMode::Replay;
  std::filesystem::path transcript_path;
  std::filesystem::path output_dir;
  std::chrono::milliseconds budget{10000};
  unsigned k_exemplars = 5;
  std::string ranking_source = "lexical";  // llm | lexical | random
  uint64_t seed_exemplars = 7;
  uint64_t seed_bootstrap = 17;
  int bootstrap_resamples = 10000;
  unsigned jobs = 1;
  std::filesystem::path template_dir;
  eval::CostModelParams cost_params;
};

struct ExperimentResult {
  std::vector<Attempt> attempts;  // constituent attempts, deterministic order
  std::vector<std::pair<std::string, std::map<std::string, Prediction>>> method_predictions;
  std::vector<eval::CostReport> reports;  // one per method spec
  std::vector<ExemplarRanking> rankings;  // few-shot runs only
  // Wall-clock sidecar (case_id, method, sample, elapsed_ms); excluded from
  // the deterministic outputs.
  std::vector<std::tuple<std::string, std::string, unsigned, long long>> timings;
};

/// Runs every method over the 100 numeric tax cases. A failure inside one
/// case becomes an abstention row; configuration errors (cache miss in replay
/// mode, malformed store) propagate.
ExperimentResult run_experiment(const corpus::Corpus& corpus, const ExperimentConfig& config,
                                llm::Gateway& gateway);

/// Writes attempts.jsonl, report.jsonl, report.txt, overlap.tsv,
/// rankings.jsonl, manifest.json, and timings.jsonl under output_dir.
/// Everything except timings.jsonl is byte-deterministic for a fixed
/// transcript store and seeds.
void write_run_outputs(const std::filesystem::path& output_dir, const corpus::Corpus& corpus,
                       const ExperimentConfig& config, const ExperimentResult& result,
                       const llm::TranscriptStore* store);

std::string attempt_to_json_line(const Attempt& attempt);
Attempt attempt_from_json_line(const std::string& line);
std::vector<Attempt> read_attempt_file(const std::filesystem::path& path);

}  // namespace taxlogic::strat
