#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "taxlogic/corpus.hpp"
#include "taxlogic/gateway.hpp"
#include "taxlogic/prediction.hpp"

namespace taxlogic::strat {

enum class Method { Direct, ZeroShotParsed, FewShotGold };

const char* method_name(Method method);
std::optional<Method> parse_method(const std::string& name);

struct EngineSummary {
  std::string status;  // solved | no_solution | timeout | engine_error | parse_error
  std::string error;
  uint64_t inferences = 0;
  long long elapsed_ms = 0;  // audit only; excluded from deterministic outputs
};

/// One (case, method, sample) execution with its audit trail.
struct Attempt {
  std::string case_id;
  Method method = Method::Direct;
  unsigned sample_index = 0;
  Prediction prediction;
  std::optional<EngineSummary> engine;       // parser-backed methods always set it
  std::vector<std::string> transcript_digests;
  std::string model_name;
};

/// Ranked exemplar pool for one target case: a permutation of the other 99
/// numeric case ids, most relevant first.
struct ExemplarRanking {
  std::string target_case_id;
  std::vector<std::string> ranked_ids;
  std::string ranker;  // "llm" | "lexical" | "random(<seed>)" | "lexical_fallback"
};

struct StrategyContext {
  const corpus::Corpus* corpus = nullptr;
  llm::Gateway* gateway = nullptr;
  llm::ModelSpec model;
  std::chrono::milliseconds budget{10000};
  unsigned k_exemplars = 5;
  std::filesystem::path template_dir;  // optional override
};

/// Prompt builders shared by the runtime paths and the transcript fixture
/// generator; both sides must produce byte-identical messages for replay
/// digests to line up.
std::vector<llm::Message> direct_messages(const corpus::Corpus& corpus,
                                          const corpus::CaseRecord& record,
                                          const std::filesystem::path& template_dir = {});
std::vector<llm::Message> zero_shot_messages(const corpus::Corpus& corpus,
                                             const corpus::CaseRecord& record,
                                             const std::filesystem::path& template_dir = {});
std::vector<llm::Message> few_shot_messages(const corpus::Corpus& corpus,
                                            const corpus::CaseRecord& record,
                                            const ExemplarRanking& ranking, unsigned k,
                                            const std::filesystem::path& template_dir = {});

/// Plain-text solving: statutes + case + question in, dollar marker out.
Attempt run_direct(const corpus::CaseRecord& record, StrategyContext& ctx,
                   unsigned sample_index);

/// The model writes a complete program (rules + facts) defining answer/1; the
/// engine executes it under the budget. Extraction/parse/execution failures
/// become abstentions with matching reasons.
Attempt run_zero_shot_parsed(const corpus::CaseRecord& record, StrategyContext& ctx,
                             unsigned sample_index);

/// Gold-statute few-shot: the model translates only the case facts,
/// conditioned on the k most relevant solved cases; the engine loads the gold
/// statute programs plus the generated facts and runs the case's gold query.
Attempt run_few_shot(const corpus::CaseRecord& record, const ExemplarRanking& ranking,
                     StrategyContext& ctx, unsigned sample_index);

/// Term-frequency cosine over case texts; the deterministic offline ranker.
ExemplarRanking rank_exemplars_lexical(const corpus::CaseRecord& target,
                                       const std::vector<const corpus::CaseRecord*>& pool);

/// Uniform permutation, reproducible from (seed, case id).
ExemplarRanking rank_exemplars_random(const corpus::CaseRecord& target,
                                      const std::vector<const corpus::CaseRecord*>& pool,
                                      uint64_t seed);

/// Listwise LLM reranking. Missing ids are appended in id order, duplicates
/// keep the first occurrence, and an unparseable ranking falls back to the
/// lexical ranker with the ranker field marking the fallback.
ExemplarRanking rank_exemplars_llm(const corpus::CaseRecord& target,
                                   const std::vector<const corpus::CaseRecord*>& pool,
                                   StrategyContext& ctx);

/// Accept only when both legs answered and agree at rounded-dollar
/// granularity; the reported value comes from a parser-backed leg when
/// exactly one leg has one (auditability), otherwise from the first.
Prediction combine_self_consistency(const Attempt& a, const Attempt& b);

}  // namespace taxlogic::strat
