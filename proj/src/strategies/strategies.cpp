#include "taxlogic/strategies.hpp"

#include <atomic>
#include <cmath>

#include "taxlogic/parser.hpp"
#include "taxlogic/solver.hpp"

namespace taxlogic::strat {

using namespace taxlogic::corpus;
using namespace taxlogic::logic;

const char* method_name(Method method) {
  switch (method) {
    case Method::Direct: return "Direct";
    case Method::ZeroShotParsed: return "Parsed";
    case Method::FewShotGold: return "FewShot";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  if (name == "Direct") return Method::Direct;
  if (name == "Parsed" || name == "ZeroShotParsed") return Method::ZeroShotParsed;
  if (name == "FewShot" || name == "FewShotGold") return Method::FewShotGold;
  return std::nullopt;
}

namespace {

llm::CompletionRequest make_request(StrategyContext& ctx, std::vector<llm::Message> messages,
                                    unsigned sample_index, const std::string& tag) {
  llm::CompletionRequest req;
  req.model = ctx.model;
  req.messages = std::move(messages);
  req.sample_index = sample_index;
  req.tag = tag;
  return req;
}

// Runs a parsed program against the engine and maps the result onto the
// prediction/abstention contract shared by both parser-backed methods.
void execute_program(Attempt& attempt, const KnowledgeBase& kb, const ParsedQuery& query,
                     const std::string& answer_var, StrategyContext& ctx) {
  SolveOptions opts;
  opts.budget = ctx.budget;
  std::atomic<bool> cancel{false};
  opts.cancel = &cancel;
  CancelWatchdog watchdog(cancel, ctx.budget + std::chrono::milliseconds(500));
  DollarOutcome out = run_query_for_dollars(kb, query, answer_var, opts);

  EngineSummary summary;
  summary.inferences = out.outcome.inference_count;
  summary.elapsed_ms = out.outcome.elapsed.count();
  switch (out.outcome.kind) {
    case OutcomeKind::Solved:
      summary.status = "solved";
      attempt.prediction = Prediction::answer(out.dollars);
      break;
    case OutcomeKind::NoSolution:
      summary.status = "no_solution";
      attempt.prediction = Prediction::abstain(AbstainReason::EngineError);
      break;
    case OutcomeKind::Timeout:
      summary.status = "timeout";
      attempt.prediction = Prediction::abstain(AbstainReason::Timeout);
      break;
    case OutcomeKind::EngineError:
      summary.status = "engine_error";
      summary.error = out.outcome.error_message;
      attempt.prediction = Prediction::abstain(AbstainReason::EngineError);
      break;
  }
  attempt.engine = std::move(summary);
}

}  // namespace

std::vector<llm::Message> direct_messages(const Corpus& corpus, const CaseRecord& record,
                                          const std::filesystem::path& template_dir) {
  return llm::render_prompt("direct_v1",
                            {{"statutes", statutes_concatenated(corpus)},
                             {"case_text", record.facts_text},
                             {"question", record.question_text}},
                            template_dir);
}

std::vector<llm::Message> zero_shot_messages(const Corpus& corpus, const CaseRecord& record,
                                             const std::filesystem::path& template_dir) {
  return llm::render_prompt("zero_shot_parse_v1",
                            {{"statutes", statutes_concatenated(corpus)},
                             {"case_text", record.facts_text},
                             {"question", record.question_text}},
                            template_dir);
}

std::vector<llm::Message> few_shot_messages(const Corpus& corpus, const CaseRecord& record,
                                            const ExemplarRanking& ranking, unsigned k,
                                            const std::filesystem::path& template_dir) {
  // Exemplar blocks: verbatim case text and verbatim gold facts, rank order.
  std::string exemplars;
  unsigned taken = 0;
  for (const std::string& id : ranking.ranked_ids) {
    if (taken >= k) break;
    const CaseRecord* exemplar = nullptr;
    for (const auto& c : corpus.cases) {
      if (c.case_id == id) {
        exemplar = &c;
        break;
      }
    }
    if (exemplar == nullptr || exemplar->case_id == record.case_id) continue;
    exemplars += "Case (" + exemplar->case_id + "):\n" + exemplar->facts_text + "\n" +
                 "Question: " + exemplar->question_text + "\n\nProlog facts:\n```prolog\n" +
                 exemplar->gold_program_text + "```\n\n";
    ++taken;
  }
  return llm::render_prompt("few_shot_v1",
                            {{"statute_programs", corpus.statute_programs_text},
                             {"exemplars", exemplars},
                             {"case_text", record.facts_text},
                             {"question", record.question_text}},
                            template_dir);
}

Attempt run_direct(const CaseRecord& record, StrategyContext& ctx, unsigned sample_index) {
  Attempt attempt;
  attempt.case_id = record.case_id;
  attempt.method = Method::Direct;
  attempt.sample_index = sample_index;
  attempt.model_name = ctx.model.model_name;

  std::vector<llm::Message> messages = direct_messages(*ctx.corpus, record, ctx.template_dir);
  llm::Gateway::Completion completion;
  try {
    completion = ctx.gateway->complete(
        make_request(ctx, std::move(messages), sample_index, "direct"));
  } catch (const llm::TransportError&) {
    attempt.prediction = Prediction::abstain(AbstainReason::TransportFailure);
    return attempt;
  }
  attempt.transcript_digests.push_back(completion.digest);
  if (auto dollars = llm::extract_dollar_answer(completion.text)) {
    attempt.prediction = Prediction::answer(*dollars);
  } else {
    attempt.prediction = Prediction::abstain(AbstainReason::NoMarker);
  }
  return attempt;
}

Attempt run_zero_shot_parsed(const CaseRecord& record, StrategyContext& ctx,
                             unsigned sample_index) {
  Attempt attempt;
  attempt.case_id = record.case_id;
  attempt.method = Method::ZeroShotParsed;
  attempt.sample_index = sample_index;
  attempt.model_name = ctx.model.model_name;

  std::vector<llm::Message> messages = zero_shot_messages(*ctx.corpus, record, ctx.template_dir);
  llm::Gateway::Completion completion;
  try {
    completion = ctx.gateway->complete(
        make_request(ctx, std::move(messages), sample_index, "zero_shot_parse"));
  } catch (const llm::TransportError&) {
    attempt.prediction = Prediction::abstain(AbstainReason::TransportFailure);
    return attempt;
  }
  attempt.transcript_digests.push_back(completion.digest);

  auto program = llm::extract_program(completion.text);
  if (!program) {
    attempt.prediction = Prediction::abstain(AbstainReason::NoProgram);
    return attempt;
  }
  KnowledgeBase kb;
  try {
    ParseOptions popts;
    popts.file = "<generated:" + record.case_id + ">";
    kb = parse_program(*program, popts);
  } catch (const ParseError& e) {
    attempt.prediction = Prediction::abstain(AbstainReason::EngineError);
    EngineSummary summary;
    summary.status = "parse_error";
    summary.error = e.what();
    attempt.engine = std::move(summary);
    return attempt;
  }
  // The template contract fixes the entry point: answer/1.
  ParsedQuery query;
  query.goal = make_compound("answer", {make_var("Answer", 0)});
  query.num_vars = 1;
  query.var_names = {{"Answer", 0}};
  execute_program(attempt, kb, query, "Answer", ctx);
  return attempt;
}

Attempt run_few_shot(const CaseRecord& record, const ExemplarRanking& ranking,
                     StrategyContext& ctx, unsigned sample_index) {
  Attempt attempt;
  attempt.case_id = record.case_id;
  attempt.method = Method::FewShotGold;
  attempt.sample_index = sample_index;
  attempt.model_name = ctx.model.model_name;

  std::vector<llm::Message> messages =
      few_shot_messages(*ctx.corpus, record, ranking, ctx.k_exemplars, ctx.template_dir);
  llm::Gateway::Completion completion;
  try {
    completion = ctx.gateway->complete(
        make_request(ctx, std::move(messages), sample_index, "few_shot"));
  } catch (const llm::TransportError&) {
    attempt.prediction = Prediction::abstain(AbstainReason::TransportFailure);
    return attempt;
  }
  attempt.transcript_digests.push_back(completion.digest);

  auto program = llm::extract_program(completion.text);
  if (!program) {
    attempt.prediction = Prediction::abstain(AbstainReason::NoProgram);
    return attempt;
  }
  KnowledgeBase kb;
  kb.append(ctx.corpus->statutes_kb);
  try {
    ParseOptions popts;
    popts.file = "<generated:" + record.case_id + ">";
    popts.collect_directives = true;  // stray directives in output must not execute
    parse_program_into(kb, *program, popts);
  } catch (const ParseError& e) {
    attempt.prediction = Prediction::abstain(AbstainReason::EngineError);
    EngineSummary summary;
    summary.status = "parse_error";
    summary.error = e.what();
    attempt.engine = std::move(summary);
    return attempt;
  }
  execute_program(attempt, kb, record.gold_query, record.answer_var, ctx);
  return attempt;
}

Prediction combine_self_consistency(const Attempt& a, const Attempt& b) {
  if (!a.prediction.answered || !b.prediction.answered) {
    return Prediction::abstain(AbstainReason::NoConsensus);
  }
  if (std::llround(a.prediction.value) != std::llround(b.prediction.value)) {
    return Prediction::abstain(AbstainReason::NoConsensus);
  }
  bool a_parsed = a.method != Method::Direct;
  bool b_parsed = b.method != Method::Direct;
  if (b_parsed && !a_parsed) return b.prediction;
  return a.prediction;
}

}  // namespace taxlogic::strat
