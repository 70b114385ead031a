#include <cmath>
#include <random>
#include <thread>
#include "httplib.h"
#include "json.hpp"
#include <filesystem>
#include <set>

#include "doctest.h"
#include "taxlogic/fixture.hpp"
#include "taxlogic/runner.hpp"
#include "taxlogic/strategies.hpp"

using namespace taxlogic;
using namespace taxlogic::strat;
using namespace taxlogic::corpus;
namespace fs = std::filesystem;

namespace {

const Corpus& fixture_corpus() {
  static const Corpus corpus = [] {
    fs::path root = fs::temp_directory_path() / "taxlogic_strat_corpus";
    fs::remove_all(root);
    fixture::write_corpus(root);
    return load_corpus(root);
  }();
  return corpus;
}

StrategyContext make_ctx(llm::Gateway& gateway) {
  StrategyContext ctx;
  ctx.corpus = &fixture_corpus();
  ctx.gateway = &gateway;
  ctx.model = fixture::fixture_model_spec();
  ctx.budget = std::chrono::milliseconds(2000);
  return ctx;
}

llm::Gateway stub_gateway(std::function<std::string(const llm::CompletionRequest&)> fn) {
  return llm::Gateway(llm::GatewayMode::Live, std::make_shared<llm::StubChatClient>(std::move(fn)),
                      nullptr);
}

const CaseRecord& case_by_id(const std::string& id) {
  for (const auto& c : fixture_corpus().cases) {
    if (c.case_id == id) return c;
  }
  throw std::runtime_error("no case " + id);
}

}  // namespace

TEST_CASE("run_direct extracts the marker or abstains") {
  const CaseRecord& record = case_by_id("tax_case_1");
  auto gw = stub_gateway([&](const llm::CompletionRequest& req) {
    CHECK(req.messages.size() == 2);
    CHECK(req.messages[1].content.find(record.facts_text) != std::string::npos);
    CHECK(req.messages[1].content.find("Section 7703") != std::string::npos);
    return "thinking...\nANSWER: $" + std::to_string(record.gold_answer_dollars) + "\n";
  });
  StrategyContext ctx = make_ctx(gw);
  Attempt attempt = run_direct(record, ctx, 0);
  REQUIRE(attempt.prediction.answered);
  CHECK(attempt.prediction.value == doctest::Approx(record.gold_answer_dollars));
  CHECK(attempt.transcript_digests.size() == 1);

  auto prose = stub_gateway([](const llm::CompletionRequest&) { return "no number here"; });
  StrategyContext ctx2 = make_ctx(prose);
  Attempt a2 = run_direct(record, ctx2, 0);
  CHECK_FALSE(a2.prediction.answered);
  CHECK(a2.prediction.reason == AbstainReason::NoMarker);
}

TEST_CASE("always-zero stub over the fixture gives the paper-shaped tallies") {
  const auto tax = tax_cases(fixture_corpus());
  auto gw = stub_gateway([](const llm::CompletionRequest&) { return "ANSWER: $0"; });
  StrategyContext ctx = make_ctx(gw);
  int correct = 0, incorrect = 0;
  for (const CaseRecord* c : tax) {
    Attempt a = run_direct(*c, ctx, 0);
    REQUIRE(a.prediction.answered);
    if (eval::exact_match(a.prediction.value, static_cast<double>(c->gold_answer_dollars))) {
      ++correct;
    } else {
      ++incorrect;
    }
  }
  CHECK(correct == 5);
  CHECK(incorrect == 95);
}

TEST_CASE("run_zero_shot_parsed executes the generated program") {
  const CaseRecord& record = case_by_id("tax_case_2");

  auto good = stub_gateway([](const llm::CompletionRequest&) {
    return "```prolog\nanswer(T) :- T is 1500 + 500.\n```";
  });
  StrategyContext ctx = make_ctx(good);
  Attempt a = run_zero_shot_parsed(record, ctx, 0);
  REQUIRE(a.prediction.answered);
  CHECK(a.prediction.value == doctest::Approx(2000));
  REQUIRE(a.engine.has_value());
  CHECK(a.engine->status == "solved");

  auto syntax_err = stub_gateway([](const llm::CompletionRequest&) {
    return "```prolog\nanswer(T) :- T is 1 +\n```";
  });
  StrategyContext ctx2 = make_ctx(syntax_err);
  a = run_zero_shot_parsed(record, ctx2, 0);
  CHECK_FALSE(a.prediction.answered);
  CHECK(a.prediction.reason == AbstainReason::EngineError);
  CHECK(a.engine->status == "parse_error");

  auto no_block = stub_gateway([](const llm::CompletionRequest&) { return "prose only"; });
  StrategyContext ctx3 = make_ctx(no_block);
  a = run_zero_shot_parsed(record, ctx3, 0);
  CHECK(a.prediction.reason == AbstainReason::NoProgram);

  auto wrong_var = stub_gateway([](const llm::CompletionRequest&) {
    return "```prolog\nanswer(unknowable).\n```";
  });
  StrategyContext ctx4 = make_ctx(wrong_var);
  a = run_zero_shot_parsed(record, ctx4, 0);
  CHECK(a.prediction.reason == AbstainReason::EngineError);
}

TEST_CASE("divergent generated program abstains with timeout near the budget") {
  const CaseRecord& record = case_by_id("tax_case_2");
  auto hang = stub_gateway([](const llm::CompletionRequest&) {
    return "```prolog\nanswer(T) :- spin(T).\nspin(T) :- spin(T).\n```";
  });
  StrategyContext ctx = make_ctx(hang);
  ctx.budget = std::chrono::milliseconds(300);
  auto start = std::chrono::steady_clock::now();
  Attempt a = run_zero_shot_parsed(record, ctx, 0);
  auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK_FALSE(a.prediction.answered);
  CHECK(a.prediction.reason == AbstainReason::Timeout);
  CHECK(a.engine->status == "timeout");
  CHECK(elapsed < std::chrono::seconds(3));
}

TEST_CASE("run_few_shot on echoed gold facts and on perturbed facts") {
  const CaseRecord& record = case_by_id("tax_case_5");
  std::vector<const CaseRecord*> pool = tax_cases(fixture_corpus());
  ExemplarRanking ranking = rank_exemplars_lexical(record, pool);

  auto echo = stub_gateway([&](const llm::CompletionRequest& req) {
    // Few-shot prompt carries the statute programs and k exemplar blocks.
    CHECK(req.messages[1].content.find("rate_schedule(single") != std::string::npos);
    return "```prolog\n" + record.gold_program_text + "```";
  });
  StrategyContext ctx = make_ctx(echo);
  Attempt a = run_few_shot(record, ranking, ctx, 0);
  REQUIRE(a.prediction.answered);
  CHECK(eval::exact_match(a.prediction.value, static_cast<double>(record.gold_answer_dollars)));

  // Omitting an income event scores incorrect (answered), not abstain.
  std::string cut = record.gold_program_text;
  size_t pos = cut.find("income_(");
  if (pos != std::string::npos) {
    // drop the income event line block by renaming the predicate
    cut.replace(pos, 8, "ignored_(");
  }
  auto partial = stub_gateway([&](const llm::CompletionRequest&) {
    return "```prolog\n" + cut + "```";
  });
  StrategyContext ctx2 = make_ctx(partial);
  Attempt b = run_few_shot(record, ranking, ctx2, 0);
  if (b.prediction.answered) {
    CHECK_FALSE(
        eval::exact_match(b.prediction.value, static_cast<double>(record.gold_answer_dollars)));
  } else {
    // only acceptable if the mutation broke executability outright
    CHECK(b.prediction.reason == AbstainReason::EngineError);
  }
}

TEST_CASE("few-shot prompt contains exactly k exemplar blocks, never the target") {
  const CaseRecord& record = case_by_id("tax_case_7");
  std::vector<const CaseRecord*> pool = tax_cases(fixture_corpus());
  ExemplarRanking ranking = rank_exemplars_lexical(record, pool);
  auto messages = few_shot_messages(fixture_corpus(), record, ranking, 5);
  const std::string& user = messages[1].content;
  size_t blocks = 0, pos = 0;
  while ((pos = user.find("Case (tax_case_", pos)) != std::string::npos) {
    ++blocks;
    pos += 1;
  }
  CHECK(blocks == 5);
  CHECK(user.find("Case (" + record.case_id + ")") == std::string::npos);
  // Each exemplar block is the verbatim gold program of a ranked id.
  for (unsigned i = 0; i < 5; ++i) {
    const CaseRecord& ex = case_by_id(ranking.ranked_ids[i]);
    CHECK(user.find(ex.gold_program_text) != std::string::npos);
    CHECK(user.find(ex.facts_text) != std::string::npos);
  }
}

TEST_CASE("lexical ranking is a deterministic permutation of the other 99") {
  const CaseRecord& record = case_by_id("tax_case_3");
  std::vector<const CaseRecord*> pool = tax_cases(fixture_corpus());
  ExemplarRanking r1 = rank_exemplars_lexical(record, pool);
  ExemplarRanking r2 = rank_exemplars_lexical(record, pool);
  CHECK(r1.ranked_ids == r2.ranked_ids);
  CHECK(r1.ranked_ids.size() == 99);
  std::set<std::string> ids(r1.ranked_ids.begin(), r1.ranked_ids.end());
  CHECK(ids.size() == 99);
  CHECK(ids.count(record.case_id) == 0);
}

TEST_CASE("random ranking: same seed same permutation, seeds differ") {
  const CaseRecord& record = case_by_id("tax_case_3");
  std::vector<const CaseRecord*> pool = tax_cases(fixture_corpus());
  ExemplarRanking a = rank_exemplars_random(record, pool, 11);
  ExemplarRanking b = rank_exemplars_random(record, pool, 11);
  ExemplarRanking c = rank_exemplars_random(record, pool, 12);
  CHECK(a.ranked_ids == b.ranked_ids);
  CHECK(a.ranked_ids != c.ranked_ids);
  CHECK(a.ranked_ids.size() == 99);
  CHECK(a.ranker == "random(11)");
}

TEST_CASE("structurally similar cases rank each other into their top exemplars") {
  // Mutually ranked pairs: two cases that appear in each other's top-5.
  std::vector<const CaseRecord*> pool = tax_cases(fixture_corpus());
  std::map<std::string, std::vector<std::string>> top5;
  for (const CaseRecord* c : pool) {
    ExemplarRanking r = rank_exemplars_lexical(*c, pool);
    top5[c->case_id] = {r.ranked_ids.begin(), r.ranked_ids.begin() + 5};
  }
  int mutual = 0;
  for (const auto& [a, heads] : top5) {
    for (const auto& b : heads) {
      const auto& other = top5.at(b);
      if (std::find(other.begin(), other.end(), a) != other.end()) ++mutual;
    }
  }
  CHECK(mutual >= 2);  // counted twice per pair
}

TEST_CASE("llm ranking: verbatim permutation, repair, and fallback") {
  const CaseRecord& record = case_by_id("tax_case_4");
  std::vector<const CaseRecord*> pool = tax_cases(fixture_corpus());

  // Model returns a partial list: missing ids are appended in id order.
  auto partial = stub_gateway([](const llm::CompletionRequest&) {
    return "tax_case_9\ntax_case_7\ntax_case_9\n";  // duplicate kept once
  });
  StrategyContext ctx = make_ctx(partial);
  ExemplarRanking r = rank_exemplars_llm(record, pool, ctx);
  REQUIRE(r.ranked_ids.size() == 99);
  CHECK(r.ranked_ids[0] == "tax_case_9");
  CHECK(r.ranked_ids[1] == "tax_case_7");
  CHECK(r.ranked_ids[2] == "tax_case_1");  // id-order repair begins
  CHECK(r.ranker == "llm");

  // Unparseable output falls back to the lexical ranker.
  auto garbage = stub_gateway([](const llm::CompletionRequest&) { return "???"; });
  StrategyContext ctx2 = make_ctx(garbage);
  ExemplarRanking f = rank_exemplars_llm(record, pool, ctx2);
  CHECK(f.ranker == "lexical_fallback");
  CHECK(f.ranked_ids.size() == 99);
}

TEST_CASE("combine_self_consistency: agreement, disagreement, abstention") {
  Attempt a, b;
  a.method = Method::Direct;
  b.method = Method::Direct;
  a.prediction = Prediction::answer(5000);
  b.prediction = Prediction::answer(5000);
  Prediction combined = combine_self_consistency(a, b);
  REQUIRE(combined.answered);
  CHECK(combined.value == doctest::Approx(5000));

  b.prediction = Prediction::answer(5001);
  combined = combine_self_consistency(a, b);
  CHECK_FALSE(combined.answered);
  CHECK(combined.reason == AbstainReason::NoConsensus);

  b.prediction = Prediction::abstain(AbstainReason::Timeout);
  combined = combine_self_consistency(a, b);
  CHECK_FALSE(combined.answered);
  CHECK(combined.reason == AbstainReason::NoConsensus);

  // Rounded-dollar agreement tolerates cent noise.
  a.prediction = Prediction::answer(4999.999);
  b.prediction = Prediction::answer(5000.001);
  combined = combine_self_consistency(a, b);
  CHECK(combined.answered);

  // The parsed leg's value is reported for auditability.
  a.method = Method::Direct;
  a.prediction = Prediction::answer(5000.4);
  b.method = Method::ZeroShotParsed;
  b.prediction = Prediction::answer(5000.0);
  combined = combine_self_consistency(a, b);
  CHECK(combined.value == doctest::Approx(5000.0));
}

TEST_CASE("consensus properties over random attempt pairs") {
  std::mt19937_64 rng(333);
  for (int i = 0; i < 3000; ++i) {
    auto draw = [&] {
      Attempt a;
      a.method = rng() % 2 ? Method::Direct : Method::ZeroShotParsed;
      if (rng() % 3 == 0) {
        a.prediction = Prediction::abstain(AbstainReason::Timeout);
      } else {
        a.prediction = Prediction::answer(static_cast<double>(rng() % 2000) / 2.0);
      }
      return a;
    };
    Attempt a = draw(), b = draw();
    Prediction combined = combine_self_consistency(a, b);
    // (a) Answer only on rounded-dollar agreement of two Answers.
    if (combined.answered) {
      REQUIRE(a.prediction.answered);
      REQUIRE(b.prediction.answered);
      CHECK(std::llround(a.prediction.value) == std::llround(b.prediction.value));
      CHECK(std::llround(combined.value) == std::llround(a.prediction.value));
    }
    // (b) Abstention monotonicity: combining never converts abstention.
    if (!a.prediction.answered || !b.prediction.answered) {
      CHECK_FALSE(combined.answered);
    }
  }
}

TEST_CASE("method spec parsing") {
  auto single = parse_method_spec("Direct");
  REQUIRE(single.has_value());
  CHECK(single->label() == "Direct");

  auto pair = parse_method_spec("Direct+Parsed");
  REQUIRE(pair.has_value());
  CHECK(pair->legs.size() == 2);
  CHECK(pair->label() == "Direct+Parsed");

  auto same = parse_method_spec("FewShot + FewShot");
  REQUIRE(same.has_value());
  CHECK(same->label() == "FewShot+FewShot");

  CHECK(parse_method_spec("AlwaysAbstain").has_value());
  CHECK_FALSE(parse_method_spec("AlwaysAbstain+Direct").has_value());
  CHECK_FALSE(parse_method_spec("Nope").has_value());
  CHECK_FALSE(parse_method_spec("Direct+Nope").has_value());
}

TEST_CASE("record through the HTTP client, then replay without a network") {
  httplib::Server server;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body);
    std::string prompt = body["messages"].back()["content"];
    // Answer depends on the prompt so distinct cases get distinct replies.
    nlohmann::json out = {
        {"choices",
         {{{"message",
            {{"role", "assistant"},
             {"content", "Reasoning about " + std::to_string(prompt.size()) +
                             " characters.\nANSWER: $" +
                             std::to_string(prompt.size() % 9973)}}}}}},
        {"usage", {{"prompt_tokens", 1}, {"completion_tokens", 1}}},
    };
    res.set_content(out.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  fs::path store_path = fs::temp_directory_path() / "taxlogic_live_record.jsonl";
  fs::remove(store_path);

  llm::ModelSpec model;
  model.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  model.model_name = "fake-live";
  model.api_key_env = "";

  const CaseRecord& record = case_by_id("tax_case_11");
  Attempt recorded;
  {
    auto store = std::make_shared<llm::TranscriptStore>(store_path, true);
    llm::Gateway gateway(llm::GatewayMode::Record,
                         std::make_shared<llm::HttpChatClient>(), store);
    StrategyContext ctx = make_ctx(gateway);
    ctx.model = model;
    recorded = run_direct(record, ctx, 0);
    REQUIRE(recorded.prediction.answered);
    CHECK(store->size() == 1);
  }
  server.stop();
  server_thread.join();

  // Replay: no server, identical outcome.
  auto store = std::make_shared<llm::TranscriptStore>(store_path);
  llm::Gateway gateway(llm::GatewayMode::Replay, nullptr, store);
  StrategyContext ctx = make_ctx(gateway);
  ctx.model = model;
  Attempt replayed = run_direct(record, ctx, 0);
  REQUIRE(replayed.prediction.answered);
  CHECK(replayed.prediction.value == recorded.prediction.value);
  CHECK(replayed.transcript_digests == recorded.transcript_digests);
}

TEST_CASE("attempt rows round-trip through JSON") {
  Attempt a;
  a.case_id = "tax_case_9";
  a.method = Method::FewShotGold;
  a.sample_index = 1;
  a.model_name = "m";
  a.prediction = Prediction::answer(123.5);
  EngineSummary e;
  e.status = "solved";
  e.inferences = 424242;
  a.engine = e;
  a.transcript_digests = {"d1", "d2"};
  Attempt b = attempt_from_json_line(attempt_to_json_line(a));
  CHECK(b.case_id == a.case_id);
  CHECK(b.method == a.method);
  CHECK(b.sample_index == 1);
  CHECK(b.prediction.answered);
  CHECK(b.prediction.value == doctest::Approx(123.5));
  CHECK(b.engine->inferences == 424242);
  CHECK(b.transcript_digests == a.transcript_digests);

  a.prediction = Prediction::abstain(AbstainReason::NoProgram);
  Attempt c = attempt_from_json_line(attempt_to_json_line(a));
  CHECK_FALSE(c.prediction.answered);
  CHECK(c.prediction.reason == AbstainReason::NoProgram);
}
