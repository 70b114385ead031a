#include <cstdint>
#include <filesystem>

#include "taxlogic/fixture.hpp"
#include "taxlogic/strategies.hpp"

namespace taxlogic::fixture {

using corpus::CaseRecord;
using corpus::Corpus;
using strat::ExemplarRanking;

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Wrong-but-plausible dollar amount; depends on the case and method only, so
// two samples that both go wrong agree (a consensus failure), mirroring how
// a model repeats its own systematic mistakes.
int64_t wrong_amount(const CaseRecord& record, const std::string& method) {
  uint64_t h = fnv1a(record.case_id + "|" + method + "|wrong");
  int64_t gold = record.gold_answer_dollars;
  switch (h % 4) {
    case 0: return gold + 137 + static_cast<int64_t>(h % 9000);          // small overstatement
    case 1: return gold + 5300 + static_cast<int64_t>(h % 40000);        // large overstatement
    case 2: return std::max<int64_t>(0, gold - 400 - static_cast<int64_t>(h % 4000));
    default: return std::max<int64_t>(0, gold / 2 - static_cast<int64_t>(h % 8000));
  }
}

std::string direct_response(const CaseRecord& record, unsigned sample, uint64_t h) {
  std::string reasoning =
      "Working through the statutes for " + record.case_id + " (draw " +
      std::to_string(sample) + "): gross income, then the deduction election, then the "
      "rate schedule.\n";
  unsigned cls = h % 100;
  if (cls < 48) {
    return reasoning + "ANSWER: $" + std::to_string(record.gold_answer_dollars) + "\n";
  }
  if (cls < 96) {
    return reasoning + "ANSWER: $" + std::to_string(wrong_amount(record, "Direct")) + "\n";
  }
  return reasoning + "I cannot settle on a single amount.\n";
}

std::string parsed_response(const CaseRecord& record, unsigned sample, uint64_t h) {
  std::string preamble = "Encoding " + record.case_id + " (draw " + std::to_string(sample) +
                         ") as a program.\n\n";
  unsigned cls = h % 100;
  if (cls < 40) {
    return preamble + "```prolog\nanswer(" + std::to_string(record.gold_answer_dollars) +
           ").\n```\n";
  }
  if (cls < 65) {
    return preamble + "```prolog\nanswer(" +
           std::to_string(wrong_amount(record, "Parsed")) + ").\n```\n";
  }
  if (cls < 80) {
    return preamble + "The statutes are too entangled here to encode faithfully.\n";
  }
  if (cls < 90) {  // references an undefined predicate: engine error
    return preamble +
           "```prolog\nanswer(T) :- gross_income_of(" + record.case_id + ", T).\n```\n";
  }
  if (cls < 96) {  // syntax error
    return preamble + "```prolog\nanswer(T) :- T is 1 + .\n```\n";
  }
  if (cls < 98) {  // fails: no solution
    return preamble + "```prolog\nanswer(T) :- fail, T = 0.\n```\n";
  }
  // divergent: times out under the execution budget
  return preamble + "```prolog\nanswer(T) :- spin(T).\nspin(T) :- spin(T).\n```\n";
}

std::string few_shot_response(const CaseRecord& record, unsigned sample, uint64_t h,
                              unsigned correct_below) {
  std::string preamble = "Facts for " + record.case_id + " (draw " + std::to_string(sample) +
                         "), following the exemplars.\n\n";
  unsigned cls = h % 100;
  if (cls < correct_below) {
    return preamble + "```prolog\n" + record.gold_program_text + "```\n";
  }
  if (cls < correct_below + 12) {
    // Perturb the first amount fact: a faithful-looking but wrong parse.
    std::string program = record.gold_program_text;
    size_t pos = program.find("amount_(");
    if (pos != std::string::npos) {
      size_t comma = program.find(',', pos);
      size_t close = program.find(')', comma);
      int64_t value = std::stoll(program.substr(comma + 1, close - comma - 1));
      program = program.substr(0, comma + 1) + " " +
                std::to_string(value + 1000 + static_cast<int64_t>(h % 5000)) +
                program.substr(close);
    } else {
      // No amounts (e.g. employer-only case): drop the last fact line instead.
      size_t cut = program.rfind('\n', program.size() - 2);
      if (cut != std::string::npos) program = program.substr(0, cut + 1);
    }
    return preamble + "```prolog\n" + program + "```\n";
  }
  return preamble + "I am not confident these facts fit the event vocabulary.\n";
}

}  // namespace

llm::ModelSpec fixture_model_spec() {
  llm::ModelSpec spec;
  spec.base_url = "fixture://offline";
  spec.model_name = "fixture-chat-v1";
  spec.sampling.temperature = 1.0;
  spec.sampling.top_p = 1.0;
  spec.sampling.max_tokens = 8192;
  spec.reasoning_class = "chat";
  spec.api_key_env = "";
  return spec;
}

void write_transcripts(const Corpus& corpus, const std::filesystem::path& store_path) {
  std::filesystem::remove(store_path);
  llm::TranscriptStore store(store_path, /*create=*/true);
  llm::ModelSpec model = fixture_model_spec();

  std::vector<const CaseRecord*> cases = corpus::tax_cases(corpus);
  for (const CaseRecord* record : cases) {
    ExemplarRanking ranked = strat::rank_exemplars_lexical(*record, cases);
    // The random-exemplar ablation arm replays with the default seed; its
    // prompts (hence digests) differ, and its quality profile is weaker.
    ExemplarRanking random_arm = strat::rank_exemplars_random(*record, cases, 7);
    for (unsigned sample = 0; sample < 2; ++sample) {
      struct Leg {
        const char* method;
        const char* tag;
        std::vector<llm::Message> messages;
        std::string response;
      };
      uint64_t hd = fnv1a(record->case_id + "|Direct|" + std::to_string(sample));
      uint64_t hp = fnv1a(record->case_id + "|Parsed|" + std::to_string(sample));
      uint64_t hf = fnv1a(record->case_id + "|FewShot|" + std::to_string(sample));
      uint64_t hr = fnv1a(record->case_id + "|FewShotRandom|" + std::to_string(sample));
      Leg legs[] = {
          {"Direct", "direct", strat::direct_messages(corpus, *record),
           direct_response(*record, sample, hd)},
          {"Parsed", "zero_shot_parse", strat::zero_shot_messages(corpus, *record),
           parsed_response(*record, sample, hp)},
          {"FewShot", "few_shot", strat::few_shot_messages(corpus, *record, ranked, 5),
           few_shot_response(*record, sample, hf, 80)},
          {"FewShot", "few_shot", strat::few_shot_messages(corpus, *record, random_arm, 5),
           few_shot_response(*record, sample, hr, 62)},
      };
      for (auto& leg : legs) {
        llm::CompletionRequest request;
        request.model = model;
        request.messages = leg.messages;
        request.sample_index = sample;
        request.tag = leg.tag;

        llm::Transcript t;
        t.digest = llm::request_digest(request);
        t.model_name = model.model_name;
        t.messages = std::move(leg.messages);
        t.sampling = model.sampling;
        t.sample_index = sample;
        t.tag = leg.tag;
        t.response_text = std::move(leg.response);
        t.usage.prompt_tokens = 0;
        for (const auto& m : t.messages) {
          t.usage.prompt_tokens += static_cast<long long>(m.content.size() / 4);
        }
        t.usage.completion_tokens = static_cast<long long>(t.response_text.size() / 4);
        t.latency_ms = 0;
        t.recorded_at = "2025-01-01T00:00:00Z";
        store.append(t);
      }
    }
  }
}

}  // namespace taxlogic::fixture
