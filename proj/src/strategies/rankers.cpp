#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "taxlogic/evaluator.hpp"
#include "taxlogic/strategies.hpp"

namespace taxlogic::strat {

using corpus::CaseRecord;

namespace {

std::map<std::string, double> term_frequencies(const std::string& text) {
  std::map<std::string, double> tf;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) {
      tf[word] += 1.0;
      word.clear();
    }
  };
  for (char c : text) {
    if (isalnum(static_cast<unsigned char>(c))) {
      word.push_back(static_cast<char>(tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();
  return tf;
}

double cosine(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (const auto& [w, f] : a) {
    na += f * f;
    auto it = b.find(w);
    if (it != b.end()) dot += f * it->second;
  }
  for (const auto& [w, f] : b) nb += f * f;
  if (na == 0 || nb == 0) return 0;
  return dot / std::sqrt(na * nb);
}

std::vector<std::string> pool_ids_sorted(const CaseRecord& target,
                                         const std::vector<const CaseRecord*>& pool) {
  std::vector<std::string> ids;
  for (const CaseRecord* c : pool) {
    if (c->case_id != target.case_id) ids.push_back(c->case_id);
  }
  std::sort(ids.begin(), ids.end(), eval::natural_id_less);
  return ids;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Fisher-Yates with raw engine draws; std::shuffle is implementation-defined
// and would break cross-platform replay determinism.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng() % i]);
  }
}

}  // namespace

ExemplarRanking rank_exemplars_lexical(const CaseRecord& target,
                                       const std::vector<const CaseRecord*>& pool) {
  ExemplarRanking out;
  out.target_case_id = target.case_id;
  out.ranker = "lexical";
  auto target_tf = term_frequencies(target.facts_text + " " + target.question_text);
  std::vector<std::pair<double, std::string>> scored;
  for (const CaseRecord* c : pool) {
    if (c->case_id == target.case_id) continue;
    double score = cosine(target_tf, term_frequencies(c->facts_text + " " + c->question_text));
    scored.emplace_back(score, c->case_id);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return eval::natural_id_less(a.second, b.second);
  });
  for (auto& [score, id] : scored) out.ranked_ids.push_back(std::move(id));
  return out;
}

ExemplarRanking rank_exemplars_random(const CaseRecord& target,
                                      const std::vector<const CaseRecord*>& pool,
                                      uint64_t seed) {
  ExemplarRanking out;
  out.target_case_id = target.case_id;
  out.ranker = "random(" + std::to_string(seed) + ")";
  out.ranked_ids = pool_ids_sorted(target, pool);
  // Per-case stream derived from the experiment seed and a portable id hash.
  std::mt19937_64 rng(seed ^ fnv1a(target.case_id));
  deterministic_shuffle(out.ranked_ids, rng);
  return out;
}

ExemplarRanking rank_exemplars_llm(const CaseRecord& target,
                                   const std::vector<const CaseRecord*>& pool,
                                   StrategyContext& ctx) {
  std::vector<std::string> all_ids = pool_ids_sorted(target, pool);
  std::set<std::string> known(all_ids.begin(), all_ids.end());

  std::string candidates;
  for (const CaseRecord* c : pool) {
    if (c->case_id == target.case_id) continue;
    candidates += c->case_id + ": " + c->facts_text + " " + c->question_text + "\n\n";
  }
  std::vector<llm::Message> messages =
      llm::render_prompt("rerank_v1",
                         {{"case_text", target.facts_text + " " + target.question_text},
                          {"candidates", candidates}},
                         ctx.template_dir);
  llm::CompletionRequest req;
  req.model = ctx.model;
  req.messages = std::move(messages);
  req.sample_index = 0;
  req.tag = "rerank";

  std::string response;
  try {
    response = ctx.gateway->complete(req).text;
  } catch (const llm::TransportError&) {
    ExemplarRanking fallback = rank_exemplars_lexical(target, pool);
    fallback.ranker = "lexical_fallback";
    return fallback;
  }

  // Listwise parse: accept ids anywhere in the reply, first occurrence wins.
  ExemplarRanking out;
  out.target_case_id = target.case_id;
  out.ranker = "llm";
  std::set<std::string> seen;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) {
      if (known.count(token) > 0 && seen.insert(token).second) {
        out.ranked_ids.push_back(token);
      }
      token.clear();
    }
  };
  for (char c : response) {
    if (isalnum(static_cast<unsigned char>(c)) || c == '_') {
      token.push_back(static_cast<char>(tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();

  if (out.ranked_ids.empty()) {
    ExemplarRanking fallback = rank_exemplars_lexical(target, pool);
    fallback.ranker = "lexical_fallback";
    return fallback;
  }
  // Repair rule: append missing ids in stable id order.
  for (const std::string& id : all_ids) {
    if (seen.insert(id).second) out.ranked_ids.push_back(id);
  }
  return out;
}

}  // namespace taxlogic::strat
