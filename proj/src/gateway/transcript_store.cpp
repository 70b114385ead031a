#include <fstream>
#include <sstream>

#include "json.hpp"
#include "taxlogic/gateway.hpp"

namespace taxlogic::llm {

namespace {

using nlohmann::json;

json transcript_to_json(const Transcript& t) {
  json msgs = json::array();
  for (const auto& m : t.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return json{{"digest", t.digest},
              {"model", t.model_name},
              {"messages", std::move(msgs)},
              {"sampling",
               {{"temperature", t.sampling.temperature},
                {"top_p", t.sampling.top_p},
                {"max_tokens", t.sampling.max_tokens}}},
              {"sample_index", t.sample_index},
              {"tag", t.tag},
              {"response", t.response_text},
              {"reasoning", t.reasoning_text},
              {"usage",
               {{"prompt_tokens", t.usage.prompt_tokens},
                {"completion_tokens", t.usage.completion_tokens}}},
              {"latency_ms", t.latency_ms},
              {"recorded_at", t.recorded_at}};
}

Transcript transcript_from_json(const json& j) {
  Transcript t;
  t.digest = j.at("digest").get<std::string>();
  t.model_name = j.at("model").get<std::string>();
  for (const auto& m : j.at("messages")) {
    t.messages.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
  }
  const auto& s = j.at("sampling");
  t.sampling.temperature = s.at("temperature").get<double>();
  t.sampling.top_p = s.at("top_p").get<double>();
  t.sampling.max_tokens = s.at("max_tokens").get<unsigned>();
  t.sample_index = j.at("sample_index").get<unsigned>();
  t.tag = j.value("tag", "");
  t.response_text = j.at("response").get<std::string>();
  t.reasoning_text = j.value("reasoning", "");
  if (j.contains("usage")) {
    t.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0LL);
    t.usage.completion_tokens = j["usage"].value("completion_tokens", 0LL);
  }
  t.latency_ms = j.value("latency_ms", 0LL);
  t.recorded_at = j.value("recorded_at", "");
  return t;
}

bool same_content(const Transcript& a, const Transcript& b) {
  return transcript_to_json(a) == transcript_to_json(b);
}

}  // namespace

TranscriptStore::TranscriptStore(std::filesystem::path path, bool create)
    : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) {
    if (!create) throw StoreError("transcript store not found: " + path_.string());
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream touch(path_, std::ios::binary | std::ios::app);
    if (!touch) throw StoreError("cannot create transcript store: " + path_.string());
    return;
  }
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw StoreError("cannot open transcript store: " + path_.string());
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw StoreError(path_.string() + ":" + std::to_string(line_no) +
                       ": malformed transcript record");
    }
    Transcript t = transcript_from_json(j);
    by_digest_.emplace(t.digest, std::move(t));
  }
}

const Transcript* TranscriptStore::find(const std::string& digest) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = by_digest_.find(digest);
  return it == by_digest_.end() ? nullptr : &it->second;
}

void TranscriptStore::append(const Transcript& transcript) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = by_digest_.find(transcript.digest);
  if (it != by_digest_.end()) {
    if (!same_content(it->second, transcript)) {
      throw StoreError("digest collision with differing content: " + transcript.digest);
    }
    return;  // idempotent re-record
  }
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw StoreError("cannot append to transcript store: " + path_.string());
  out << transcript_to_json(transcript).dump() << "\n";
  out.flush();
  if (!out) throw StoreError("write failed on transcript store: " + path_.string());
  by_digest_.emplace(transcript.digest, transcript);
}

size_t TranscriptStore::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return by_digest_.size();
}

std::string TranscriptStore::file_sha256() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::ifstream in(path_, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

}  // namespace taxlogic::llm
