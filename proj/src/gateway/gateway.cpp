#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "taxlogic/gateway.hpp"

namespace taxlogic::llm {

namespace {

using nlohmann::json;

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // path prefix, no trailing slash
};

ParsedUrl split_base_url(const std::string& base_url) {
  size_t scheme = base_url.find("://");
  if (scheme == std::string::npos) {
    throw TransportError("base_url must include a scheme: " + base_url);
  }
  size_t path_start = base_url.find('/', scheme + 3);
  ParsedUrl out;
  if (path_start == std::string::npos) {
    out.origin = base_url;
    out.path = "";
  } else {
    out.origin = base_url.substr(0, path_start);
    out.path = base_url.substr(path_start);
  }
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

std::string iso_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const char* gateway_mode_name(GatewayMode mode) {
  switch (mode) {
    case GatewayMode::Live: return "live";
    case GatewayMode::Record: return "record";
    case GatewayMode::Replay: return "replay";
  }
  return "?";
}

std::optional<GatewayMode> parse_gateway_mode(const std::string& name) {
  if (name == "live") return GatewayMode::Live;
  if (name == "record") return GatewayMode::Record;
  if (name == "replay") return GatewayMode::Replay;
  return std::nullopt;
}

HttpChatClient::HttpChatClient(HttpOptions options) : options_(options) {}

ChatClient::Result HttpChatClient::complete(const CompletionRequest& request) {
  ParsedUrl url = split_base_url(request.model.base_url);

  json body;
  body["model"] = request.model.model_name;
  json msgs = json::array();
  for (const auto& m : request.messages) {
    msgs.push_back({{"role", m.role}, {"content", m.content}});
  }
  body["messages"] = std::move(msgs);
  body["temperature"] = request.model.sampling.temperature;
  body["top_p"] = request.model.sampling.top_p;
  body["max_tokens"] = request.model.sampling.max_tokens;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!request.model.api_key_env.empty()) {
    if (const char* key = std::getenv(request.model.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(options_.initial_backoff * (1 << (attempt - 1)));
    }
    httplib::Client client(url.origin);
    client.set_connection_timeout(10, 0);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.read_timeout);
    client.set_read_timeout(static_cast<time_t>(secs.count()), 0);

    auto start = std::chrono::steady_clock::now();
    httplib::Result res =
        client.Post(url.path + "/chat/completions", headers, payload, "application/json");
    auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);

    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
      continue;  // retryable
    }
    if (res->status != 200) {
      throw TransportError("HTTP " + std::to_string(res->status) + ": " +
                           res->body.substr(0, 500));
    }
    json j = json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
      throw TransportError("malformed completion response: " + res->body.substr(0, 500));
    }
    const json& msg = j["choices"][0].contains("message") ? j["choices"][0]["message"]
                                                          : j["choices"][0];
    Result out;
    out.text = msg.value("content", "");
    // Providers differ on where separated thinking lands.
    if (msg.contains("reasoning_content")) {
      out.reasoning = msg.value("reasoning_content", "");
    } else if (msg.contains("reasoning")) {
      out.reasoning = msg.value("reasoning", "");
    }
    if (j.contains("usage")) {
      out.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0LL);
      out.usage.completion_tokens = j["usage"].value("completion_tokens", 0LL);
    }
    out.latency_ms = latency.count();
    return out;
  }
  throw TransportError("retries exhausted: " + last_error);
}

Gateway::Gateway(GatewayMode mode, std::shared_ptr<ChatClient> client,
                 std::shared_ptr<TranscriptStore> store, GatewayLimits limits)
    : mode_(mode), client_(std::move(client)), store_(std::move(store)), limits_(limits),
      last_refill_(std::chrono::steady_clock::now()) {
  if (mode_ != GatewayMode::Live && store_ == nullptr) {
    throw StoreError("record/replay modes require a transcript store");
  }
  if (mode_ != GatewayMode::Replay && client_ == nullptr) {
    throw TransportError("live/record modes require a transport client");
  }
  tokens_ = limits_.requests_per_minute;
}

void Gateway::acquire_slot() {
  std::unique_lock<std::mutex> lock(mu_);
  slot_cv_.wait(lock, [&] {
    return limits_.max_concurrent == 0 || in_flight_ < limits_.max_concurrent;
  });
  ++in_flight_;
  if (limits_.requests_per_minute > 0) {
    // Token bucket: refill continuously, capacity one minute's worth.
    for (;;) {
      auto now = std::chrono::steady_clock::now();
      double elapsed_s = std::chrono::duration<double>(now - last_refill_).count();
      tokens_ = std::min<double>(limits_.requests_per_minute,
                                 tokens_ + elapsed_s * limits_.requests_per_minute / 60.0);
      last_refill_ = now;
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        break;
      }
      double wait_s = (1.0 - tokens_) * 60.0 / limits_.requests_per_minute;
      lock.unlock();
      std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
      lock.lock();
    }
  }
}

void Gateway::release_slot() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    --in_flight_;
  }
  slot_cv_.notify_one();
}

namespace {

void validate_request(const CompletionRequest& request) {
  if (request.model.sampling.temperature < 0) {
    throw TransportError("temperature must be >= 0");
  }
  if (request.model.sampling.max_tokens == 0) {
    throw TransportError("max_tokens must be > 0");
  }
  if (request.messages.empty()) {
    throw TransportError("completion request needs at least one message");
  }
  const std::string& first = request.messages.front().role;
  if (first != "system" && first != "user") {
    throw TransportError("first message role must be system or user, got " + first);
  }
}

}  // namespace

Gateway::Completion Gateway::complete(const CompletionRequest& request) {
  validate_request(request);
  std::string digest = request_digest(request);
  if (mode_ == GatewayMode::Replay) {
    const Transcript* t = store_->find(digest);
    if (t == nullptr) {
      throw CacheMissError("replay miss for digest " + digest + " (model " +
                           request.model.model_name + ", tag " + request.tag + ")");
    }
    return Completion{t->response_text, digest};
  }
  acquire_slot();
  ChatClient::Result result;
  try {
    result = client_->complete(request);
  } catch (...) {
    release_slot();
    throw;
  }
  release_slot();
  if (mode_ == GatewayMode::Record) {
    Transcript t;
    t.digest = digest;
    t.model_name = request.model.model_name;
    t.messages = request.messages;
    t.sampling = request.model.sampling;
    t.sample_index = request.sample_index;
    t.tag = request.tag;
    t.response_text = result.text;
    t.reasoning_text = result.reasoning;
    t.usage = result.usage;
    t.latency_ms = result.latency_ms;
    t.recorded_at = iso_now();
    store_->append(t);
  }
  return Completion{result.text, digest};
}

}  // namespace taxlogic::llm
