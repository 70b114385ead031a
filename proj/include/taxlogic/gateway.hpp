#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace taxlogic::llm {

struct Sampling {
  double temperature = 1.0;
  double top_p = 1.0;
  unsigned max_tokens = 8192;
};

struct ModelSpec {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_name;
  Sampling sampling;
  std::string reasoning_class = "chat";  // chat | reasoning
  std::string api_key_env = "OPENAI_API_KEY";
};

struct Message {
  std::string role;  // system | user | assistant
  std::string content;
};

/// sample_index distinguishes independent draws of the same prompt (the two
/// legs of a self-consistency pair); it is part of the digest but never sent
/// to the provider.
struct CompletionRequest {
  ModelSpec model;
  std::vector<Message> messages;
  unsigned sample_index = 0;
  std::string tag;  // strategy label, audit only
};

struct TokenUsage {
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
};

struct Transcript {
  std::string digest;
  std::string model_name;
  std::vector<Message> messages;
  Sampling sampling;
  unsigned sample_index = 0;
  std::string tag;
  std::string response_text;
  std::string reasoning_text;  // provider-separated thinking; never extracted from
  TokenUsage usage;
  long long latency_ms = 0;
  std::string recorded_at;
};

/// Content hash over model name, full message list, sampling parameters, and
/// sample_index (canonical JSON, SHA-256 hex).
std::string request_digest(const CompletionRequest& request);

std::string sha256_hex(const std::string& bytes);

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CacheMissError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Append-only record-per-line transcript file. Records are never mutated;
/// writing an existing digest with identical content is a no-op and a
/// conflicting one is rejected.
class TranscriptStore {
 public:
  /// Opens (or creates, when `create`) the store and loads every record.
  explicit TranscriptStore(std::filesystem::path path, bool create = false);

  const Transcript* find(const std::string& digest) const;
  void append(const Transcript& transcript);
  size_t size() const;
  const std::filesystem::path& path() const { return path_; }

  /// Hash of the file bytes, for run manifests.
  std::string file_sha256() const;

 private:
  std::filesystem::path path_;
  std::map<std::string, Transcript> by_digest_;
  mutable std::mutex mu_;
};

/// Transport interface; the HTTP client and test stubs implement it.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  struct Result {
    std::string text;
    std::string reasoning;
    TokenUsage usage;
    long long latency_ms = 0;
  };
  virtual Result complete(const CompletionRequest& request) = 0;
};

struct HttpOptions {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds read_timeout{300000};
};

/// OpenAI-compatible chat/completions client with bounded retry-after-backoff
/// on transport faults, 429s, and 5xx responses.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(HttpOptions options = {});
  Result complete(const CompletionRequest& request) override;

 private:
  HttpOptions options_;
};

/// Canned-response transport for tests and the trivial baselines.
class StubChatClient : public ChatClient {
 public:
  explicit StubChatClient(std::function<std::string(const CompletionRequest&)> fn)
      : fn_(std::move(fn)) {}
  Result complete(const CompletionRequest& request) override {
    Result r;
    r.text = fn_(request);
    return r;
  }

 private:
  std::function<std::string(const CompletionRequest&)> fn_;
};

enum class GatewayMode { Live, Record, Replay };

const char* gateway_mode_name(GatewayMode mode);
std::optional<GatewayMode> parse_gateway_mode(const std::string& name);

struct GatewayLimits {
  unsigned max_concurrent = 4;        // in-flight transport calls
  unsigned requests_per_minute = 0;   // 0 = unlimited; token bucket otherwise
};

/// Mode-aware completion front end.
///  - live:   transport call, nothing persisted
///  - record: transport call, transcript appended to the store
///  - replay: byte-identical stored response; a miss is an error, never a
///            silent live fallback
/// Shareable across threads; transport calls respect the concurrency cap and
/// rate limit, replay lookups bypass both.
class Gateway {
 public:
  Gateway(GatewayMode mode, std::shared_ptr<ChatClient> client,
          std::shared_ptr<TranscriptStore> store, GatewayLimits limits = {});

  struct Completion {
    std::string text;
    std::string digest;
  };
  Completion complete(const CompletionRequest& request);

  GatewayMode mode() const { return mode_; }
  TranscriptStore* store() { return store_.get(); }

 private:
  void acquire_slot();
  void release_slot();

  GatewayMode mode_;
  std::shared_ptr<ChatClient> client_;
  std::shared_ptr<TranscriptStore> store_;
  GatewayLimits limits_;
  std::mutex mu_;
  std::condition_variable slot_cv_;
  unsigned in_flight_ = 0;
  double tokens_ = 0.0;
  std::chrono::steady_clock::time_point last_refill_;
};

// --- prompt templates -------------------------------------------------------

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Renders a versioned prompt template into a message list. Templates are
/// committed in the source tree; an override directory may shadow them by id
/// (file `<id>.txt`). Every `{{slot}}` must be provided.
std::vector<Message> render_prompt(const std::string& template_id,
                                   const std::map<std::string, std::string>& slots,
                                   const std::filesystem::path& override_dir = {});

/// Raw template text (for version hashing in run manifests).
std::string template_text(const std::string& template_id,
                          const std::filesystem::path& override_dir = {});

std::vector<std::string> known_template_ids();

// --- response extraction ----------------------------------------------------

/// Last fenced code block of the response, if any. Chain-of-thought drafts
/// make earlier blocks unreliable.
std::optional<std::string> extract_program(const std::string& response_text);

/// Last `ANSWER: $<number>` marker; tolerant of thousands separators, cents,
/// and case. Failure is a value, not an error.
std::optional<double> extract_dollar_answer(const std::string& response_text);

}  // namespace taxlogic::llm
