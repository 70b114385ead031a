#include <openssl/evp.h>

#include "json.hpp"
#include "taxlogic/gateway.hpp"

namespace taxlogic::llm {

std::string sha256_hex(const std::string& bytes) {
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned int out_len = 0;
  EVP_Digest(bytes.data(), bytes.size(), out, &out_len, EVP_sha256(), nullptr);
  static const char* kHex = "0123456789abcdef";
  std::string hex;
  hex.reserve(out_len * 2);
  for (unsigned int i = 0; i < out_len; ++i) {
    hex.push_back(kHex[out[i] >> 4]);
    hex.push_back(kHex[out[i] & 0xf]);
  }
  return hex;
}

std::string request_digest(const CompletionRequest& request) {
  nlohmann::json j;
  j["model"] = request.model.model_name;
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : request.messages) {
    msgs.push_back({{"role", m.role}, {"content", m.content}});
  }
  j["messages"] = std::move(msgs);
  j["sampling"] = {{"temperature", request.model.sampling.temperature},
                   {"top_p", request.model.sampling.top_p},
                   {"max_tokens", request.model.sampling.max_tokens}};
  j["sample_index"] = request.sample_index;
  return sha256_hex(j.dump());
}

}  // namespace taxlogic::llm
