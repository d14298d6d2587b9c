// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "npc/canonical_json.hpp"

namespace npc {

// One LoRA adapter per pipeline stage, served under its own model name.
enum class AdapterId { tool_call, dialogue_with_results, dialogue_without_results };

inline constexpr AdapterId kAllAdapters[] = {AdapterId::tool_call, AdapterId::dialogue_with_results,
                                             AdapterId::dialogue_without_results};

std::string_view to_string(AdapterId adapter);
AdapterId adapter_from_string(std::string_view text);

struct GenerationParams {
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 256;
  std::optional<std::int64_t> seed;

  // Throws std::invalid_argument when out of range.
  void validate() const;
};

struct GenerationRequest {
  std::string system;
  std::string user;
  AdapterId adapter = AdapterId::tool_call;
  GenerationParams params;
};

struct BackendProfile {
  std::string endpoint_url;
  std::map<AdapterId, std::string> adapter_model_names;
  std::chrono::milliseconds request_timeout{7000};
  std::optional<std::string> auth_token;

  // Throws std::invalid_argument unless every adapter has a model name.
  void validate() const;
  const std::string& model_for(AdapterId adapter) const;
};

class BackendError : public std::runtime_error {
 public:
  enum class Kind { transport, http_status, timeout, malformed_response };

  BackendError(Kind kind, AdapterId adapter, const std::string& message, int http_status = 0);

  Kind kind() const { return kind_; }
  AdapterId adapter() const { return adapter_; }
  int http_status() const { return http_status_; }

 private:
  Kind kind_;
  AdapterId adapter_;
  int http_status_;
};

std::string_view to_string(BackendError::Kind kind);

class Backend {
 public:
  virtual ~Backend() = default;
  // Returns the assistant text verbatim. Throws BackendError.
  virtual std::string generate(const GenerationRequest& request) = 0;
  virtual const BackendProfile& profile() const = 0;
};

// Request body for POST {endpoint}/v1/chat/completions.
Json chat_completion_body(const BackendProfile& profile, const GenerationRequest& request);

// OpenAI-compatible chat-completions client. MultiLoRA servers expose each
// adapter as a separately named model, so the adapter choice is only the
// "model" field. Safe to share across threads.
class OpenAiBackend final : public Backend {
 public:
  explicit OpenAiBackend(BackendProfile profile);
  std::string generate(const GenerationRequest& request) override;
  const BackendProfile& profile() const override { return profile_; }

 private:
  std::string post_once(const GenerationRequest& request, const std::string& body);

  BackendProfile profile_;
  std::string scheme_host_port_;
  std::string path_;
};

// Scripted backend for tests and offline runs.
struct MockRule {
  std::optional<AdapterId> adapter;
  std::optional<std::string> contains;   // substring of the user prompt
  std::optional<std::string> ends_with;  // suffix of the user prompt
  // "${query}" expands to the text after the last "user query:\n".
  std::string output;
  std::chrono::milliseconds delay{0};
  std::optional<BackendError::Kind> error;
};

struct MockScript {
  std::vector<MockRule> rules;  // first match wins
  std::map<AdapterId, std::string> defaults;
  std::string fallback;
};

MockScript parse_mock_script(const Json& j);
MockScript load_mock_script(const std::filesystem::path& path);
Json to_json(const MockScript& script);

class MockBackend final : public Backend {
 public:
  explicit MockBackend(MockScript script, BackendProfile profile = default_profile());

  std::string generate(const GenerationRequest& request) override;
  const BackendProfile& profile() const override { return profile_; }

  std::vector<GenerationRequest> requests() const;
  size_t request_count() const;
  void clear_log();

  static BackendProfile default_profile();

 private:
  MockScript script_;
  BackendProfile profile_;
  mutable std::mutex mutex_;
  std::vector<GenerationRequest> log_;
};

// Profile config file:
//   {"endpoint_url": "http://host:port", "adapters": {"tool_call": "...", ...},
//    "request_timeout_ms": 7000, "auth_token_env": "NPC_BACKEND_TOKEN",
//    "mock_script": "script.json"}
// With "mock_script" set a MockBackend is built (relative paths resolve
// against the config file's directory).
std::shared_ptr<Backend> make_backend(const std::filesystem::path& config_path);
BackendProfile parse_profile(const Json& j);

inline constexpr const char* kDefaultTokenEnv = "NPC_BACKEND_TOKEN";

}  // namespace npc
