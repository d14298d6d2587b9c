// SPDX-License-Identifier: Apache-2.0

#include "npc/backend.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "npc/errors.hpp"

namespace npc {

std::string_view to_string(AdapterId adapter) {
  switch (adapter) {
    case AdapterId::tool_call: return "tool_call";
    case AdapterId::dialogue_with_results: return "dialogue_with_results";
    case AdapterId::dialogue_without_results: return "dialogue_without_results";
  }
  return "tool_call";
}

AdapterId adapter_from_string(std::string_view text) {
  for (AdapterId a : kAllAdapters)
    if (to_string(a) == text) return a;
  throw std::invalid_argument("unknown adapter '" + std::string(text) + "'");
}

void GenerationParams::validate() const {
  if (!std::isfinite(temperature) || temperature < 0)
    throw std::invalid_argument("temperature must be >= 0");
  if (!std::isfinite(top_p) || top_p <= 0 || top_p > 1)
    throw std::invalid_argument("top_p must be in (0, 1]");
  if (max_tokens <= 0) throw std::invalid_argument("max_tokens must be > 0");
}

void BackendProfile::validate() const {
  for (AdapterId a : kAllAdapters) {
    auto it = adapter_model_names.find(a);
    if (it == adapter_model_names.end() || it->second.empty())
      throw std::invalid_argument("backend profile has no model name for adapter '" +
                                  std::string(to_string(a)) + "'");
  }
  if (request_timeout.count() <= 0) throw std::invalid_argument("request_timeout must be > 0");
}

const std::string& BackendProfile::model_for(AdapterId adapter) const {
  auto it = adapter_model_names.find(adapter);
  if (it == adapter_model_names.end())
    throw std::invalid_argument("no model for adapter '" + std::string(to_string(adapter)) + "'");
  return it->second;
}

BackendError::BackendError(Kind kind, AdapterId adapter, const std::string& message,
                           int http_status)
    : std::runtime_error(std::string(to_string(kind)) + " error (adapter " +
                         std::string(to_string(adapter)) + "): " + message),
      kind_(kind),
      adapter_(adapter),
      http_status_(http_status) {}

std::string_view to_string(BackendError::Kind kind) {
  switch (kind) {
    case BackendError::Kind::transport: return "transport";
    case BackendError::Kind::http_status: return "http_status";
    case BackendError::Kind::timeout: return "timeout";
    case BackendError::Kind::malformed_response: return "malformed_response";
  }
  return "transport";
}

Json chat_completion_body(const BackendProfile& profile, const GenerationRequest& request) {
  request.params.validate();
  Json body = Json::object();
  body["model"] = profile.model_for(request.adapter);
  body["messages"] = Json::array({Json{{"role", "system"}, {"content", request.system}},
                                  Json{{"role", "user"}, {"content", request.user}}});
  body["temperature"] = request.params.temperature;
  body["top_p"] = request.params.top_p;
  body["max_tokens"] = request.params.max_tokens;
  if (request.params.seed) body["seed"] = *request.params.seed;
  return body;
}

BackendProfile parse_profile(const Json& j) {
  if (!j.is_object()) throw ParseError("/", "profile must be an object");
  BackendProfile p;
  p.endpoint_url = j.value("endpoint_url", std::string());
  auto adapters = j.find("adapters");
  if (adapters == j.end() || !adapters->is_object())
    throw ParseError("/adapters", "expected an object mapping adapter ids to model names");
  for (const auto& [key, value] : adapters->items()) {
    if (!value.is_string()) throw ParseError("/adapters/" + key, "expected a string");
    try {
      p.adapter_model_names[adapter_from_string(key)] = value.get<std::string>();
    } catch (const std::invalid_argument& e) {
      throw ParseError("/adapters/" + key, e.what());
    }
  }
  p.request_timeout = std::chrono::milliseconds(j.value("request_timeout_ms", 7000));
  const std::string env = j.value("auth_token_env", std::string(kDefaultTokenEnv));
  if (const char* token = std::getenv(env.c_str()); token && *token) p.auth_token = token;
  p.validate();
  return p;
}

std::shared_ptr<Backend> make_backend(const std::filesystem::path& config_path) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw ParseError(config_path.string(), "cannot open backend profile");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(config_path.string(), e.what());
  }
  BackendProfile profile = parse_profile(j);
  if (auto script = j.find("mock_script"); script != j.end()) {
    std::filesystem::path path = script->get<std::string>();
    if (path.is_relative()) path = config_path.parent_path() / path;
    return std::make_shared<MockBackend>(load_mock_script(path), std::move(profile));
  }
  return std::make_shared<OpenAiBackend>(std::move(profile));
}

}  // namespace npc
