// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <thread>

#include "npc/backend.hpp"
#include "npc/errors.hpp"

namespace npc {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string expand(std::string_view output, std::string_view user) {
  constexpr std::string_view kMarker = "${query}";
  if (output.find(kMarker) == std::string_view::npos) return std::string(output);
  constexpr std::string_view kLabel = "user query:\n";
  const size_t at = user.rfind(kLabel);
  const std::string_view query = at == std::string_view::npos ? user : user.substr(at + kLabel.size());
  std::string out;
  size_t pos = 0;
  for (size_t hit = output.find(kMarker); hit != std::string_view::npos;
       hit = output.find(kMarker, pos)) {
    out.append(output.substr(pos, hit - pos));
    out.append(query);
    pos = hit + kMarker.size();
  }
  out.append(output.substr(pos));
  return out;
}

BackendError::Kind error_kind_from_string(const std::string& s) {
  for (auto k : {BackendError::Kind::transport, BackendError::Kind::http_status,
                 BackendError::Kind::timeout, BackendError::Kind::malformed_response})
    if (to_string(k) == s) return k;
  throw ParseError("/rules/error", "unknown error kind '" + s + "'");
}

}  // namespace

MockScript parse_mock_script(const Json& j) {
  MockScript script;
  if (!j.is_object()) throw ParseError("/", "mock script must be an object");
  if (auto rules = j.find("rules"); rules != j.end()) {
    for (size_t i = 0; i < rules->size(); ++i) {
      const Json& r = (*rules)[i];
      MockRule rule;
      if (auto a = r.find("adapter"); a != r.end())
        rule.adapter = adapter_from_string(a->get<std::string>());
      if (auto c = r.find("contains"); c != r.end()) rule.contains = c->get<std::string>();
      if (auto e = r.find("ends_with"); e != r.end()) rule.ends_with = e->get<std::string>();
      rule.output = r.value("output", std::string());
      rule.delay = std::chrono::milliseconds(r.value("delay_ms", 0));
      if (auto e = r.find("error"); e != r.end())
        rule.error = error_kind_from_string(e->get<std::string>());
      script.rules.push_back(std::move(rule));
    }
  }
  if (auto d = j.find("defaults"); d != j.end())
    for (const auto& [k, v] : d->items()) script.defaults[adapter_from_string(k)] = v.get<std::string>();
  script.fallback = j.value("fallback", std::string());
  return script;
}

MockScript load_mock_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open mock script");
  try {
    return parse_mock_script(Json::parse(in));
  } catch (const Json::exception& e) {
    throw ParseError(path.string(), e.what());
  }
}

Json to_json(const MockScript& script) {
  Json rules = Json::array();
  for (const auto& r : script.rules) {
    Json j = Json::object();
    if (r.adapter) j["adapter"] = std::string(to_string(*r.adapter));
    if (r.contains) j["contains"] = *r.contains;
    if (r.ends_with) j["ends_with"] = *r.ends_with;
    j["output"] = r.output;
    if (r.delay.count()) j["delay_ms"] = r.delay.count();
    if (r.error) j["error"] = std::string(to_string(*r.error));
    rules.push_back(std::move(j));
  }
  Json defaults = Json::object();
  for (const auto& [a, text] : script.defaults) defaults[std::string(to_string(a))] = text;
  return Json{{"rules", std::move(rules)}, {"defaults", std::move(defaults)},
              {"fallback", script.fallback}};
}

MockBackend::MockBackend(MockScript script, BackendProfile profile)
    : script_(std::move(script)), profile_(std::move(profile)) {
  profile_.validate();
}

BackendProfile MockBackend::default_profile() {
  BackendProfile p;
  p.endpoint_url = "mock://";
  for (AdapterId a : kAllAdapters) p.adapter_model_names[a] = "mock-" + std::string(to_string(a));
  return p;
}

std::string MockBackend::generate(const GenerationRequest& request) {
  request.params.validate();
  {
    std::lock_guard lock(mutex_);
    log_.push_back(request);
  }
  for (const auto& rule : script_.rules) {
    if (rule.adapter && *rule.adapter != request.adapter) continue;
    if (rule.contains && request.user.find(*rule.contains) == std::string::npos) continue;
    if (rule.ends_with && !ends_with(request.user, *rule.ends_with)) continue;
    if (rule.delay.count() > 0) std::this_thread::sleep_for(rule.delay);
    if (rule.error) throw BackendError(*rule.error, request.adapter, "scripted failure");
    return expand(rule.output, request.user);
  }
  if (auto it = script_.defaults.find(request.adapter); it != script_.defaults.end())
    return expand(it->second, request.user);
  return expand(script_.fallback, request.user);
}

std::vector<GenerationRequest> MockBackend::requests() const {
  std::lock_guard lock(mutex_);
  return log_;
}

size_t MockBackend::request_count() const {
  std::lock_guard lock(mutex_);
  return log_.size();
}

void MockBackend::clear_log() {
  std::lock_guard lock(mutex_);
  log_.clear();
}

}  // namespace npc
