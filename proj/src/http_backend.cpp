// SPDX-License-Identifier: Apache-2.0

#include <chrono>

#include "httplib.h"
#include "npc/backend.hpp"

namespace npc {

namespace {

using Clock = std::chrono::steady_clock;

// Transport failures are retried once; the turn budget rules out more.
constexpr int kTransportAttempts = 2;

}  // namespace

OpenAiBackend::OpenAiBackend(BackendProfile profile) : profile_(std::move(profile)) {
  profile_.validate();
  const std::string& url = profile_.endpoint_url;
  const size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw std::invalid_argument("endpoint_url needs a scheme: '" + url + "'");
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https")
    throw std::invalid_argument("unsupported endpoint scheme '" + scheme + "'");
  const size_t path_begin = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_begin);
  path_ = path_begin == std::string::npos ? "" : url.substr(path_begin);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/v1/chat/completions";
}

std::string OpenAiBackend::generate(const GenerationRequest& request) {
  const std::string body = chat_completion_body(profile_, request).dump();
  for (int attempt = 1;; ++attempt) {
    try {
      return post_once(request, body);
    } catch (const BackendError& e) {
      if (e.kind() != BackendError::Kind::transport || attempt >= kTransportAttempts) throw;
    }
  }
}

std::string OpenAiBackend::post_once(const GenerationRequest& request, const std::string& body) {
  using Kind = BackendError::Kind;
  const auto timeout = profile_.request_timeout;
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);

  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (profile_.auth_token) headers.emplace("Authorization", "Bearer " + *profile_.auth_token);

  const auto started = Clock::now();
  httplib::Result res = client.Post(path_, headers, body, "application/json");
  if (!res) {
    const httplib::Error err = res.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           (err == httplib::Error::Read && Clock::now() - started >= timeout);
    throw BackendError(timed_out ? Kind::timeout : Kind::transport, request.adapter,
                       httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300)
    throw BackendError(Kind::http_status, request.adapter,
                       "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200),
                       res->status);

  const Json reply = parse_json_or_discard(res->body);
  if (reply.is_discarded()) throw BackendError(Kind::malformed_response, request.adapter, "body is not JSON");
  const Json* content = nullptr;
  if (auto choices = reply.find("choices"); choices != reply.end() && choices->is_array() &&
                                            !choices->empty()) {
    const Json& first = (*choices)[0];
    if (auto msg = first.find("message"); msg != first.end() && msg->is_object())
      if (auto c = msg->find("content"); c != msg->end() && c->is_string()) content = &*c;
  }
  if (!content)
    throw BackendError(Kind::malformed_response, request.adapter,
                       "missing choices[0].message.content");
  return content->get<std::string>();
}

}  // namespace npc
