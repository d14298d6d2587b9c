// SPDX-License-Identifier: Apache-2.0

#include "npc/service.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "httplib.h"
#include "npc/errors.hpp"

namespace npc {

namespace {

using Clock = std::chrono::steady_clock;

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void error(httplib::Response& res, int status, const std::string& message, Json extra = Json::object()) {
  extra["error"] = message;
  reply(res, status, extra);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() ? base / path : path;
}

Json background_summary(const Background& bg) {
  return Json{{"persona", Json{{"name", bg.persona.name}, {"occupation", bg.persona.occupation}}},
              {"role", bg.role},
              {"state", Json{{"location", bg.state.location},
                             {"time", bg.state.time},
                             {"weather", bg.state.weather}}}};
}

}  // namespace

ServiceConfig load_service_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open service config");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string(), e.what());
  }
  const auto base = path.parent_path();
  ServiceConfig c;
  c.host = j.value("host", c.host);
  c.port = j.value("port", c.port);
  for (auto [key, field] : {std::pair{"backend_profile", &c.backend_profile},
                            std::pair{"registry", &c.registry}, std::pair{"dataset", &c.dataset}}) {
    if (!j.contains(key)) throw ParseError(path.string() + ":/" + key, "missing field");
    *field = resolve(base, j.at(key).get<std::string>());
    if (!std::filesystem::exists(*field))
      throw ParseError(path.string() + ":/" + key, "file does not exist: " + field->string());
  }
  c.session_ttl = std::chrono::milliseconds(
      static_cast<long long>(j.value("session_ttl_s", 1800.0) * 1000.0));
  if (auto it = j.find("cors_allowlist"); it != j.end())
    c.cors_allowlist = it->get<std::vector<std::string>>();
  return c;
}

Service::Service(std::vector<Conversation> dataset, std::shared_ptr<const Registry> registry,
                 std::shared_ptr<Backend> backend, Options options)
    : dataset_(std::move(dataset)),
      registry_(std::move(registry)),
      backend_(std::move(backend)),
      options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

Service::~Service() { stop(); }

bool Service::listen(const std::string& host, int port) { return server_->listen(host, port); }

int Service::bind_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool Service::serve() { return server_->listen_after_bind(); }

void Service::stop() {
  if (server_) server_->stop();
}

bool Service::is_running() const { return server_->is_running(); }

size_t Service::session_count() {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

void Service::evict_expired() {
  const auto now = Clock::now();
  std::lock_guard lock(mutex_);
  std::erase_if(sessions_, [&](const auto& kv) {
    return now - kv.second->last_access > options_.session_ttl;
  });
}

std::shared_ptr<Service::Entry> Service::find_session(const std::string& id) {
  evict_expired();
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  it->second->last_access = Clock::now();
  return it->second;
}

std::string Service::new_session_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[48];
  std::snprintf(buf, sizeof buf, "s%llu-%016llx", ++counter_,
                static_cast<unsigned long long>(rng()));
  return buf;
}

void Service::install_routes() {
  httplib::Server& srv = *server_;

  srv.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    const std::string origin = req.get_header_value("Origin");
    if (origin.empty()) return;
    const auto& allow = options_.cors_allowlist;
    const bool any = std::find(allow.begin(), allow.end(), "*") != allow.end();
    if (any || std::find(allow.begin(), allow.end(), origin) != allow.end()) {
      res.set_header("Access-Control-Allow-Origin", any ? "*" : origin);
      res.set_header("Vary", "Origin");
    }
  });

  srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, Authorization");
  });

  srv.Get("/api/conversations", [this](const httplib::Request&, httplib::Response& res) {
    Json list = Json::array();
    for (const auto& c : dataset_)
      list.push_back(Json{{"id", c.id},
                          {"persona", Json{{"name", c.background->persona.name},
                                           {"occupation", c.background->persona.occupation}}}});
    reply(res, 200, list);
  });

  srv.Post("/api/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_json_or_discard(req.body);
    if (!body.is_object() || !body.contains("conversation_id") || !body["conversation_id"].is_string())
      return error(res, 400, "body must be {\"conversation_id\": string}");
    const std::string cid = body["conversation_id"].get<std::string>();
    auto conv = std::find_if(dataset_.begin(), dataset_.end(),
                             [&](const Conversation& c) { return c.id == cid; });
    if (conv == dataset_.end()) return error(res, 404, "unknown conversation '" + cid + "'");

    Conversation fresh = *conv;
    fresh.turns.clear();
    auto entry = std::make_shared<Entry>();
    try {
      entry->session = std::make_unique<Session>(std::move(fresh), registry_, backend_, options_.settings);
    } catch (const std::exception& e) {
      return error(res, 500, e.what());
    }
    entry->conversation_id = cid;
    entry->last_access = Clock::now();

    evict_expired();
    std::string id;
    {
      std::lock_guard lock(mutex_);
      id = new_session_id();
      sessions_.emplace(id, entry);
    }
    reply(res, 200, Json{{"session_id", id},
                         {"conversation_id", cid},
                         {"background", background_summary(entry->session->background())}});
  });

  srv.Get(R"(/api/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    auto entry = find_session(req.matches[1]);
    if (!entry) return error(res, 404, "unknown or expired session");
    const Conversation snap = entry->session->snapshot();
    Json turns = Json::array();
    for (const auto& t : snap.turns) turns.push_back(to_json(t));
    Json outcomes = Json::array();
    for (const auto& o : entry->session->outcomes()) outcomes.push_back(to_json(o));
    reply(res, 200, Json{{"session_id", std::string(req.matches[1])},
                         {"conversation_id", entry->conversation_id},
                         {"turns", std::move(turns)},
                         {"outcomes", std::move(outcomes)}});
  });

  srv.Post(R"(/api/sessions/([^/]+)/turns)", [this](const httplib::Request& req, httplib::Response& res) {
    auto entry = find_session(req.matches[1]);
    if (!entry) return error(res, 404, "unknown or expired session");
    const Json body = parse_json_or_discard(req.body);
    if (!body.is_object() || !body.contains("query") || !body["query"].is_string() ||
        body["query"].get<std::string>().empty())
      return error(res, 400, "body must be {\"query\": non-empty string}");
    try {
      const TurnOutcome outcome = entry->session->run_turn(body["query"].get<std::string>());
      {
        std::lock_guard lock(mutex_);
        entry->last_access = Clock::now();
      }
      reply(res, 200, to_json(outcome));
    } catch (const SessionBusy& e) {
      error(res, 409, e.what());
    } catch (const TurnAborted& e) {
      error(res, 502, e.what(),
            Json{{"stage", e.stage()},
                 {"adapter", std::string(to_string(e.adapter()))},
                 {"kind", std::string(to_string(e.kind()))}});
    }
  });

  srv.Delete(R"(/api/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    evict_expired();
    std::lock_guard lock(mutex_);
    if (sessions_.erase(req.matches[1]) == 0) return error(res, 404, "unknown or expired session");
    res.status = 204;
  });
}

}  // namespace npc
