// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "npc/backend.hpp"
#include "npc/context.hpp"
#include "npc/registry.hpp"
#include "npc/router.hpp"

namespace httplib {
class Server;
}

namespace npc {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path backend_profile;
  std::filesystem::path registry;
  std::filesystem::path dataset;
  std::chrono::milliseconds session_ttl{std::chrono::minutes(30)};
  // Origins allowed by CORS; "*" allows any.
  std::vector<std::string> cors_allowlist;
};

// JSON config: {"host", "port", "backend_profile", "registry", "dataset",
// "session_ttl_s", "cors_allowlist"}. Relative paths resolve against the
// config file's directory. Throws when a referenced file does not exist.
ServiceConfig load_service_config(const std::filesystem::path& path);

// In-memory session store plus the JSON-over-HTTP routes:
//   GET    /api/conversations
//   POST   /api/sessions             {"conversation_id"}
//   GET    /api/sessions/{id}
//   POST   /api/sessions/{id}/turns  {"query"}
//   DELETE /api/sessions/{id}
// Errors: 404 unknown or expired session/conversation, 409 turn already in
// flight, 502 backend failure (body names stage and adapter).
class Service {
 public:
  struct Options {
    std::chrono::milliseconds session_ttl{std::chrono::minutes(30)};
    std::vector<std::string> cors_allowlist;
    RunSettings settings;
  };

  Service(std::vector<Conversation> dataset, std::shared_ptr<const Registry> registry,
          std::shared_ptr<Backend> backend, Options options);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and serves until stop(). Returns false if binding failed.
  bool listen(const std::string& host, int port);
  // Binds to a free port and returns it; then call serve() on some thread.
  int bind_any_port(const std::string& host);
  bool serve();
  void stop();
  bool is_running() const;

  size_t session_count();

 private:
  struct Entry {
    std::unique_ptr<Session> session;
    std::string conversation_id;
    std::chrono::steady_clock::time_point last_access;
  };

  void install_routes();
  void evict_expired();
  std::shared_ptr<Entry> find_session(const std::string& id);
  std::string new_session_id();

  std::vector<Conversation> dataset_;
  std::shared_ptr<const Registry> registry_;
  std::shared_ptr<Backend> backend_;
  Options options_;
  std::unique_ptr<httplib::Server> server_;

  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  unsigned long long counter_ = 0;
};

}  // namespace npc
