// SPDX-License-Identifier: Apache-2.0

#include <future>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "npc/router.hpp"
#include "npc/service.hpp"
#include "test_support.hpp"

using namespace npc;

namespace {

struct Running {
  std::shared_ptr<MockBackend> backend;
  std::unique_ptr<Service> service;
  std::thread thread;
  int port = 0;

  explicit Running(MockScript script, std::chrono::milliseconds ttl = std::chrono::minutes(5)) {
    backend = std::make_shared<MockBackend>(std::move(script));
    Service::Options opts;
    opts.session_ttl = ttl;
    opts.cors_allowlist = {"http://ui.local"};
    service = std::make_unique<Service>(
        load_dataset(test::source_path("data/dataset.json")),
        std::make_shared<const Registry>(load_registry(test::source_path("data/registry.json"))), backend,
        opts);
    port = service->bind_any_port("127.0.0.1");
    thread = std::thread([this] { service->serve(); });
    while (!service->is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  ~Running() {
    service->stop();
    thread.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(10, 0);
    return c;
  }
  std::string create(const std::string& conversation_id) const {
    auto res = client().Post("/api/sessions", Json{{"conversation_id", conversation_id}}.dump(),
                             "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    return Json::parse(res->body)["session_id"];
  }
};

MockScript demo_script() { return load_mock_script(test::source_path("data/mock_script.json")); }

}  // namespace

TEST_CASE("conversation listing") {
  Running r(demo_script());
  auto res = r.client().Get("/api/conversations");
  REQUIRE(res);
  CHECK(res->status == 200);
  const Json list = Json::parse(res->body);
  REQUIRE(list.size() == 5);
  CHECK(list[0]["id"] == "merchant_ada");
  CHECK(list[0]["persona"]["name"] == "Ada Brightwater");
}

TEST_CASE("create session then post turns") {
  Running r(demo_script());
  auto c = r.client();
  auto created = c.Post("/api/sessions", R"({"conversation_id": "merchant_ada"})", "application/json");
  REQUIRE(created);
  REQUIRE(created->status == 200);
  const Json session = Json::parse(created->body);
  CHECK(session["background"]["state"]["location"] == "Brightwater Sundries, Hollowmere");
  const std::string id = session["session_id"];

  auto turn = c.Post("/api/sessions/" + id + "/turns", R"({"query": "How much is the Ember Lantern?"})",
                     "application/json");
  REQUIRE(turn);
  REQUIRE(turn->status == 200);
  const Json outcome = Json::parse(turn->body);
  CHECK(outcome["scenario"] == "with_results");
  CHECK(outcome["results"][0]["status"] == "ok");

  auto transcript = c.Get("/api/sessions/" + id);
  REQUIRE(transcript);
  const Json t = Json::parse(transcript->body);
  REQUIRE(t["turns"].size() == 2);
  CHECK(t["turns"][0]["text"] == "How much is the Ember Lantern?");
  CHECK(t["turns"][1]["tool_calls"][0]["name"] == "get_item_info");
}

TEST_CASE("service outcome equals the library outcome") {
  Running r(demo_script());
  const std::string id = r.create("smith_borin");
  auto res = r.client().Post("/api/sessions/" + id + "/turns", R"({"query": "Sell me a Whetstone."})",
                             "application/json");
  REQUIRE(res);
  Json served = Json::parse(res->body);
  served.erase("timings_ms");

  Conversation c = load_dataset(test::source_path("data/dataset.json"))[1];
  c.turns.clear();
  Session local(c, std::make_shared<const Registry>(load_registry(test::source_path("data/registry.json"))),
                std::make_shared<MockBackend>(demo_script()));
  CHECK(served == to_json(local.run_turn("Sell me a Whetstone."), false));
}

TEST_CASE("sessions are isolated") {
  Running r(demo_script());
  const std::string a = r.create("merchant_ada");
  const std::string b = r.create("merchant_ada");
  CHECK(a != b);
  auto c = r.client();
  c.Post("/api/sessions/" + a + "/turns", R"({"query": "first for a"})", "application/json");
  c.Post("/api/sessions/" + b + "/turns", R"({"query": "first for b"})", "application/json");
  c.Post("/api/sessions/" + a + "/turns", R"({"query": "second for a"})", "application/json");
  const Json ta = Json::parse(c.Get("/api/sessions/" + a)->body);
  const Json tb = Json::parse(c.Get("/api/sessions/" + b)->body);
  CHECK(ta["turns"].size() == 4);
  CHECK(tb["turns"].size() == 2);
  CHECK(tb["turns"][0]["text"] == "first for b");
}

TEST_CASE("error statuses") {
  MockScript script = demo_script();
  script.rules.insert(script.rules.begin(),
                      MockRule{AdapterId::tool_call, std::string("slow please"), {}, "",
                               std::chrono::milliseconds(400), {}});
  script.rules.insert(script.rules.begin(),
                      MockRule{AdapterId::dialogue_without_results, std::string("break please"), {}, "", {},
                               BackendError::Kind::transport});
  Running r(script);
  auto c = r.client();

  SUBCASE("unknown conversation and session") {
    CHECK(c.Post("/api/sessions", R"({"conversation_id": "nobody"})", "application/json")->status == 404);
    CHECK(c.Get("/api/sessions/nope")->status == 404);
    CHECK(c.Post("/api/sessions/nope/turns", R"({"query": "hi"})", "application/json")->status == 404);
    CHECK(c.Delete("/api/sessions/nope")->status == 404);
  }
  SUBCASE("bad bodies") {
    CHECK(c.Post("/api/sessions", "not json", "application/json")->status == 400);
    const std::string id = r.create("merchant_ada");
    CHECK(c.Post("/api/sessions/" + id + "/turns", R"({"query": ""})", "application/json")->status == 400);
  }
  SUBCASE("two simultaneous turns: one 200, one 409") {
    const std::string id = r.create("merchant_ada");
    const std::string path = "/api/sessions/" + id + "/turns";
    auto slow = std::async(std::launch::async, [&] {
      return r.client().Post(path, R"({"query": "slow please"})", "application/json")->status;
    });
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    const int second = r.client().Post(path, R"({"query": "hello"})", "application/json")->status;
    CHECK(second == 409);
    CHECK(slow.get() == 200);
  }
  SUBCASE("backend failure is a 502 naming stage and adapter") {
    const std::string id = r.create("merchant_ada");
    auto res = c.Post("/api/sessions/" + id + "/turns", R"({"query": "break please"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 502);
    const Json body = Json::parse(res->body);
    CHECK(body["stage"] == "response");
    CHECK(body["adapter"] == "dialogue_without_results");
  }
  SUBCASE("delete") {
    const std::string id = r.create("merchant_ada");
    CHECK(c.Delete("/api/sessions/" + id)->status == 204);
    CHECK(c.Get("/api/sessions/" + id)->status == 404);
  }
}

TEST_CASE("expired sessions are gone") {
  Running r(demo_script(), std::chrono::milliseconds(150));
  const std::string id = r.create("merchant_ada");
  auto c = r.client();
  CHECK(c.Get("/api/sessions/" + id)->status == 200);
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  CHECK(c.Post("/api/sessions/" + id + "/turns", R"({"query": "hi"})", "application/json")->status == 404);
  CHECK(r.service->session_count() == 0);
}

TEST_CASE("cors") {
  Running r(demo_script());
  auto c = r.client();
  httplib::Headers allowed = {{"Origin", "http://ui.local"}};
  auto pre = c.Options("/api/sessions", allowed);
  REQUIRE(pre);
  CHECK(pre->status == 204);
  CHECK(pre->get_header_value("Access-Control-Allow-Origin") == "http://ui.local");
  CHECK(pre->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);

  auto other = c.Get("/api/conversations", httplib::Headers{{"Origin", "http://evil.local"}});
  REQUIRE(other);
  CHECK_FALSE(other->has_header("Access-Control-Allow-Origin"));
}

TEST_CASE("service config resolves relative paths") {
  const ServiceConfig cfg = load_service_config(test::source_path("data/npc.mock.json"));
  CHECK(cfg.dataset == test::source_path("data/dataset.json"));
  CHECK(cfg.session_ttl == std::chrono::seconds(1800));
  CHECK(cfg.cors_allowlist.size() == 1);

  const auto dir = test::scratch_dir("service_config");
  std::ofstream(dir / "bad.json") << R"({"backend_profile": "x.json", "registry": "y", "dataset": "z"})";
  CHECK_THROWS(load_service_config(dir / "bad.json"));
}
