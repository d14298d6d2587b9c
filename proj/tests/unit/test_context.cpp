// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "doctest.h"
#include "npc/context.hpp"
#include "npc/errors.hpp"
#include "npc/registry.hpp"
#include "test_support.hpp"

using namespace npc;

namespace {

std::vector<Conversation> demo() {
  return load_dataset(test::source_path("data/dataset.json"));
}

Conversation with_turns(std::vector<Turn> turns) {
  Conversation c = demo().front();
  c.turns = std::move(turns);
  return c;
}

}  // namespace

TEST_CASE("demo dataset loads and round-trips byte-identically") {
  const auto convs = demo();
  REQUIRE(convs.size() == 5);
  const std::string once = serialize_dataset(convs);
  const auto again = parse_dataset(once);
  CHECK(again == convs);
  CHECK(serialize_dataset(again) == once);
}

TEST_CASE("persona extras survive a round-trip") {
  Conversation c = demo().front();
  auto bg = std::make_shared<Background>(*c.background);
  bg->persona.extras["favorite_drink"] = "cider";
  c.background = bg;
  const auto back = parse_dataset(serialize_dataset({c}));
  CHECK(back.front().background->persona.extras.at("favorite_drink") == "cider");
}

TEST_CASE("parse errors carry a locator") {
  SUBCASE("syntax error reports a line") {
    try {
      parse_dataset("[\n{\"id\": \"x\",\n  oops }\n]");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.locator() == "line 3");
    }
  }
  SUBCASE("missing field reports a JSON pointer") {
    Json j = Json::parse(test::read_text(test::source_path("data/dataset.json")));
    j[2]["background"]["persona"].erase("age");
    try {
      parse_dataset(j.dump());
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.locator()).find("/2/background/persona") == 0);
    }
  }
}

TEST_CASE("invariants reject malformed conversations") {
  Turn p{Speaker::player, "hi", {}, {}};
  Turn n{Speaker::npc, "hello", {}, {}};
  CHECK_NOTHROW(check_invariants(with_turns({p, n, p, n})));
  CHECK_THROWS_AS(check_invariants(with_turns({p, p})), InvariantError);
  CHECK_THROWS_AS(check_invariants(with_turns({n})), InvariantError);

  Turn bad_player = p;
  bad_player.tool_calls.push_back({"sell", Json{{"item_name", "Waterskin"}}});
  CHECK_THROWS_AS(check_invariants(with_turns({bad_player, n})), InvariantError);

  Turn no_payload = n;
  no_payload.tool_calls.push_back({"sell", Json{{"item_name", "Waterskin"}}});
  no_payload.tool_results.push_back({no_payload.tool_calls[0], ToolStatus::ok, nullptr});
  CHECK_THROWS_AS(check_invariants(with_turns({p, no_payload})), InvariantError);

  Conversation dup = demo().front();
  auto bg = std::make_shared<Background>(*dup.background);
  bg->knowledge.knowledge_info.push_back({"ember lantern", "tool", "duplicate by case"});
  dup.background = bg;
  CHECK_THROWS_AS(check_invariants(dup), InvariantError);
}

TEST_CASE("validate_conversation reports registry problems") {
  const Registry reg = load_registry(test::source_path("data/registry.json"));
  for (const auto& c : demo()) CHECK(validate_conversation(c, reg).ok());

  Conversation c = demo().front();
  c.function_list_id = "fl_missing";
  CHECK(validate_conversation(c, reg).has("unresolvable function list"));
}

TEST_CASE("validate_conversation is monotone under added defects") {
  const Registry reg = load_registry(test::source_path("data/registry.json"));
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Conversation c = demo()[rng() % 5];
    const size_t before = validate_conversation(c, reg).findings.size();
    auto bg = std::make_shared<Background>(*c.background);
    bg->knowledge.knowledge_info.push_back(bg->knowledge.knowledge_info[rng() % 20]);
    c.background = bg;
    const auto after = validate_conversation(c, reg);
    CHECK(after.findings.size() > before);
    CHECK_FALSE(after.ok());
  }
}

TEST_CASE("find_item is case-insensitive") {
  const auto c = demo().front();
  const ItemKnowledge* item = find_item(*c.background, "ember LANTERN");
  REQUIRE(item != nullptr);
  CHECK(item->name == "Ember Lantern");
  CHECK(find_item(*c.background, "Dragon Scale") == nullptr);
}
