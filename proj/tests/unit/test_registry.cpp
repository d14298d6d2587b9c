// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "npc/errors.hpp"
#include "npc/registry.hpp"
#include "test_support.hpp"

using namespace npc;

namespace {

Registry demo_registry() { return load_registry(test::source_path("data/registry.json")); }

Conversation merchant() { return load_dataset(test::source_path("data/dataset.json")).front(); }

}  // namespace

TEST_CASE("registry lookup") {
  const Registry reg = demo_registry();
  CHECK(reg.size() == 3);
  CHECK(reg.contains("fl_shop"));
  CHECK_FALSE(reg.contains(""));
  CHECK_THROWS_AS(reg.lookup("nope"), std::out_of_range);
  CHECK(reg.lookup("fl_gate").find("open_gate") != nullptr);
}

TEST_CASE("duplicate ids and names are rejected") {
  CHECK_THROWS_AS(parse_registry(R"([{"id":"a","functions":[]},{"id":"a","functions":[]}])"),
                  InvariantError);
  CHECK_THROWS_AS(parse_registry(R"([{"id":"a","functions":[
      {"name":"f","kind":"tool","parameters":{"type":"object","properties":{}}},
      {"name":"f","kind":"tool","parameters":{"type":"object","properties":{}}}]}])"),
                  InvariantError);
}

TEST_CASE("validate_call findings") {
  const Registry reg = demo_registry();
  const FunctionList& shop = reg.lookup("fl_shop");
  const FunctionList& gate = reg.lookup("fl_gate");

  CHECK(validate_call({"sell", Json{{"item_name", "Waterskin"}, {"quantity", 2}}}, shop).ok());
  CHECK(validate_call({"sell", Json{{"item_name", "Waterskin"}, {"quantity", 2.0}}}, shop).ok());
  CHECK(validate_call({"fly", Json::object()}, shop).has("unknown function"));
  CHECK(validate_call({"sell", Json::object()}, shop).has("missing required"));
  CHECK(validate_call({"sell", Json{{"item_name", 5}}}, shop).has("type mismatch"));
  CHECK(validate_call({"sell", Json{{"item_name", "x"}, {"quantity", 2.5}}}, shop)
            .has("type mismatch"));
  CHECK(validate_call({"open_gate", Json{{"gate", "west"}}}, gate).has("enum violation"));

  const ToolCall extra{"sell", Json{{"item_name", "x"}, {"colour", "red"}}};
  const auto lenient = validate_call(extra, shop);
  CHECK(lenient.ok());
  CHECK(lenient.has("unknown parameter"));
  CHECK_FALSE(validate_call(extra, shop, {.strict = true}).ok());
}

TEST_CASE("execute_tool") {
  const Registry reg = demo_registry();
  const FunctionList& shop = reg.lookup("fl_shop");
  const Conversation conv = merchant();

  const ToolResult sold = execute_tool({"sell", Json{{"item_name", "Waterskin"}, {"quantity", 2}}},
                                       conv, shop);
  CHECK(sold.status == ToolStatus::ok);
  CHECK(sold.payload["action"] == "sell");
  CHECK(sold.payload["quantity"] == 2);

  const ToolResult info = execute_tool({"get_item_info", Json{{"item_name", "tin compass"}}}, conv, shop);
  CHECK(info.status == ToolStatus::ok);
  CHECK(info.payload["name"] == "Tin Compass");
  CHECK(info.payload["item_type"] == "tool");

  const ToolResult missing = execute_tool({"get_item_info", Json{{"item_name", "Dragon Scale"}}}, conv, shop);
  CHECK(missing.status == ToolStatus::not_found);
  CHECK(missing.payload.is_null());

  CHECK_THROWS_AS(execute_tool({"sell", Json::object()}, conv, shop), ContractError);
}

TEST_CASE("minimal_call validates for every registered function") {
  const Registry reg = demo_registry();
  for (const auto& id : reg.ids())
    for (const auto& fn : reg.lookup(id).functions)
      CHECK(validate_call(minimal_call(fn), reg.lookup(id)).ok());
}
