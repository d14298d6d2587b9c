// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "doctest.h"
#include "npc/errors.hpp"
#include "npc/toolcall.hpp"
#include "test_support.hpp"

using namespace npc;

namespace {

bool has_kind(const ParsedCalls& p, DiagnosticKind k) {
  for (const auto& d : p.diagnostics)
    if (d.kind == k) return true;
  return false;
}

}  // namespace

TEST_CASE("render then parse returns the call") {
  const ToolCall call{"sell", Json{{"item_name", "Ember Lantern"}, {"quantity", 2}}};
  const std::string text = render_tool_call(call);
  CHECK(text == "<tool_call>\n{\"name\": \"sell\", \"parameters\": {\"item_name\": \"Ember Lantern\", "
                "\"quantity\": 2}}\n</tool_call>");
  const ParsedCalls parsed = parse_tool_calls(text);
  CHECK(parsed.diagnostics.empty());
  REQUIRE(parsed.calls.size() == 1);
  CHECK(parsed.calls[0] == call);
}

TEST_CASE("closing tag inside a string value survives") {
  const ToolCall call{"say", Json{{"text", "a </tool_call> b"}}};
  const ParsedCalls parsed = parse_tool_calls(render_tool_call(call));
  CHECK(parsed.diagnostics.empty());
  REQUIRE(parsed.calls.size() == 1);
  CHECK(parsed.calls[0] == call);
}

TEST_CASE("several calls and surrounding whitespace") {
  const std::vector<ToolCall> calls = {{"a", Json::object()}, {"b", Json{{"x", 1}}}};
  const ParsedCalls parsed = parse_tool_calls("\n  " + render_tool_calls(calls) + "\n\n");
  CHECK(parsed.diagnostics.empty());
  CHECK(parsed.calls == calls);
}

TEST_CASE("plain text is not a tool call") {
  const ParsedCalls parsed = parse_tool_calls("I do not need any tool for that.");
  CHECK(parsed.calls.empty());
  CHECK(parsed.diagnostics.empty());
}

TEST_CASE("malformed regions yield diagnostics") {
  CHECK(has_kind(parse_tool_calls("<tool_call>\n{\"name\": \"a\"}"), DiagnosticKind::unclosed_tag));
  CHECK(has_kind(parse_tool_calls("<tool_call>{not json}</tool_call>"), DiagnosticKind::invalid_json));
  CHECK(has_kind(parse_tool_calls("<tool_call>{\"parameters\": {}}</tool_call>"),
                 DiagnosticKind::missing_name));
  CHECK(has_kind(parse_tool_calls("<tool_call>{\"name\": \"a\", \"parameters\": [1]}</tool_call>"),
                 DiagnosticKind::non_object_params));
  CHECK(has_kind(parse_tool_calls("sure! <tool_call>{\"name\": \"a\", \"parameters\": {}}</tool_call>"),
                 DiagnosticKind::stray_text));
  CHECK(has_kind(parse_tool_calls("text </tool_call>"), DiagnosticKind::stray_text));
}

TEST_CASE("valid regions survive a bad neighbour") {
  const ParsedCalls parsed = parse_tool_calls(
      "<tool_call>{oops}</tool_call>\n<tool_call>{\"name\": \"ok\", \"parameters\": {}}</tool_call>");
  REQUIRE(parsed.calls.size() == 1);
  CHECK(parsed.calls[0].name == "ok");
  CHECK(parsed.diagnostics.size() == 1);
}

TEST_CASE("diagnostic spans lie inside the input") {
  const std::string text = "xx <tool_call>{bad</tool_call> yy <tool_call>";
  for (const auto& d : parse_tool_calls(text).diagnostics) {
    CHECK(d.begin <= d.end);
    CHECK(d.end <= text.size());
  }
}

TEST_CASE("arguments is accepted as an alias of parameters") {
  const ParsedCalls parsed =
      parse_tool_calls("<tool_call>{\"name\": \"a\", \"arguments\": {\"k\": 1}}</tool_call>");
  REQUIRE(parsed.calls.size() == 1);
  CHECK(parsed.calls[0].parameters == Json{{"k", 1}});
}

TEST_CASE("rendering an invalid call is a contract error") {
  CHECK_THROWS_AS(render_tool_call({"", Json::object()}), ContractError);
  CHECK_THROWS_AS(render_tool_call({"a", Json::array()}), ContractError);
}

TEST_CASE("randomized round-trip") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const ToolCall call = test::random_tool_call(rng);
    const ParsedCalls parsed = parse_tool_calls(render_tool_call(call));
    REQUIRE(parsed.diagnostics.empty());
    REQUIRE(parsed.calls.size() == 1);
    CHECK(parsed.calls[0] == call);
  }
}

TEST_CASE("tools block lists each function once") {
  const Registry reg = load_registry(test::source_path("data/registry.json"));
  const std::string block = render_tools_block(reg.lookup("fl_shop"));
  CHECK(block.rfind("<tools>\n", 0) == 0);
  CHECK(block.substr(block.size() - 8) == "</tools>");
  CHECK(block.find("{\"type\": \"function\", \"function\": {\"name\": \"sell\"") != std::string::npos);
  CHECK(render_tools_block(FunctionList{"empty", {}}) == "<tools>\n</tools>");
}

TEST_CASE("tool results render one per line") {
  const std::vector<ToolResult> results = {
      {{"get_item_info", Json{{"item_name", "X"}}}, ToolStatus::not_found, nullptr},
      {{"sell", Json{{"item_name", "Y"}}}, ToolStatus::ok, Json{{"action", "sell"}}}};
  CHECK(render_tool_results(results) ==
        "{\"name\": \"get_item_info\", \"status\": \"not_found\", \"payload\": null}\n"
        "{\"name\": \"sell\", \"status\": \"ok\", \"payload\": {\"action\": \"sell\"}}");
  CHECK(render_tool_results({}).empty());
}
