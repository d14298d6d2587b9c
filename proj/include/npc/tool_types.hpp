// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "npc/canonical_json.hpp"

namespace npc {

// A function invocation as emitted by the tool-call adapter.
struct ToolCall {
  std::string name;
  Json parameters = Json::object();

  bool operator==(const ToolCall&) const = default;
};

enum class ToolStatus { ok, not_found, invalid_args };

std::string_view to_string(ToolStatus status);
ToolStatus tool_status_from_string(std::string_view text);

struct ToolResult {
  ToolCall call;
  ToolStatus status = ToolStatus::ok;
  Json payload;  // null when there is nothing to report

  bool operator==(const ToolResult&) const = default;
};

// {"name": ..., "parameters": {...}}
Json to_json(const ToolCall& call);
// {"call": {...}, "status": ..., "payload": ...}
Json to_json(const ToolResult& result);

// Both throw ParseError with `where` as locator on malformed input.
ToolCall tool_call_from_json(const Json& j, const std::string& where);
ToolResult tool_result_from_json(const Json& j, const std::string& where);

}  // namespace npc
