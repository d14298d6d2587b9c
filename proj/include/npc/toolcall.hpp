// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "npc/registry.hpp"
#include "npc/tool_types.hpp"

namespace npc {

enum class DiagnosticKind { unclosed_tag, invalid_json, missing_name, non_object_params, stray_text };

std::string_view to_string(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind;
  // Byte offsets into the parsed text, half-open.
  size_t begin = 0;
  size_t end = 0;
  std::string detail;
};

struct ParsedCalls {
  std::vector<ToolCall> calls;
  std::vector<Diagnostic> diagnostics;
};

inline constexpr std::string_view kToolsOpen = "<tools>";
inline constexpr std::string_view kToolsClose = "</tools>";
inline constexpr std::string_view kCallOpen = "<tool_call>";
inline constexpr std::string_view kCallClose = "</tool_call>";

// "<tools>\n" + one signature line per function + "</tools>".
std::string render_tools_block(const FunctionList& list);

// Total: never throws, whatever the input bytes.
ParsedCalls parse_tool_calls(std::string_view model_output);

// "<tool_call>\n{"name": ..., "parameters": {...}}\n</tool_call>"
std::string render_tool_call(const ToolCall& call);
// Calls rendered back to back, newline separated; "" for none.
std::string render_tool_calls(const std::vector<ToolCall>& calls);

// One {"name", "status", "payload"} object per line; "" for none.
std::string render_tool_results(const std::vector<ToolResult>& results);

}  // namespace npc
