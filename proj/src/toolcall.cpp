// SPDX-License-Identifier: Apache-2.0

#include "npc/toolcall.hpp"

#include "npc/errors.hpp"

namespace npc {

namespace {

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

// --- value types -----------------------------------------------------------

std::string_view to_string(ToolStatus status) {
  switch (status) {
    case ToolStatus::ok: return "ok";
    case ToolStatus::not_found: return "not_found";
    case ToolStatus::invalid_args: return "invalid_args";
  }
  return "ok";
}

ToolStatus tool_status_from_string(std::string_view text) {
  if (text == "ok") return ToolStatus::ok;
  if (text == "not_found") return ToolStatus::not_found;
  if (text == "invalid_args") return ToolStatus::invalid_args;
  throw std::invalid_argument("unknown tool status '" + std::string(text) + "'");
}

Json to_json(const ToolCall& call) {
  Json out = Json::object();
  out["name"] = call.name;
  out["parameters"] = call.parameters;
  return out;
}

Json to_json(const ToolResult& result) {
  Json out = Json::object();
  out["call"] = to_json(result.call);
  out["status"] = std::string(to_string(result.status));
  out["payload"] = result.payload;
  return out;
}

ToolCall tool_call_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  auto name = j.find("name");
  if (name == j.end() || !name->is_string()) throw ParseError(where + "/name", "expected a string");
  auto params = j.find("parameters");
  if (params == j.end()) params = j.find("arguments");
  if (params == j.end() || !params->is_object())
    throw ParseError(where + "/parameters", "expected an object");
  return {name->get<std::string>(), *params};
}

ToolResult tool_result_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  auto call = j.find("call");
  if (call == j.end()) throw ParseError(where + "/call", "missing field");
  auto status = j.find("status");
  if (status == j.end() || !status->is_string())
    throw ParseError(where + "/status", "expected a string");
  ToolResult r;
  r.call = tool_call_from_json(*call, where + "/call");
  try {
    r.status = tool_status_from_string(status->get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(where + "/status", e.what());
  }
  if (auto p = j.find("payload"); p != j.end()) r.payload = *p;
  return r;
}

// --- codec -----------------------------------------------------------------

std::string_view to_string(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::unclosed_tag: return "unclosed_tag";
    case DiagnosticKind::invalid_json: return "invalid_json";
    case DiagnosticKind::missing_name: return "missing_name";
    case DiagnosticKind::non_object_params: return "non_object_params";
    case DiagnosticKind::stray_text: return "stray_text";
  }
  return "invalid_json";
}

std::string render_tools_block(const FunctionList& list) {
  std::string out(kToolsOpen);
  out += '\n';
  for (const auto& f : list.functions) {
    Json sig = Json::object();
    sig["type"] = "function";
    sig["function"] = to_json(f);
    out += canonical_dump(sig);
    out += '\n';
  }
  out += kToolsClose;
  return out;
}

ParsedCalls parse_tool_calls(std::string_view text) {
  ParsedCalls out;
  // Regions of text outside any <tool_call> block, checked for stray content
  // once we know whether any block exists.
  std::vector<std::pair<size_t, size_t>> outside;
  bool saw_region = false;

  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t open = text.find(kCallOpen, pos);
    if (open == std::string_view::npos) {
      outside.emplace_back(pos, text.size());
      break;
    }
    outside.emplace_back(pos, open);
    saw_region = true;
    const size_t body_begin = open + kCallOpen.size();
    const size_t close = text.find(kCallClose, body_begin);
    if (close == std::string_view::npos) {
      out.diagnostics.push_back({DiagnosticKind::unclosed_tag, open, text.size(),
                                 "<tool_call> without matching </tool_call>"});
      break;
    }
    pos = close + kCallClose.size();

    const std::string_view body = trim(text.substr(body_begin, close - body_begin));
    const Json parsed = parse_json_or_discard(body);
    if (parsed.is_discarded() || !parsed.is_object()) {
      out.diagnostics.push_back({DiagnosticKind::invalid_json, open, pos,
                                 parsed.is_discarded() ? "body is not valid JSON"
                                                       : "body is not a JSON object"});
      continue;
    }
    auto name = parsed.find("name");
    if (name == parsed.end() || !name->is_string() || name->get<std::string>().empty()) {
      out.diagnostics.push_back({DiagnosticKind::missing_name, open, pos,
                                 "missing or non-string \"name\""});
      continue;
    }
    auto params = parsed.find("parameters");
    if (params == parsed.end()) params = parsed.find("arguments");
    if (params == parsed.end() || !params->is_object()) {
      out.diagnostics.push_back({DiagnosticKind::non_object_params, open, pos,
                                 "\"parameters\" must be a JSON object"});
      continue;
    }
    out.calls.push_back({name->get<std::string>(), *params});
  }

  for (const auto& [b, e] : outside) {
    const std::string_view chunk = text.substr(b, e - b);
    const bool orphan_close = chunk.find(kCallClose) != std::string_view::npos;
    if ((saw_region && !is_blank(chunk)) || orphan_close)
      out.diagnostics.push_back({DiagnosticKind::stray_text, b, e,
                                 orphan_close ? "</tool_call> without opening tag"
                                              : "text outside <tool_call> blocks"});
  }
  return out;
}

std::string render_tool_call(const ToolCall& call) {
  if (call.name.empty() || !call.parameters.is_object())
    throw ContractError("render_tool_call: call needs a name and object parameters");
  std::string body = canonical_dump(to_json(call));
  // "</" only occurs inside JSON strings, where "<\/" is an equivalent escape.
  for (size_t at = body.find(kCallClose); at != std::string::npos;
       at = body.find(kCallClose, at + 2))
    body.insert(at + 1, "\\");
  std::string out(kCallOpen);
  out += '\n';
  out += body;
  out += '\n';
  out += kCallClose;
  return out;
}

std::string render_tool_calls(const std::vector<ToolCall>& calls) {
  std::string out;
  for (size_t i = 0; i < calls.size(); ++i) {
    if (i) out += '\n';
    out += render_tool_call(calls[i]);
  }
  return out;
}

std::string render_tool_results(const std::vector<ToolResult>& results) {
  std::string out;
  for (size_t i = 0; i < results.size(); ++i) {
    if (i) out += '\n';
    Json line = Json::object();
    line["name"] = results[i].call.name;
    line["status"] = std::string(to_string(results[i].status));
    line["payload"] = results[i].payload;
    out += canonical_dump(line);
  }
  return out;
}

}  // namespace npc
