// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "npc/canonical_json.hpp"
#include "npc/context.hpp"
#include "npc/report.hpp"
#include "npc/tool_types.hpp"

namespace npc {

enum class FunctionKind { action, tool };
enum class ParamType { string, number, integer, boolean, array };

std::string_view to_string(FunctionKind kind);
std::string_view to_string(ParamType type);

struct ParameterSpec {
  std::string name;
  ParamType type = ParamType::string;
  std::string description;
  std::optional<std::vector<Json>> enum_values;
};

struct ParameterSchema {
  // Declaration order is kept; it drives rendering and the tool lookup key.
  std::vector<ParameterSpec> properties;
  std::vector<std::string> required;

  const ParameterSpec* find(std::string_view name) const;
};

struct FunctionSpec {
  std::string name;
  FunctionKind kind = FunctionKind::tool;
  std::string description;
  ParameterSchema parameters;
};

struct FunctionList {
  std::string id;
  std::vector<FunctionSpec> functions;

  const FunctionSpec* find(std::string_view name) const;
};

// Parameter schema in the JSON-Schema flavour used by the registry file and
// the tools block: {"type": "object", "properties": {...}, "required": [...]}.
Json to_json(const ParameterSchema& schema);
Json to_json(const FunctionSpec& spec);

class Registry {
 public:
  Registry() = default;
  // Throws InvariantError on duplicate list ids or duplicate function names.
  explicit Registry(std::vector<FunctionList> lists);

  bool contains(std::string_view id) const;
  // Throws std::out_of_range for unknown ids (including "").
  const FunctionList& lookup(std::string_view id) const;
  size_t size() const { return lists_.size(); }
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, FunctionList, std::less<>> lists_;
};

Registry parse_registry(std::string_view text);
Registry load_registry(const std::filesystem::path& path);

struct CallValidationOptions {
  // Unknown parameters become blocking findings.
  bool strict = false;
};

// Findings: "unknown function", "missing required", "type mismatch",
// "enum violation", "unknown parameter" (non-blocking unless strict).
ValidationReport validate_call(const ToolCall& call, const FunctionList& list,
                               CallValidationOptions options = {});

// Deterministic desk-scale execution. Tool functions look the first string
// argument (in schema order) up in knowledge_info, case-insensitively; with no
// string argument they return the item catalogue. Action functions echo their
// name and arguments. Throws ContractError if the call is not valid for the
// conversation's function list.
ToolResult execute_tool(const ToolCall& call, const Conversation& conversation,
                        const FunctionList& list);

// Smallest call that satisfies `spec`: required parameters only, filled with
// a type-appropriate value (first enum value when constrained).
ToolCall minimal_call(const FunctionSpec& spec);

}  // namespace npc
