// SPDX-License-Identifier: Apache-2.0

#include "npc/registry.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "npc/errors.hpp"

namespace npc {

namespace {

ParamType param_type_from_string(const std::string& s, const std::string& where) {
  if (s == "string") return ParamType::string;
  if (s == "number") return ParamType::number;
  if (s == "integer") return ParamType::integer;
  if (s == "boolean") return ParamType::boolean;
  if (s == "array") return ParamType::array;
  throw ParseError(where, "unsupported parameter type '" + s + "'");
}

bool matches_type(const Json& v, ParamType type) {
  switch (type) {
    case ParamType::string:
      return v.is_string();
    case ParamType::number:
      return v.is_number();
    case ParamType::integer:
      if (v.is_number_integer()) return true;
      if (v.is_number_float()) {
        const double d = v.get<double>();
        return std::isfinite(d) && std::floor(d) == d;
      }
      return false;
    case ParamType::boolean:
      return v.is_boolean();
    case ParamType::array:
      return v.is_array();
  }
  return false;
}

std::string get_string(const Json& j, const char* key, const std::string& where,
                       bool required = true) {
  auto it = j.find(key);
  if (it == j.end()) {
    if (required) throw ParseError(where + "/" + key, "missing field");
    return {};
  }
  if (!it->is_string()) throw ParseError(where + "/" + key, "expected a string");
  return it->get<std::string>();
}

ParameterSchema schema_from_json(const Json& j, const std::string& where) {
  ParameterSchema schema;
  if (!j.is_object()) throw ParseError(where, "parameters must be an object");
  if (auto it = j.find("properties"); it != j.end()) {
    if (!it->is_object()) throw ParseError(where + "/properties", "expected an object");
    for (const auto& [name, prop] : it->items()) {
      const std::string w = where + "/properties/" + name;
      if (!prop.is_object()) throw ParseError(w, "expected an object");
      ParameterSpec p;
      p.name = name;
      p.type = param_type_from_string(get_string(prop, "type", w), w + "/type");
      p.description = get_string(prop, "description", w, false);
      if (auto e = prop.find("enum"); e != prop.end()) {
        if (!e->is_array() || e->empty()) throw ParseError(w + "/enum", "expected a non-empty array");
        p.enum_values = std::vector<Json>(e->begin(), e->end());
      }
      schema.properties.push_back(std::move(p));
    }
  }
  if (auto it = j.find("required"); it != j.end()) {
    if (!it->is_array()) throw ParseError(where + "/required", "expected an array");
    for (const auto& r : *it) {
      if (!r.is_string()) throw ParseError(where + "/required", "expected strings");
      schema.required.push_back(r.get<std::string>());
    }
  }
  for (const auto& r : schema.required)
    if (!schema.find(r))
      throw ParseError(where + "/required", "required parameter '" + r + "' is not declared");
  return schema;
}

FunctionSpec function_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  FunctionSpec f;
  f.name = get_string(j, "name", where);
  if (f.name.empty()) throw ParseError(where + "/name", "empty function name");
  const std::string kind = get_string(j, "kind", where);
  if (kind == "action") {
    f.kind = FunctionKind::action;
  } else if (kind == "tool") {
    f.kind = FunctionKind::tool;
  } else {
    throw ParseError(where + "/kind", "kind must be 'action' or 'tool'");
  }
  f.description = get_string(j, "description", where, false);
  auto params = j.find("parameters");
  if (params != j.end()) f.parameters = schema_from_json(*params, where + "/parameters");
  return f;
}

Json placeholder_value(const ParameterSpec& p) {
  if (p.enum_values) return p.enum_values->front();
  switch (p.type) {
    case ParamType::string: return "x";
    case ParamType::number: return 1.5;
    case ParamType::integer: return 1;
    case ParamType::boolean: return true;
    case ParamType::array: return Json::array();
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(FunctionKind kind) {
  return kind == FunctionKind::action ? "action" : "tool";
}

std::string_view to_string(ParamType type) {
  switch (type) {
    case ParamType::string: return "string";
    case ParamType::number: return "number";
    case ParamType::integer: return "integer";
    case ParamType::boolean: return "boolean";
    case ParamType::array: return "array";
  }
  return "string";
}

const ParameterSpec* ParameterSchema::find(std::string_view name) const {
  for (const auto& p : properties)
    if (p.name == name) return &p;
  return nullptr;
}

const FunctionSpec* FunctionList::find(std::string_view name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

Json to_json(const ParameterSchema& schema) {
  Json props = Json::object();
  for (const auto& p : schema.properties) {
    Json prop = Json::object();
    prop["type"] = std::string(to_string(p.type));
    prop["description"] = p.description;
    if (p.enum_values) prop["enum"] = Json(*p.enum_values);
    props[p.name] = std::move(prop);
  }
  Json out = Json::object();
  out["type"] = "object";
  out["properties"] = std::move(props);
  out["required"] = schema.required;
  return out;
}

Json to_json(const FunctionSpec& spec) {
  Json out = Json::object();
  out["name"] = spec.name;
  out["description"] = spec.description;
  out["parameters"] = to_json(spec.parameters);
  return out;
}

Registry::Registry(std::vector<FunctionList> lists) {
  for (auto& list : lists) {
    std::set<std::string> names;
    for (const auto& f : list.functions)
      if (!names.insert(f.name).second)
        throw InvariantError("function list '" + list.id + "': duplicate function name '" +
                             f.name + "'");
    std::string id = list.id;
    if (!lists_.emplace(id, std::move(list)).second)
      throw InvariantError("duplicate function list id '" + id + "'");
  }
}

bool Registry::contains(std::string_view id) const { return lists_.find(id) != lists_.end(); }

const FunctionList& Registry::lookup(std::string_view id) const {
  auto it = lists_.find(id);
  if (it == lists_.end()) throw std::out_of_range("unknown function_list_id '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> Registry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : lists_) out.push_back(id);
  return out;
}

Registry parse_registry(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  if (!root.is_array()) throw ParseError("/", "registry must be a JSON array");
  std::vector<FunctionList> lists;
  for (size_t i = 0; i < root.size(); ++i) {
    const std::string where = "/" + std::to_string(i);
    if (!root[i].is_object()) throw ParseError(where, "expected an object");
    FunctionList list;
    list.id = get_string(root[i], "id", where);
    auto fns = root[i].find("functions");
    if (fns == root[i].end() || !fns->is_array())
      throw ParseError(where + "/functions", "expected an array");
    for (size_t k = 0; k < fns->size(); ++k)
      list.functions.push_back(
          function_from_json((*fns)[k], where + "/functions/" + std::to_string(k)));
    lists.push_back(std::move(list));
  }
  return Registry(std::move(lists));
}

Registry load_registry(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open registry file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_registry(buf.str());
}

ValidationReport validate_call(const ToolCall& call, const FunctionList& list,
                               CallValidationOptions options) {
  ValidationReport report;
  const FunctionSpec* spec = list.find(call.name);
  if (!spec) {
    report.add("unknown function", call.name);
    return report;
  }
  if (!call.parameters.is_object()) {
    report.add("type mismatch", "parameters must be an object");
    return report;
  }
  for (const auto& r : spec->parameters.required)
    if (!call.parameters.contains(r)) report.add("missing required", r);

  for (const auto& [name, value] : call.parameters.items()) {
    const ParameterSpec* p = spec->parameters.find(name);
    if (!p) {
      report.add("unknown parameter", name, options.strict);
      continue;
    }
    if (!matches_type(value, p->type)) {
      report.add("type mismatch", name + ": expected " + std::string(to_string(p->type)));
      continue;
    }
    if (p->enum_values &&
        std::find(p->enum_values->begin(), p->enum_values->end(), value) == p->enum_values->end())
      report.add("enum violation", name);
  }
  return report;
}

ToolResult execute_tool(const ToolCall& call, const Conversation& conversation,
                        const FunctionList& list) {
  ValidationReport report = validate_call(call, list);
  if (!report.ok())
    throw ContractError("execute_tool: call to '" + call.name + "' is not valid for list '" +
                        list.id + "'");
  const FunctionSpec& spec = *list.find(call.name);

  ToolResult result{call, ToolStatus::ok, nullptr};
  if (spec.kind == FunctionKind::action) {
    Json ack = Json::object();
    ack["action"] = call.name;
    for (const auto& [k, v] : call.parameters.items()) ack[k] = v;
    result.payload = std::move(ack);
    return result;
  }

  const Json* key = nullptr;
  for (const auto& p : spec.parameters.properties) {
    if (p.type != ParamType::string) continue;
    auto it = call.parameters.find(p.name);
    if (it != call.parameters.end()) {
      key = &*it;
      break;
    }
  }

  const Background& bg = *conversation.background;
  if (!key) {
    Json catalogue = Json::array();
    for (const auto& item : bg.knowledge.knowledge_info)
      catalogue.push_back(
          Json{{"name", item.name}, {"item_type", item.item_type}, {"description", item.description}});
    result.payload = std::move(catalogue);
    return result;
  }
  if (const ItemKnowledge* item = find_item(bg, key->get<std::string>())) {
    result.payload =
        Json{{"name", item->name}, {"item_type", item->item_type}, {"description", item->description}};
  } else {
    result.status = ToolStatus::not_found;
  }
  return result;
}

ToolCall minimal_call(const FunctionSpec& spec) {
  ToolCall call{spec.name, Json::object()};
  for (const auto& r : spec.parameters.required)
    call.parameters[r] = placeholder_value(*spec.parameters.find(r));
  return call;
}

}  // namespace npc
