// SPDX-License-Identifier: Apache-2.0

#include "npc/context.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "npc/errors.hpp"
#include "npc/registry.hpp"

namespace npc {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + "/" + key, "missing field");
  return *it;
}

std::string require_string(const Json& obj, const char* key, const std::string& where) {
  const Json& v = require(obj, key, where);
  if (!v.is_string()) throw ParseError(where + "/" + key, "expected a string");
  return v.get<std::string>();
}

const Json& require_array(const Json& obj, const char* key, const std::string& where) {
  const Json& v = require(obj, key, where);
  if (!v.is_array()) throw ParseError(where + "/" + key, "expected an array");
  return v;
}

constexpr const char* kPersonaFields[] = {"name", "age", "gender", "occupation", "appearance"};

Persona persona_from_json(const Json& j, const std::string& where) {
  Persona p;
  p.name = require_string(j, "name", where);
  p.age = require_string(j, "age", where);
  p.gender = require_string(j, "gender", where);
  p.occupation = require_string(j, "occupation", where);
  p.appearance = require_string(j, "appearance", where);
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kPersonaFields), std::end(kPersonaFields), key) !=
        std::end(kPersonaFields))
      continue;
    if (!value.is_string()) throw ParseError(where + "/" + key, "expected a string");
    p.extras.emplace(key, value.get<std::string>());
  }
  return p;
}

Background background_from_json(const Json& j, const std::string& where) {
  Background b;
  b.worldview = require_string(j, "worldview", where);
  b.persona = persona_from_json(require(j, "persona", where), where + "/persona");
  b.role = require_string(j, "role", where);

  const std::string kw = where + "/knowledge";
  const Json& knowledge = require(j, "knowledge", where);
  const Json& general = require_array(knowledge, "general_info", kw);
  for (size_t i = 0; i < general.size(); ++i) {
    const std::string w = kw + "/general_info/" + std::to_string(i);
    b.knowledge.general_info.push_back(
        {require_string(general[i], "title", w), require_string(general[i], "text", w)});
  }
  const Json& items = require_array(knowledge, "knowledge_info", kw);
  for (size_t i = 0; i < items.size(); ++i) {
    const std::string w = kw + "/knowledge_info/" + std::to_string(i);
    b.knowledge.knowledge_info.push_back({require_string(items[i], "name", w),
                                          require_string(items[i], "item_type", w),
                                          require_string(items[i], "description", w)});
  }

  const Json& state = require(j, "state", where);
  b.state = {require_string(state, "location", where + "/state"),
             require_string(state, "time", where + "/state"),
             require_string(state, "weather", where + "/state")};
  return b;
}

Turn turn_from_json(const Json& j, const std::string& where) {
  Turn t;
  const std::string speaker = require_string(j, "speaker", where);
  if (speaker == "player") {
    t.speaker = Speaker::player;
  } else if (speaker == "npc") {
    t.speaker = Speaker::npc;
  } else {
    throw ParseError(where + "/speaker", "unknown speaker '" + speaker + "'");
  }
  t.text = require_string(j, "text", where);
  if (auto it = j.find("tool_calls"); it != j.end()) {
    if (!it->is_array()) throw ParseError(where + "/tool_calls", "expected an array");
    for (size_t i = 0; i < it->size(); ++i)
      t.tool_calls.push_back(
          tool_call_from_json((*it)[i], where + "/tool_calls/" + std::to_string(i)));
  }
  if (auto it = j.find("tool_results"); it != j.end()) {
    if (!it->is_array()) throw ParseError(where + "/tool_results", "expected an array");
    for (size_t i = 0; i < it->size(); ++i)
      t.tool_results.push_back(
          tool_result_from_json((*it)[i], where + "/tool_results/" + std::to_string(i)));
  }
  return t;
}

// Shared by check_invariants (throws on the first) and validate_conversation.
ValidationReport intrinsic_findings(const Conversation& c) {
  ValidationReport report;
  if (c.id.empty()) report.add("empty conversation id", "id");
  if (!c.background) {
    report.add("missing background", "background");
    return report;
  }

  std::set<std::string> seen;
  const auto& items = c.background->knowledge.knowledge_info;
  for (size_t i = 0; i < items.size(); ++i) {
    const std::string field = "background/knowledge/knowledge_info/" + std::to_string(i);
    if (items[i].name.empty()) report.add("empty knowledge item name", field);
    if (!seen.insert(lower(items[i].name)).second)
      report.add("duplicate knowledge item", field + " (" + items[i].name + ")");
  }

  for (size_t i = 0; i < c.turns.size(); ++i) {
    const Turn& t = c.turns[i];
    const std::string field = "turns/" + std::to_string(i);
    const Speaker expected = i % 2 == 0 ? Speaker::player : Speaker::npc;
    if (t.speaker != expected)
      report.add("turn alternation violated",
                 field + " is " + std::string(to_string(t.speaker)) + ", expected " +
                     std::string(to_string(expected)));
    if (t.speaker == Speaker::player && (!t.tool_calls.empty() || !t.tool_results.empty()))
      report.add("player turn carries tool data", field);
    for (size_t k = 0; k < t.tool_calls.size(); ++k)
      if (t.tool_calls[k].name.empty() || !t.tool_calls[k].parameters.is_object())
        report.add("malformed tool call", field + "/tool_calls/" + std::to_string(k));
    for (size_t k = 0; k < t.tool_results.size(); ++k)
      if (t.tool_results[k].status == ToolStatus::ok && t.tool_results[k].payload.is_null())
        report.add("ok result without payload", field + "/tool_results/" + std::to_string(k));
  }
  return report;
}

size_t line_of(std::string_view text, size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

}  // namespace

std::string_view to_string(Speaker speaker) {
  return speaker == Speaker::player ? "player" : "npc";
}

bool Conversation::operator==(const Conversation& other) const {
  const bool same_background =
      background == other.background ||
      (background && other.background && *background == *other.background);
  return id == other.id && same_background && function_list_id == other.function_list_id &&
         turns == other.turns;
}

Json to_json(const Background& b) {
  Json persona = Json::object();
  persona["name"] = b.persona.name;
  persona["age"] = b.persona.age;
  persona["gender"] = b.persona.gender;
  persona["occupation"] = b.persona.occupation;
  persona["appearance"] = b.persona.appearance;
  for (const auto& [k, v] : b.persona.extras) persona[k] = v;

  Json general = Json::array();
  for (const auto& s : b.knowledge.general_info)
    general.push_back(Json{{"title", s.title}, {"text", s.text}});
  Json items = Json::array();
  for (const auto& it : b.knowledge.knowledge_info)
    items.push_back(
        Json{{"name", it.name}, {"item_type", it.item_type}, {"description", it.description}});

  Json out = Json::object();
  out["worldview"] = b.worldview;
  out["persona"] = std::move(persona);
  out["role"] = b.role;
  out["knowledge"] = Json{{"general_info", std::move(general)},
                          {"knowledge_info", std::move(items)}};
  out["state"] = Json{{"location", b.state.location},
                      {"time", b.state.time},
                      {"weather", b.state.weather}};
  return out;
}

Json to_json(const Turn& t) {
  Json out = Json::object();
  out["speaker"] = std::string(to_string(t.speaker));
  out["text"] = t.text;
  if (t.speaker == Speaker::npc) {
    Json calls = Json::array();
    for (const auto& c : t.tool_calls) calls.push_back(to_json(c));
    Json results = Json::array();
    for (const auto& r : t.tool_results) results.push_back(to_json(r));
    out["tool_calls"] = std::move(calls);
    out["tool_results"] = std::move(results);
  }
  return out;
}

Json to_json(const Conversation& c) {
  Json turns = Json::array();
  for (const auto& t : c.turns) turns.push_back(to_json(t));
  Json out = Json::object();
  out["id"] = c.id;
  out["function_list_id"] = c.function_list_id;
  out["background"] = c.background ? to_json(*c.background) : Json();
  out["turns"] = std::move(turns);
  return out;
}

Conversation conversation_from_json(const Json& j, const std::string& where) {
  Conversation c;
  c.id = require_string(j, "id", where);
  c.function_list_id = require_string(j, "function_list_id", where);
  c.background = std::make_shared<const Background>(
      background_from_json(require(j, "background", where), where + "/background"));
  const Json& turns = require_array(j, "turns", where);
  for (size_t i = 0; i < turns.size(); ++i)
    c.turns.push_back(turn_from_json(turns[i], where + "/turns/" + std::to_string(i)));
  return c;
}

void check_invariants(const Conversation& conversation) {
  ValidationReport report = intrinsic_findings(conversation);
  for (const auto& f : report.findings)
    if (f.blocking)
      throw InvariantError("conversation '" + conversation.id + "': " + f.detail + ": " +
                           f.kind);
}

std::vector<Conversation> parse_dataset(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError("line " + std::to_string(line_of(text, e.byte)), e.what());
  }
  if (!root.is_array()) throw ParseError("/", "dataset must be a JSON array");

  std::vector<Conversation> out;
  out.reserve(root.size());
  for (size_t i = 0; i < root.size(); ++i) {
    out.push_back(conversation_from_json(root[i], "/" + std::to_string(i)));
    check_invariants(out.back());
  }
  return out;
}

std::vector<Conversation> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open dataset file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

std::string serialize_dataset(const std::vector<Conversation>& conversations) {
  Json root = Json::array();
  for (const auto& c : conversations) root.push_back(to_json(c));
  return root.dump(2) + "\n";
}

void save_dataset(const std::vector<Conversation>& conversations,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize_dataset(conversations);
}

ValidationReport validate_conversation(const Conversation& conversation,
                                       const Registry& registry) {
  ValidationReport report = intrinsic_findings(conversation);
  if (!registry.contains(conversation.function_list_id))
    report.add("unresolvable function list",
               "function_list_id '" + conversation.function_list_id + "'");
  return report;
}

const ItemKnowledge* find_item(const Background& background, std::string_view name) {
  const std::string key = lower(name);
  for (const auto& item : background.knowledge.knowledge_info)
    if (lower(item.name) == key) return &item;
  return nullptr;
}

}  // namespace npc
