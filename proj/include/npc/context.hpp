// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "npc/canonical_json.hpp"
#include "npc/report.hpp"
#include "npc/tool_types.hpp"

namespace npc {

class Registry;

struct Persona {
  std::string name;
  std::string age;
  std::string gender;
  std::string occupation;
  std::string appearance;
  // Attributes beyond the five named ones, kept so they survive round-trips.
  std::map<std::string, std::string> extras;

  bool operator==(const Persona&) const = default;
};

struct Section {
  std::string title;
  std::string text;

  bool operator==(const Section&) const = default;
};

struct ItemKnowledge {
  std::string name;
  std::string item_type;
  std::string description;

  bool operator==(const ItemKnowledge&) const = default;
};

struct Knowledge {
  std::vector<Section> general_info;
  std::vector<ItemKnowledge> knowledge_info;

  bool operator==(const Knowledge&) const = default;
};

struct StateInfo {
  std::string location;
  std::string time;
  std::string weather;

  bool operator==(const StateInfo&) const = default;
};

// Game context that stays fixed for a whole conversation.
struct Background {
  std::string worldview;
  Persona persona;
  std::string role;
  Knowledge knowledge;
  StateInfo state;

  bool operator==(const Background&) const = default;
};

enum class Speaker { player, npc };

std::string_view to_string(Speaker speaker);

struct Turn {
  Speaker speaker = Speaker::player;
  std::string text;
  std::vector<ToolCall> tool_calls;
  std::vector<ToolResult> tool_results;

  bool operator==(const Turn&) const = default;
};

struct Conversation {
  std::string id;
  // Shared and const: no pipeline stage can modify the background.
  std::shared_ptr<const Background> background;
  std::string function_list_id;
  std::vector<Turn> turns;

  bool operator==(const Conversation& other) const;
};

Json to_json(const Background& background);
Json to_json(const Turn& turn);
Json to_json(const Conversation& conversation);

// `where` is a JSON-pointer style locator used in error messages.
Conversation conversation_from_json(const Json& j, const std::string& where = "");

// Throws InvariantError naming the conversation id and offending field.
void check_invariants(const Conversation& conversation);

// Reads a dataset file: a JSON array of conversations. Throws ParseError for
// syntax or shape problems (with a line or field locator) and InvariantError
// for broken invariants.
std::vector<Conversation> load_dataset(const std::filesystem::path& path);
std::vector<Conversation> parse_dataset(std::string_view text);

// Serialized with 2-space indentation; load(save(x)) == x.
std::string serialize_dataset(const std::vector<Conversation>& conversations);
void save_dataset(const std::vector<Conversation>& conversations,
                  const std::filesystem::path& path);

// Non-throwing check of every invariant plus function_list_id resolution.
ValidationReport validate_conversation(const Conversation& conversation,
                                       const Registry& registry);

// Case-insensitive lookup in knowledge_info.
const ItemKnowledge* find_item(const Background& background, std::string_view name);

}  // namespace npc
