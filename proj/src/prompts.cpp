// SPDX-License-Identifier: Apache-2.0

#include "npc/prompts.hpp"

#include <cctype>

#include "npc/errors.hpp"
#include "npc/templates.hpp"
#include "npc/toolcall.hpp"

namespace npc {

namespace {

using Values = std::map<std::string, std::string, std::less<>>;

std::string first_sentence(std::string_view text) {
  const size_t end = text.find_first_of(".!?");
  return std::string(end == std::string_view::npos ? text : text.substr(0, end + 1));
}

constexpr std::string_view kHistoryLabel = "conversation history:\n";

}  // namespace

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::function_call: return "function_call";
    case Scenario::with_results: return "with_results";
    case Scenario::without_results: return "without_results";
  }
  return "function_call";
}

Scenario scenario_from_string(std::string_view text) {
  if (text == "function_call") return Scenario::function_call;
  if (text == "with_results") return Scenario::with_results;
  if (text == "without_results") return Scenario::without_results;
  throw std::invalid_argument("unknown scenario '" + std::string(text) + "'");
}

std::string fill_template(std::string_view tpl, const Values& values) {
  std::string out;
  out.reserve(tpl.size());
  size_t pos = 0;
  while (pos < tpl.size()) {
    const size_t open = tpl.find('{', pos);
    if (open == std::string_view::npos) break;
    const size_t close = tpl.find('}', open + 1);
    if (close == std::string_view::npos) break;
    auto it = values.find(tpl.substr(open + 1, close - open - 1));
    if (it == values.end()) {
      out.append(tpl.substr(pos, open + 1 - pos));
      pos = open + 1;
      continue;
    }
    out.append(tpl.substr(pos, open - pos));
    out.append(it->second);
    pos = close + 1;
  }
  out.append(tpl.substr(std::min(pos, tpl.size())));
  return out;
}

std::string render_history(std::span<const Turn> turns) {
  std::string out;
  for (size_t i = 0; i < turns.size(); ++i) {
    if (i) out += '\n';
    out += turns[i].speaker == Speaker::player ? "User: " : "NPC: ";
    out += turns[i].text;
  }
  return out;
}

std::string render_state(const StateInfo& state) {
  return "location: " + state.location + "\ntime: " + state.time + "\nweather: " + state.weather;
}

std::string render_persona(const Persona& p) {
  std::string out = "name: " + p.name + "\nage: " + p.age + "\ngender: " + p.gender +
                    "\noccupation: " + p.occupation + "\nappearance: " + p.appearance;
  for (const auto& [k, v] : p.extras) out += "\n" + k + ": " + v;
  return out;
}

std::string render_knowledge_info(const std::vector<ItemKnowledge>& items) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) out += '\n';
    out += items[i].name + " (" + items[i].item_type + "): " + items[i].description;
  }
  return out;
}

PromptBundle build_function_call_prompt(const Background& bg, std::span<const Turn> history,
                                        std::string_view query, const FunctionList& list,
                                        std::string_view additional_info) {
  PromptBundle p;
  p.scenario = Scenario::function_call;
  p.system = fill_template(templates::kFunctionCallSystem, {{"tools", render_tools_block(list)}});
  p.user = fill_template(templates::kFunctionCallUser,
                         {{"state", render_state(bg.state)},
                          {"knowledge_info", render_knowledge_info(bg.knowledge.knowledge_info)},
                          {"additional_information", std::string(additional_info)},
                          {"history", render_history(history)},
                          {"query", std::string(query)}});
  return p;
}

PromptBundle build_function_call_prompt(const Conversation& c, std::string_view query,
                                        const FunctionList& list,
                                        std::string_view additional_info) {
  return build_function_call_prompt(*c.background, c.turns, query, list, additional_info);
}

PromptBundle build_with_results_prompt(const Background& bg, std::span<const Turn> history,
                                       std::string_view query,
                                       const std::vector<ToolResult>& results) {
  if (results.empty())
    throw ContractError("build_with_results_prompt: no tool results; use the without-results prompt");
  PromptBundle p;
  p.scenario = Scenario::with_results;
  p.system = fill_template(templates::kWithResultsSystem,
                           {{"role", bg.role},
                            {"persona", render_persona(bg.persona)},
                            {"function_call_result", render_tool_results(results)},
                            {"knowledge_info", render_knowledge_info(bg.knowledge.knowledge_info)}});
  p.user = fill_template(templates::kDialogueUser,
                         {{"history", render_history(history)}, {"query", std::string(query)}});
  return p;
}

PromptBundle build_with_results_prompt(const Conversation& c, std::string_view query,
                                       const std::vector<ToolResult>& results) {
  return build_with_results_prompt(*c.background, c.turns, query, results);
}

PromptBundle build_without_results_prompt(const Background& bg, std::span<const Turn> history,
                                          std::string_view query) {
  PromptBundle p;
  p.scenario = Scenario::without_results;
  p.system = fill_template(templates::kWithoutResultsSystem,
                           {{"role", bg.role},
                            {"state", render_state(bg.state)},
                            {"persona", render_persona(bg.persona)},
                            {"worldview", bg.worldview}});
  p.user = fill_template(templates::kDialogueUser,
                         {{"history", render_history(history)}, {"query", std::string(query)}});
  return p;
}

PromptBundle build_without_results_prompt(const Conversation& c, std::string_view query) {
  return build_without_results_prompt(*c.background, c.turns, query);
}

WordLimitCheck check_word_limit(std::string_view response, Scenario scenario) {
  WordLimitCheck check;
  bool in_word = false;
  for (unsigned char ch : response) {
    const bool space = std::isspace(ch) != 0;
    if (!space && !in_word) ++check.word_count;
    in_word = !space;
  }
  if (scenario == Scenario::with_results) check.limit = kWithResultsWordLimit;
  if (scenario == Scenario::without_results) check.limit = kWithoutResultsWordLimit;
  check.within_limit = !check.limit || check.word_count <= *check.limit;
  return check;
}

ValidationReport check_prompt_exclusions(const PromptBundle& prompt, const Background& bg) {
  std::string scaffold = prompt.system;
  scaffold += '\n';
  const size_t history_at = prompt.user.find(kHistoryLabel);
  scaffold += prompt.user.substr(0, history_at);

  ValidationReport report;
  auto forbid = [&](const std::string& needle, const char* what) {
    if (!needle.empty() && scaffold.find(needle) != std::string::npos)
      report.add(std::string(what) + " leaked into " + std::string(to_string(prompt.scenario)) +
                     " prompt",
                 needle);
  };

  if (prompt.scenario == Scenario::function_call || prompt.scenario == Scenario::with_results) {
    forbid(bg.worldview, "worldview");
    forbid(first_sentence(bg.worldview), "worldview");
  }
  if (prompt.scenario == Scenario::function_call) {
    const Persona& p = bg.persona;
    for (const std::string* field : {&p.name, &p.age, &p.gender, &p.occupation, &p.appearance})
      forbid(*field, "persona");
    for (const auto& [_, v] : p.extras) forbid(v, "persona");
  }
  if (prompt.scenario == Scenario::without_results)
    for (const auto& item : bg.knowledge.knowledge_info) forbid(item.name, "item name");
  return report;
}

}  // namespace npc
