// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "npc/context.hpp"
#include "npc/registry.hpp"
#include "npc/report.hpp"

namespace npc {

enum class Scenario { function_call, with_results, without_results };

std::string_view to_string(Scenario scenario);
Scenario scenario_from_string(std::string_view text);

struct PromptBundle {
  std::string system;
  std::string user;
  Scenario scenario = Scenario::function_call;
};

// Literal splice of {key} markers; markers with no value are left as-is and
// substituted text is never rescanned.
std::string fill_template(std::string_view tpl,
                          const std::map<std::string, std::string, std::less<>>& values);

std::string render_history(std::span<const Turn> turns);
std::string render_state(const StateInfo& state);
std::string render_persona(const Persona& persona);
std::string render_knowledge_info(const std::vector<ItemKnowledge>& items);

// Tool-call stage: tools block, state, item knowledge, history and query.
// No worldview, no persona.
PromptBundle build_function_call_prompt(const Background& background,
                                        std::span<const Turn> history,
                                        std::string_view query, const FunctionList& list,
                                        std::string_view additional_info = {});
PromptBundle build_function_call_prompt(const Conversation& conversation,
                                        std::string_view query, const FunctionList& list,
                                        std::string_view additional_info = {});

// Response stage after tool execution: role, persona, tool results and item
// knowledge. Throws ContractError when `results` is empty.
PromptBundle build_with_results_prompt(const Background& background,
                                       std::span<const Turn> history, std::string_view query,
                                       const std::vector<ToolResult>& results);
PromptBundle build_with_results_prompt(const Conversation& conversation,
                                       std::string_view query,
                                       const std::vector<ToolResult>& results);

// Response stage with no tool results: role, state, persona and worldview.
// No item knowledge.
PromptBundle build_without_results_prompt(const Background& background,
                                          std::span<const Turn> history,
                                          std::string_view query);
PromptBundle build_without_results_prompt(const Conversation& conversation,
                                          std::string_view query);

struct WordLimitCheck {
  size_t word_count = 0;
  std::optional<size_t> limit;  // none for the tool-call stage
  bool within_limit = true;
};

inline constexpr size_t kWithResultsWordLimit = 90;
inline constexpr size_t kWithoutResultsWordLimit = 64;

// Whitespace-token count against the limit stated in the scenario's prompt.
// Advisory: nothing is truncated.
WordLimitCheck check_word_limit(std::string_view response, Scenario scenario);

// Checks the composition rules on a prompt that was actually built:
// function_call carries no worldview and no persona values, with_results no
// worldview, without_results no item names. Player-authored text (the
// rendered history and the query) is removed first since the player may
// mention anything.
ValidationReport check_prompt_exclusions(const PromptBundle& prompt, const Background& background);

}  // namespace npc
