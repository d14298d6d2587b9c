// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "npc/backend.hpp"
#include "npc/context.hpp"
#include "npc/prompts.hpp"
#include "npc/registry.hpp"
#include "npc/toolcall.hpp"

namespace npc {

// How the tool stage's outcome selects the response adapter.
enum class RoutingRule {
  any_result,  // any executed call, including not_found lookups
  ok_only,     // only status=ok results count
};

struct RunSettings {
  std::chrono::milliseconds turn_deadline{7000};
  std::map<AdapterId, GenerationParams> params = default_params();
  // Most recent turns kept in prompts; 0 keeps the whole history.
  size_t max_history_turns = 0;
  RoutingRule routing = RoutingRule::any_result;
  bool strict_validation = false;
  // Passed verbatim into the tool-call prompt's additional-information slot.
  std::string additional_info;

  static std::map<AdapterId, GenerationParams> default_params();
};

struct TurnOutcome {
  Scenario scenario = Scenario::without_results;
  std::string raw_toolcall_output;
  std::vector<ToolCall> parsed_calls;
  std::vector<Diagnostic> diagnostics;
  std::vector<ToolCall> valid_calls;
  std::vector<ToolResult> results;
  std::string response;
  std::map<std::string, double> timings_ms;
  bool deadline_exceeded = false;
};

// with_results iff at least one result counts under `rule`.
Scenario classify_scenario(const std::vector<ToolResult>& results,
                           RoutingRule rule = RoutingRule::any_result);

Json to_json(const TurnOutcome& outcome, bool include_timings = true);
// One JSON object per line.
void write_trace_line(std::ostream& out, const TurnOutcome& outcome);

// A backend failure that aborted a turn. Nothing was appended to the session.
class TurnAborted : public std::runtime_error {
 public:
  TurnAborted(std::string stage, AdapterId adapter, BackendError::Kind kind,
              const std::string& message);

  const std::string& stage() const { return stage_; }
  AdapterId adapter() const { return adapter_; }
  BackendError::Kind kind() const { return kind_; }
  // Set by run_conversation.
  std::optional<size_t> turn_index;

 private:
  std::string stage_;
  AdapterId adapter_;
  BackendError::Kind kind_;
};

class SessionBusy : public std::runtime_error {
 public:
  SessionBusy() : std::runtime_error("a turn is already in flight for this session") {}
};

// A live dialogue: the conversation grows by one player and one NPC turn per
// run_turn. One turn in flight at a time; a concurrent call throws
// SessionBusy. Distinct sessions are independent.
class Session {
 public:
  Session(Conversation conversation, std::shared_ptr<const Registry> registry,
          std::shared_ptr<Backend> backend, RunSettings settings = {});

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  TurnOutcome run_turn(std::string_view query);

  Conversation snapshot() const;
  std::vector<TurnOutcome> outcomes() const;
  const RunSettings& settings() const { return settings_; }
  const Background& background() const { return *background_; }

 private:
  std::shared_ptr<const Registry> registry_;
  std::shared_ptr<Backend> backend_;
  RunSettings settings_;
  std::shared_ptr<const Background> background_;
  const FunctionList* functions_;

  mutable std::mutex mutex_;
  Conversation conversation_;
  std::vector<TurnOutcome> outcomes_;
  std::atomic<bool> busy_{false};
};

// Replays the player turns of `gold` through a fresh session, feeding the
// predicted NPC replies back into later history. TurnAborted carries the
// failing player turn's index.
std::vector<TurnOutcome> run_conversation(const Conversation& gold,
                                          std::shared_ptr<const Registry> registry,
                                          std::shared_ptr<Backend> backend,
                                          const RunSettings& settings = {});

}  // namespace npc
