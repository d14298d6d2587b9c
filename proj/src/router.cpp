// SPDX-License-Identifier: Apache-2.0

#include "npc/router.hpp"

#include <algorithm>

#include "npc/errors.hpp"

namespace npc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

struct BusyGuard {
  explicit BusyGuard(std::atomic<bool>& flag) : flag_(flag) {
    if (flag_.exchange(true)) throw SessionBusy();
  }
  ~BusyGuard() { flag_.store(false); }
  std::atomic<bool>& flag_;
};

}  // namespace

std::map<AdapterId, GenerationParams> RunSettings::default_params() {
  // Greedy decoding for every pipeline stage.
  return {{AdapterId::tool_call, {0.0, 1.0, 512, std::nullopt}},
          {AdapterId::dialogue_with_results, {0.0, 1.0, 256, std::nullopt}},
          {AdapterId::dialogue_without_results, {0.0, 1.0, 256, std::nullopt}}};
}

Scenario classify_scenario(const std::vector<ToolResult>& results, RoutingRule rule) {
  const bool counts =
      rule == RoutingRule::any_result
          ? !results.empty()
          : std::any_of(results.begin(), results.end(),
                        [](const ToolResult& r) { return r.status == ToolStatus::ok; });
  return counts ? Scenario::with_results : Scenario::without_results;
}

Json to_json(const TurnOutcome& o, bool include_timings) {
  Json parsed = Json::array();
  for (const auto& c : o.parsed_calls) parsed.push_back(to_json(c));
  Json valid = Json::array();
  for (const auto& c : o.valid_calls) valid.push_back(to_json(c));
  Json results = Json::array();
  for (const auto& r : o.results) results.push_back(to_json(r));
  Json diags = Json::array();
  for (const auto& d : o.diagnostics)
    diags.push_back(Json{{"kind", std::string(to_string(d.kind))},
                         {"begin", d.begin},
                         {"end", d.end},
                         {"detail", d.detail}});

  Json out = Json::object();
  out["scenario"] = std::string(to_string(o.scenario));
  out["raw_toolcall_output"] = o.raw_toolcall_output;
  out["parsed_calls"] = std::move(parsed);
  out["diagnostics"] = std::move(diags);
  out["valid_calls"] = std::move(valid);
  out["results"] = std::move(results);
  out["response"] = o.response;
  if (include_timings) {
    Json timings = Json::object();
    for (const auto& [k, v] : o.timings_ms) timings[k] = v;
    out["timings_ms"] = std::move(timings);
  }
  out["deadline_exceeded"] = o.deadline_exceeded;
  return out;
}

void write_trace_line(std::ostream& out, const TurnOutcome& outcome) {
  out << to_json(outcome).dump() << '\n';
}

TurnAborted::TurnAborted(std::string stage, AdapterId adapter, BackendError::Kind kind,
                         const std::string& message)
    : std::runtime_error(message), stage_(std::move(stage)), adapter_(adapter), kind_(kind) {}

Session::Session(Conversation conversation, std::shared_ptr<const Registry> registry,
                 std::shared_ptr<Backend> backend, RunSettings settings)
    : registry_(std::move(registry)),
      backend_(std::move(backend)),
      settings_(std::move(settings)),
      background_(conversation.background),
      conversation_(std::move(conversation)) {
  if (!registry_ || !backend_ || !background_)
    throw ContractError("Session needs a registry, a backend and a background");
  check_invariants(conversation_);
  if (!conversation_.turns.empty() && conversation_.turns.back().speaker == Speaker::player)
    throw ContractError("Session history must end with an NPC turn");
  functions_ = &registry_->lookup(conversation_.function_list_id);
  backend_->profile().validate();
  for (AdapterId a : kAllAdapters) settings_.params[a].validate();
}

Conversation Session::snapshot() const {
  std::lock_guard lock(mutex_);
  return conversation_;
}

std::vector<TurnOutcome> Session::outcomes() const {
  std::lock_guard lock(mutex_);
  return outcomes_;
}

TurnOutcome Session::run_turn(std::string_view query) {
  if (query.empty()) throw ContractError("run_turn: empty query");
  BusyGuard guard(busy_);

  // Only this thread appends while busy_ is held, so reading the turns
  // without the lock is safe here.
  const std::vector<Turn>& turns = conversation_.turns;
  std::span<const Turn> history(turns);
  if (settings_.max_history_turns && history.size() > settings_.max_history_turns)
    history = history.last(settings_.max_history_turns);

  TurnOutcome out;
  const auto started = Clock::now();

  auto generate = [&](const PromptBundle& prompt, AdapterId adapter, const char* stage) {
    try {
      return backend_->generate({prompt.system, prompt.user, adapter, settings_.params.at(adapter)});
    } catch (const BackendError& e) {
      throw TurnAborted(stage, adapter, e.kind(), e.what());
    }
  };

  // Stage 1: tool calling.
  auto t = Clock::now();
  const PromptBundle call_prompt = build_function_call_prompt(
      *background_, history, query, *functions_, settings_.additional_info);
  out.raw_toolcall_output = generate(call_prompt, AdapterId::tool_call, "tool_call");
  out.timings_ms["tool_call_generation"] = ms_since(t);

  t = Clock::now();
  ParsedCalls parsed = parse_tool_calls(out.raw_toolcall_output);
  out.parsed_calls = std::move(parsed.calls);
  out.diagnostics = std::move(parsed.diagnostics);
  const CallValidationOptions opts{settings_.strict_validation};
  for (const auto& call : out.parsed_calls) {
    if (!validate_call(call, *functions_, opts).ok()) continue;
    out.valid_calls.push_back(call);
    out.results.push_back(execute_tool(call, conversation_, *functions_));
  }
  out.timings_ms["tool_execution"] = ms_since(t);

  // Stage 2: response from the adapter matching the scenario.
  t = Clock::now();
  out.scenario = classify_scenario(out.results, settings_.routing);
  if (out.scenario == Scenario::with_results) {
    std::vector<ToolResult> shown = out.results;
    if (settings_.routing == RoutingRule::ok_only)
      std::erase_if(shown, [](const ToolResult& r) { return r.status != ToolStatus::ok; });
    out.response = generate(build_with_results_prompt(*background_, history, query, shown),
                            AdapterId::dialogue_with_results, "response");
  } else {
    out.response = generate(build_without_results_prompt(*background_, history, query),
                            AdapterId::dialogue_without_results, "response");
  }
  out.timings_ms["response_generation"] = ms_since(t);

  const double total = ms_since(started);
  out.timings_ms["total"] = total;
  out.deadline_exceeded = total > static_cast<double>(settings_.turn_deadline.count());

  std::lock_guard lock(mutex_);
  conversation_.turns.push_back({Speaker::player, std::string(query), {}, {}});
  conversation_.turns.push_back({Speaker::npc, out.response, out.valid_calls, out.results});
  outcomes_.push_back(out);
  return out;
}

std::vector<TurnOutcome> run_conversation(const Conversation& gold,
                                          std::shared_ptr<const Registry> registry,
                                          std::shared_ptr<Backend> backend,
                                          const RunSettings& settings) {
  Conversation fresh = gold;
  fresh.turns.clear();
  Session session(std::move(fresh), std::move(registry), std::move(backend), settings);

  std::vector<TurnOutcome> outcomes;
  size_t player_index = 0;
  for (const Turn& turn : gold.turns) {
    if (turn.speaker != Speaker::player) continue;
    try {
      outcomes.push_back(session.run_turn(turn.text));
    } catch (TurnAborted& e) {
      e.turn_index = player_index;
      throw;
    }
    ++player_index;
  }
  return outcomes;
}

}  // namespace npc
