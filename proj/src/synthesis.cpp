// SPDX-License-Identifier: Apache-2.0

#include "npc/synthesis.hpp"

#include <optional>

#include "npc/errors.hpp"
#include "npc/registry.hpp"
#include "npc/toolcall.hpp"

namespace npc {

namespace {

AdapterId adapter_for(Scenario s) {
  switch (s) {
    case Scenario::function_call: return AdapterId::tool_call;
    case Scenario::with_results: return AdapterId::dialogue_with_results;
    case Scenario::without_results: return AdapterId::dialogue_without_results;
  }
  return AdapterId::dialogue_without_results;
}

// Rebuilds one conversation. Gold turns are read from `source`; replies are
// written into the copy that is returned.
Conversation regenerate(const Conversation& source, const SynthesisJob& job) {
  Conversation out = source;
  const Background& bg = *source.background;
  const AdapterId adapter = adapter_for(job.scenario);

  for (size_t k = 0; k < source.turns.size(); ++k) {
    if (source.turns[k].speaker != Speaker::npc || k == 0) continue;
    const Turn& player = source.turns[k - 1];
    // History before the player turn that this reply answers.
    const std::vector<Turn>& context =
        job.strategy == SynthesisStrategy::sequential_replace ? out.turns : source.turns;
    const std::span<const Turn> history(context.data(), k - 1);

    PromptBundle prompt;
    if (job.scenario == Scenario::with_results && !source.turns[k].tool_results.empty())
      prompt = build_with_results_prompt(bg, history, player.text, source.turns[k].tool_results);
    else
      prompt = build_without_results_prompt(bg, history, player.text);
    out.turns[k].text = job.backend->generate({prompt.system, prompt.user, adapter, job.params});
  }
  return out;
}

SynthesisResult run(const SynthesisJob& job, SynthesisStrategy strategy) {
  if (!job.backend) throw ContractError("synthesis job needs a backend");
  job.params.validate();
  if (job.scenario == Scenario::function_call)
    throw ContractError("synthesis regenerates dialogue turns; function_call is not a dialogue scenario");

  SynthesisJob effective = job;
  effective.strategy = strategy;

  const long n = static_cast<long>(job.source.size());
  std::vector<std::optional<Conversation>> done(job.source.size());
  std::vector<std::string> errors(job.source.size());

#pragma omp parallel for schedule(dynamic) num_threads(job.workers > 0 ? job.workers : 1)
  for (long i = 0; i < n; ++i) {
    try {
      done[i] = regenerate(job.source[i], effective);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  SynthesisResult result;
  for (size_t i = 0; i < done.size(); ++i) {
    if (done[i])
      result.conversations.push_back(std::move(*done[i]));
    else
      result.failures.push_back({job.source[i].id, errors[i]});
  }
  return result;
}

}  // namespace

std::string_view to_string(SynthesisStrategy s) {
  return s == SynthesisStrategy::sequential_replace ? "sequential_replace" : "whole_history";
}

SynthesisStrategy strategy_from_string(std::string_view text) {
  if (text == "sequential_replace") return SynthesisStrategy::sequential_replace;
  if (text == "whole_history") return SynthesisStrategy::whole_history;
  throw std::invalid_argument("unknown synthesis strategy '" + std::string(text) + "'");
}

SynthesisResult synthesize_sequential(const SynthesisJob& job) {
  return run(job, SynthesisStrategy::sequential_replace);
}

SynthesisResult synthesize_whole_history(const SynthesisJob& job) {
  return run(job, SynthesisStrategy::whole_history);
}

SynthesisResult synthesize(const SynthesisJob& job) { return run(job, job.strategy); }

std::vector<TrainingExample> emit_training_examples(const std::vector<Conversation>& conversations,
                                                    Scenario scenario, SynthesisStrategy strategy,
                                                    const std::string& model, const Registry* registry) {
  if (scenario == Scenario::function_call && !registry)
    throw ContractError("function_call examples need a registry for the tools block");

  std::vector<TrainingExample> out;
  for (const Conversation& c : conversations) {
    const Background& bg = *c.background;
    for (size_t k = 1; k < c.turns.size(); ++k) {
      const Turn& turn = c.turns[k];
      if (turn.speaker != Speaker::npc) continue;
      const std::span<const Turn> history(c.turns.data(), k - 1);
      const std::string& query = c.turns[k - 1].text;

      TrainingExample ex;
      ex.scenario = scenario;
      ex.provenance = {c.id, k, strategy, model};
      PromptBundle prompt;
      switch (scenario) {
        case Scenario::function_call:
          prompt = build_function_call_prompt(bg, history, query, registry->lookup(c.function_list_id));
          ex.target = render_tool_calls(turn.tool_calls);
          break;
        case Scenario::with_results:
          if (turn.tool_results.empty()) continue;
          prompt = build_with_results_prompt(bg, history, query, turn.tool_results);
          ex.target = turn.text;
          break;
        case Scenario::without_results:
          prompt = build_without_results_prompt(bg, history, query);
          ex.target = turn.text;
          break;
      }
      ex.system = std::move(prompt.system);
      ex.user = std::move(prompt.user);
      out.push_back(std::move(ex));
    }
  }
  return out;
}

Json to_json(const TrainingExample& ex) {
  Json out = Json::object();
  out["scenario"] = std::string(to_string(ex.scenario));
  out["system"] = ex.system;
  out["user"] = ex.user;
  out["target"] = ex.target;
  out["provenance"] = Json{{"conversation_id", ex.provenance.conversation_id},
                           {"turn_index", ex.provenance.turn_index},
                           {"strategy", std::string(to_string(ex.provenance.strategy))},
                           {"model", ex.provenance.model}};
  return out;
}

void write_training_examples(std::ostream& out, const std::vector<TrainingExample>& examples) {
  for (const auto& ex : examples) out << to_json(ex).dump() << '\n';
}

}  // namespace npc
