// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "npc/backend.hpp"
#include "npc/context.hpp"
#include "npc/prompts.hpp"

namespace npc {

enum class SynthesisStrategy {
  // Regenerate NPC turn k with the previously generated replies 1..k-1 in
  // the history.
  sequential_replace,
  // Regenerate NPC turn k with the gold history 1..k-1 in context.
  whole_history,
};

std::string_view to_string(SynthesisStrategy strategy);
SynthesisStrategy strategy_from_string(std::string_view text);

struct SynthesisJob {
  std::vector<Conversation> source;
  SynthesisStrategy strategy = SynthesisStrategy::sequential_replace;
  std::shared_ptr<Backend> backend;
  // Sampling used when regenerating with the external models.
  GenerationParams params{0.1, 0.95, 256, std::nullopt};
  Scenario scenario = Scenario::without_results;
  // Conversations synthesized at once; turns within one stay sequential.
  int workers = 1;
};

struct SynthesisFailure {
  std::string conversation_id;
  std::string error;
};

struct SynthesisResult {
  // Successful conversations in source order; failed ones are dropped.
  std::vector<Conversation> conversations;
  std::vector<SynthesisFailure> failures;
};

SynthesisResult synthesize_sequential(const SynthesisJob& job);
SynthesisResult synthesize_whole_history(const SynthesisJob& job);
SynthesisResult synthesize(const SynthesisJob& job);

struct Provenance {
  std::string conversation_id;
  size_t turn_index = 0;
  SynthesisStrategy strategy = SynthesisStrategy::sequential_replace;
  std::string model;
};

struct TrainingExample {
  Scenario scenario = Scenario::without_results;
  std::string system;
  std::string user;
  std::string target;
  Provenance provenance;
};

// One example per NPC turn, prompted with the builder for `scenario`:
// without_results uses the stored history; function_call targets the turn's
// rendered tool calls and needs `registry`; with_results skips turns that
// carry no tool results.
std::vector<TrainingExample> emit_training_examples(const std::vector<Conversation>& conversations,
                                                    Scenario scenario, SynthesisStrategy strategy,
                                                    const std::string& model,
                                                    const Registry* registry = nullptr);

Json to_json(const TrainingExample& example);
void write_training_examples(std::ostream& out, const std::vector<TrainingExample>& examples);

}  // namespace npc
