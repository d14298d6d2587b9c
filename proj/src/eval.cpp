// SPDX-License-Identifier: Apache-2.0

#include "npc/eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace npc {

namespace {

double mean_of(std::span<const TurnScore> turns, double TurnScore::*field) {
  double sum = 0.0;
  for (const auto& t : turns) sum += t.*field;
  return sum / static_cast<double>(turns.size());
}

bool is_task1(const Conversation& c) {
  for (const auto& t : c.turns)
    if (t.speaker == Speaker::npc && !t.tool_calls.empty()) return true;
  return false;
}

Json calls_json(const std::vector<ToolCall>& calls) {
  Json out = Json::array();
  for (const auto& c : calls) out.push_back(to_json(c));
  return out;
}

Json aggregate_json(const TaskAggregate& a) {
  return Json{{"turns", a.turns},
              {"function_score", a.function_score},
              {"text_score", a.text_score},
              {"score", a.score}};
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

double score_task1(std::span<const TurnScore> turns) {
  if (turns.empty()) throw std::invalid_argument("score_task1: no turns");
  return (mean_of(turns, &TurnScore::function_score) + mean_of(turns, &TurnScore::text_score)) / 2.0;
}

double score_task2(std::span<const TurnScore> turns) {
  if (turns.empty()) throw std::invalid_argument("score_task2: no turns");
  const double cpdc_slot = mean_of(turns, &TurnScore::text_score);
  const double bleurt_slot = mean_of(turns, &TurnScore::text_score);
  return (cpdc_slot + bleurt_slot) / 2.0;
}

double score_task3(double task1, double task2) {
  for (double v : {task1, task2})
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("score_task3: scores must lie in [0, 1]");
  return (task1 + task2) / 2.0;
}

bool mean_consistent(double a, double b, double combined, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const long long ia = std::llround(a * scale);
  const long long ib = std::llround(b * scale);
  const long long ic = std::llround(combined * scale);
  // |(a+b)/2 - c| <= 1 unit  <=>  |a + b - 2c| <= 2 units
  return std::llabs(ia + ib - 2 * ic) <= 2;
}

std::string_view to_string(TaskMode mode) {
  switch (mode) {
    case TaskMode::automatic: return "auto";
    case TaskMode::task1: return "task1";
    case TaskMode::task2: return "task2";
  }
  return "auto";
}

TaskMode task_mode_from_string(std::string_view text) {
  if (text == "auto") return TaskMode::automatic;
  if (text == "task1" || text == "1") return TaskMode::task1;
  if (text == "task2" || text == "2") return TaskMode::task2;
  throw std::invalid_argument("unknown task mode '" + std::string(text) + "'");
}

EvalReport run_eval(const std::vector<Conversation>& dataset, std::shared_ptr<const Registry> registry,
                    std::shared_ptr<Backend> backend, const EvalOptions& options) {
  EvalReport report;
  std::vector<TurnScore> task1_turns;
  std::vector<TurnScore> task2_turns;
  Json conversations = Json::array();

  for (const Conversation& conv : dataset) {
    const bool task1 = options.task_mode == TaskMode::task1 ||
                       (options.task_mode == TaskMode::automatic && is_task1(conv));
    Json entry = Json::object();
    entry["id"] = conv.id;
    entry["task"] = task1 ? "task1" : "task2";

    std::vector<TurnOutcome> outcomes;
    try {
      outcomes = run_conversation(conv, registry, backend, options.settings);
      entry["status"] = "ok";
    } catch (const TurnAborted& e) {
      entry["status"] = "aborted";
      entry["error"] = Json{{"turn_index", e.turn_index ? Json(*e.turn_index) : Json()},
                            {"stage", e.stage()},
                            {"adapter", std::string(to_string(e.adapter()))},
                            {"message", e.what()}};
      report.partial = true;
      conversations.push_back(std::move(entry));
      continue;
    }

    // Pair each player turn with the gold NPC reply that follows it.
    std::vector<TextPair> texts;
    std::vector<const Turn*> golds;
    std::vector<size_t> outcome_index;
    size_t player = 0;
    for (size_t i = 0; i < conv.turns.size(); ++i) {
      if (conv.turns[i].speaker != Speaker::player) continue;
      if (i + 1 < conv.turns.size()) {
        golds.push_back(&conv.turns[i + 1]);
        outcome_index.push_back(player);
        texts.emplace_back(outcomes[player].response, conv.turns[i + 1].text);
      }
      ++player;
    }
    const std::vector<double> text_scores = text_similarity_batch(texts);

    Json turns = Json::array();
    std::vector<TurnScore> scores;
    for (size_t k = 0; k < golds.size(); ++k) {
      const TurnOutcome& o = outcomes[outcome_index[k]];
      TurnScore s{function_score(o.parsed_calls, golds[k]->tool_calls), text_scores[k]};
      scores.push_back(s);
      Json t = Json::object();
      t["player_turn"] = outcome_index[k];
      t["scenario"] = std::string(to_string(o.scenario));
      t["predicted_calls"] = calls_json(o.parsed_calls);
      t["gold_calls"] = calls_json(golds[k]->tool_calls);
      t["response"] = o.response;
      t["gold_response"] = golds[k]->text;
      t["function_score"] = s.function_score;
      t["text_score"] = s.text_score;
      turns.push_back(std::move(t));
    }
    entry["turns"] = std::move(turns);
    if (!scores.empty()) {
      entry["function_score"] = mean_of(scores, &TurnScore::function_score);
      entry["text_score"] = mean_of(scores, &TurnScore::text_score);
    }
    auto& bucket = task1 ? task1_turns : task2_turns;
    bucket.insert(bucket.end(), scores.begin(), scores.end());
    conversations.push_back(std::move(entry));
  }

  Json tasks = Json::object();
  if (!task1_turns.empty()) {
    report.task1 = TaskAggregate{task1_turns.size(), mean_of(task1_turns, &TurnScore::function_score),
                                 mean_of(task1_turns, &TurnScore::text_score), score_task1(task1_turns)};
    tasks["task1"] = aggregate_json(*report.task1);
  }
  if (!task2_turns.empty()) {
    report.task2 = TaskAggregate{task2_turns.size(), mean_of(task2_turns, &TurnScore::function_score),
                                 mean_of(task2_turns, &TurnScore::text_score), score_task2(task2_turns)};
    tasks["task2"] = aggregate_json(*report.task2);
  }
  if (report.task1 && report.task2) {
    report.task3 = score_task3(report.task1->score, report.task2->score);
    tasks["task3"] = Json{{"score", *report.task3}};
  }

  Json adapters = Json::object();
  Json params = Json::object();
  for (AdapterId a : kAllAdapters) {
    adapters[std::string(to_string(a))] = backend->profile().model_for(a);
    const GenerationParams& p = options.settings.params.at(a);
    Json pj{{"temperature", p.temperature}, {"top_p", p.top_p}, {"max_tokens", p.max_tokens}};
    if (p.seed) pj["seed"] = *p.seed;
    params[std::string(to_string(a))] = std::move(pj);
  }

  Json& doc = report.document;
  doc = Json::object();
  doc["metric_version"] = kMetricVersion;
  doc["surrogates"] = Json{
      {"function_score", "surrogate: exact-match F1 over multisets of (name, canonical parameters)"},
      {"bleurt", "surrogate: chrF (character n-grams 1..6, beta 2), not the learned metric"},
      {"cpdc", "surrogate: chrF fills this slot as well, so Task 2 = mean chrF"},
      {"absolute_scores", "not comparable to leaderboard numbers; only the aggregation arithmetic matches"}};
  doc["config"] = Json{{"task_mode", std::string(to_string(options.task_mode))},
                       {"routing", options.settings.routing == RoutingRule::any_result ? "any_result" : "ok_only"},
                       {"strict_validation", options.settings.strict_validation},
                       {"max_history_turns", options.settings.max_history_turns},
                       {"turn_deadline_ms", options.settings.turn_deadline.count()},
                       {"adapters", std::move(adapters)},
                       {"generation", std::move(params)},
                       {"conversations", dataset.size()}};
  doc["tasks"] = std::move(tasks);
  doc["partial"] = report.partial;
  doc["conversations"] = std::move(conversations);
  return report;
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << report.document.dump(2) << '\n';
}

std::string render_score_table(const EvalReport& report) {
  auto cell = [](const std::optional<double>& v) { return v ? fmt3(*v) : std::string("  -  "); };
  std::optional<double> t1, t2;
  if (report.task1) t1 = report.task1->score;
  if (report.task2) t2 = report.task2->score;
  std::string out = "            Task3   Task1   Task2\n";
  out += "automatic   " + cell(report.task3) + "   " + cell(t1) + "   " + cell(t2) + "\n";
  if (report.partial) out += "(partial: some conversations aborted)\n";
  return out;
}

}  // namespace npc
