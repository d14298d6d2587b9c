// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "npc/backend.hpp"
#include "npc/context.hpp"
#include "npc/metrics.hpp"
#include "npc/registry.hpp"
#include "npc/router.hpp"

namespace npc {

struct TurnScore {
  double function_score = 0.0;
  double text_score = 0.0;
};

// Task 1: mean function score averaged with mean text score.
// Throws std::invalid_argument on empty input.
double score_task1(std::span<const TurnScore> turns);
// Task 2: the two text-metric slots are both filled by text_similarity, so
// this is (mean text + mean text) / 2.
double score_task2(std::span<const TurnScore> turns);
// Midpoint of the two task scores; both must lie in [0, 1].
double score_task3(double task1, double task2);

// True when `combined` is the mean of `a` and `b` up to rounding of all
// three values to `decimals` places (checked in integer units, so a
// half-unit boundary is not lost to binary floating point).
bool mean_consistent(double a, double b, double combined, int decimals = 3);

enum class TaskMode { automatic, task1, task2 };

std::string_view to_string(TaskMode mode);
TaskMode task_mode_from_string(std::string_view text);

struct EvalOptions {
  RunSettings settings;
  // automatic: a conversation belongs to task 1 when any gold NPC turn has
  // tool calls, otherwise task 2.
  TaskMode task_mode = TaskMode::automatic;
};

struct TaskAggregate {
  size_t turns = 0;
  double function_score = 0.0;
  double text_score = 0.0;
  double score = 0.0;
};

struct EvalReport {
  std::optional<TaskAggregate> task1;
  std::optional<TaskAggregate> task2;
  std::optional<double> task3;
  bool partial = false;
  Json document;  // full report, deterministic for a fixed dataset and backend
};

inline constexpr const char* kMetricVersion = "npc-eval/1";

EvalReport run_eval(const std::vector<Conversation>& dataset, std::shared_ptr<const Registry> registry,
                    std::shared_ptr<Backend> backend, const EvalOptions& options = {});

// Writes report.document with 2-space indentation and a trailing newline.
void write_report(const EvalReport& report, const std::filesystem::path& path);

// Plain-text summary: one header row (Task3 Task1 Task2) and one score row.
std::string render_score_table(const EvalReport& report);

}  // namespace npc
