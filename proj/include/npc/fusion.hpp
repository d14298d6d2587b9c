// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "npc/checkpoint.hpp"
#include "npc/report.hpp"

namespace npc {

enum class FusionKernel { parallel, reference };

struct FusionPlan {
  std::vector<std::filesystem::path> inputs;
  std::vector<double> weights;  // empty means uniform
  std::filesystem::path output;  // empty: do not write
  FusionKernel kernel = FusionKernel::parallel;
};

std::vector<double> uniform_weights(std::size_t n);

// Blocking findings: "key set mismatch", "shape mismatch", "dtype mismatch",
// "rank mismatch", "alpha mismatch". Differing extras or target_modules are
// non-blocking warnings. A single checkpoint is trivially compatible.
ValidationReport check_compatible(std::span<const AdapterCheckpoint> checkpoints);

// Element-wise weighted mean of every tensor. Weights must be finite and sum
// to 1 (uniform when empty). Output takes the first input's tensor order and
// metadata. Throws std::invalid_argument when inputs are not fusable.
AdapterCheckpoint average_checkpoints(std::span<const AdapterCheckpoint> checkpoints,
                                      std::span<const double> weights = {},
                                      FusionKernel kernel = FusionKernel::parallel);

// Reads plan.inputs, fuses them, writes plan.output when set.
AdapterCheckpoint average_checkpoints(const FusionPlan& plan);

}  // namespace npc
