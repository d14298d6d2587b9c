// SPDX-License-Identifier: Apache-2.0
//
// Helpers and independent oracles shared by unit and acceptance tests. The
// oracles deliberately avoid the library's own code paths.

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "npc/checkpoint.hpp"
#include "npc/context.hpp"
#include "npc/registry.hpp"
#include "npc/tool_types.hpp"

namespace npc::test {

std::filesystem::path source_path(const std::string& relative);
std::string read_text(const std::filesystem::path& path);

// Fresh empty directory under the build tree.
std::filesystem::path scratch_dir(const std::string& name);

// chrF by brute force: sorted n-gram lists merged pairwise.
double chrf_oracle(const std::string& hyp, const std::string& ref);

// binary16 / bfloat16 decoding by formula, not bit tricks.
double decode_f16(std::uint16_t bits);
double decode_bf16(std::uint16_t bits);
// Spacing of representable values at |x|'s binade (subnormal spacing below).
double ulp_f16(double x);
double ulp_bf16(double x);

// Element values of any dtype, decoded by the functions above.
std::vector<double> decode_tensor(const Tensor& t);

// `tensors` pairs of (name, shape), filled with uniform values in [-1, 1).
AdapterCheckpoint random_checkpoint(std::mt19937_64& rng, DType dtype,
                                    const std::vector<std::pair<std::string, std::vector<std::int64_t>>>& tensors,
                                    std::int64_t rank = 8, double alpha = 16.0);

// Random call whose parameters exercise nesting, unicode, escapes and numbers.
ToolCall random_tool_call(std::mt19937_64& rng);

// Prompt fixture case used for the gold prompt files.
struct PromptCase {
  Conversation conversation;
  FunctionList functions;
  std::string additional_info;
  std::string query;
  std::vector<ToolResult> results;
};
PromptCase load_prompt_case();

}  // namespace npc::test
