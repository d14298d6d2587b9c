// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "npc/canonical_json.hpp"
#include "npc/tool_types.hpp"

namespace npc {

// Canonical form used for call matching: object keys sorted recursively,
// every number as a double (1 == 1.0), strings trimmed, case kept.
Json canonicalize_call(const ToolCall& call);

// F1 between predicted and gold calls as multisets of canonical calls. Both
// empty scores 1.0 (a correct abstention); exactly one empty scores 0.0.
double function_score(std::span<const ToolCall> predicted, std::span<const ToolCall> gold);

inline constexpr int kChrfOrder = 6;
inline constexpr double kChrfBeta = 2.0;

// chrF: character n-grams (n = 1..6, whitespace removed, UTF-8 code points),
// precision and recall averaged over the orders both sides can form, then
// combined as an F-beta score with beta = 2. Range [0, 1].
double text_similarity(std::string_view prediction, std::string_view reference);

using TextPair = std::pair<std::string, std::string>;
// text_similarity over many pairs; the parallel variant splits pairs across
// OpenMP threads and returns the same values as the serial one.
std::vector<double> text_similarity_batch(std::span<const TextPair> pairs);
std::vector<double> text_similarity_batch_reference(std::span<const TextPair> pairs);

}  // namespace npc
