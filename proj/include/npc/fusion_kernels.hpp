// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

#include "npc/checkpoint.hpp"

namespace npc::kernels {

// out[e] = sum_i weights[i] * inputs[i][e] for every element e, where each
// buffer holds `count` values of `dtype`. Accumulation is in double: inputs
// sharing a weight are summed first (input order), each sum is scaled and
// added in first-appearance order, then narrowed to `dtype` (nearest-even,
// through f32). Both variants produce bit-identical output.
//
// weighted_sum_reference is the plain serial loop kept as the baseline;
// weighted_sum_parallel blocks the element range and splits blocks across
// OpenMP threads.
void weighted_sum_reference(DType dtype, std::span<const std::span<const std::byte>> inputs,
                            std::span<const double> weights, std::span<std::byte> out);
void weighted_sum_parallel(DType dtype, std::span<const std::span<const std::byte>> inputs,
                           std::span<const double> weights, std::span<std::byte> out);

}  // namespace npc::kernels
