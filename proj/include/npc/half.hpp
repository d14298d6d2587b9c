// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace npc {

// IEEE binary16 and bfloat16 <-> binary32. Narrowing rounds to nearest,
// ties to even; NaN stays NaN.
float half_to_float(std::uint16_t bits);
std::uint16_t float_to_half(float value);
float bf16_to_float(std::uint16_t bits);
std::uint16_t float_to_bf16(float value);

}  // namespace npc
