// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "json.hpp"

namespace npc {

// Insertion-ordered JSON is used everywhere so that serialized fixtures are
// byte-stable.
using Json = nlohmann::ordered_json;

// Serializes `value` the way Python's json.dumps(ensure_ascii=False) does:
// ", " between items, ": " between key and value, keys in insertion order,
// UTF-8 emitted verbatim.
std::string canonical_dump(const Json& value);

// Parses `text`; returns a discarded value instead of throwing on bad input.
Json parse_json_or_discard(std::string_view text);

}  // namespace npc
