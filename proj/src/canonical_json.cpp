// SPDX-License-Identifier: Apache-2.0

#include "npc/canonical_json.hpp"

namespace npc {

namespace {

void dump_into(const Json& value, std::string& out) {
  switch (value.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : value.items()) {
        if (!first) out += ", ";
        first = false;
        out += Json(key).dump();
        out += ": ";
        dump_into(item, out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : value) {
        if (!first) out += ", ";
        first = false;
        dump_into(item, out);
      }
      out += ']';
      break;
    }
    default:
      out += value.dump(-1, ' ', false, Json::error_handler_t::replace);
  }
}

}  // namespace

std::string canonical_dump(const Json& value) {
  std::string out;
  dump_into(value, out);
  return out;
}

Json parse_json_or_discard(std::string_view text) {
  return Json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
}

}  // namespace npc
