// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

// Prompt template assets, compiled in from assets/templates/*.txt.
namespace npc::templates {

extern const std::string_view kVersion;
extern const std::string_view kFunctionCallSystem;
extern const std::string_view kFunctionCallUser;
extern const std::string_view kWithResultsSystem;
extern const std::string_view kWithoutResultsSystem;
extern const std::string_view kDialogueUser;

}  // namespace npc::templates
