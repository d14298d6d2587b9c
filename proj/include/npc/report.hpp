// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace npc {

struct Finding {
  std::string kind;
  std::string detail;
  // Non-blocking findings are warnings: they are reported but do not make
  // the subject invalid.
  bool blocking = true;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const {
    return std::none_of(findings.begin(), findings.end(),
                        [](const Finding& f) { return f.blocking; });
  }
  bool has(std::string_view kind) const {
    return std::any_of(findings.begin(), findings.end(),
                       [&](const Finding& f) { return f.kind == kind; });
  }
  void add(std::string kind, std::string detail, bool blocking = true) {
    findings.push_back({std::move(kind), std::move(detail), blocking});
  }
};

}  // namespace npc
