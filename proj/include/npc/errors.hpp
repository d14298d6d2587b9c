// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace npc {

// Malformed input file: carries a locator ("line 12" or "/3/background/state").
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string locator, const std::string& message)
      : std::runtime_error(locator.empty() ? message : locator + ": " + message),
        locator_(std::move(locator)) {}
  const std::string& locator() const { return locator_; }

 private:
  std::string locator_;
};

// Well-formed input that breaks a type invariant.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke an operation's precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace npc
