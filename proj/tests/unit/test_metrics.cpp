// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "doctest.h"
#include "npc/metrics.hpp"
#include "test_support.hpp"

using namespace npc;

TEST_CASE("function_score hand cases") {
  const ToolCall a{"sell", Json{{"item_name", "Waterskin"}, {"quantity", 2}}};
  const ToolCall b{"get_item_info", Json{{"item_name", "Waterskin"}}};
  const ToolCall c{"open_gate", Json{{"gate", "north"}}};
  const std::vector<ToolCall> none;
  CHECK(function_score(none, none) == 1.0);
  CHECK(function_score(std::vector{a}, none) == 0.0);
  CHECK(function_score(none, std::vector{a}) == 0.0);
  CHECK(function_score(std::vector{a}, std::vector{a}) == 1.0);
  CHECK(function_score(std::vector{a, b}, std::vector{b, a}) == 1.0);
  CHECK(function_score(std::vector{c}, std::vector{a}) == 0.0);
  // one of two predicted matches the single gold call: P = 1/2, R = 1, F1 = 2/3
  CHECK(function_score(std::vector{a, c}, std::vector{a}) == 2.0 / 3.0);
  CHECK(function_score(std::vector{a, a}, std::vector{a}) == 2.0 / 3.0);
}

TEST_CASE("canonical comparison ignores key order, number spelling, padding") {
  const ToolCall x{"sell", Json::parse(R"({"quantity": 2, "item_name": " Waterskin "})")};
  const ToolCall y{"sell", Json::parse(R"({"item_name": "Waterskin", "quantity": 2.0})")};
  CHECK(canonicalize_call(x) == canonicalize_call(y));
  CHECK(function_score(std::vector{x}, std::vector{y}) == 1.0);
  const ToolCall z{"sell", Json::parse(R"({"item_name": "waterskin", "quantity": 2})")};
  CHECK(function_score(std::vector{x}, std::vector{z}) == 0.0);
}

TEST_CASE("chrF boundary values") {
  CHECK(text_similarity("the iron sword", "the iron sword") == 1.0);
  CHECK(text_similarity("the iron sword", "theironsword") == 1.0);
  CHECK(text_similarity("abc", "xyz") == 0.0);
  CHECK(text_similarity("", "anything") == 0.0);
  CHECK(text_similarity("", "") == 1.0);
}

TEST_CASE("chrF agrees with sacrebleu reference values") {
  const Json vectors = Json::parse(test::read_text(test::source_path("tests/fixtures/chrf_sacrebleu.json")));
  REQUIRE(vectors.size() > 100);
  for (const auto& v : vectors) {
    const std::string hyp = v["hyp"], ref = v["ref"];
    INFO(hyp << " | " << ref);
    REQUIRE(std::fabs(text_similarity(hyp, ref) - v["chrf"].get<double>()) <= 1e-6);
    REQUIRE(std::fabs(test::chrf_oracle(hyp, ref) - v["chrf"].get<double>()) <= 1e-6);
  }
}

TEST_CASE("batch variants match the scalar function") {
  std::mt19937_64 rng(4);
  const std::string alphabet = "abcde fgh";
  std::vector<TextPair> pairs;
  for (int i = 0; i < 500; ++i) {
    std::string a, b;
    for (int k = rng() % 30; k > 0; --k) a += alphabet[rng() % alphabet.size()];
    for (int k = rng() % 30; k > 0; --k) b += alphabet[rng() % alphabet.size()];
    pairs.emplace_back(a, b);
  }
  const auto par = text_similarity_batch(pairs);
  const auto ser = text_similarity_batch_reference(pairs);
  REQUIRE(par.size() == pairs.size());
  CHECK(par == ser);
  for (size_t i = 0; i < pairs.size(); ++i) CHECK(ser[i] == text_similarity(pairs[i].first, pairs[i].second));
}
