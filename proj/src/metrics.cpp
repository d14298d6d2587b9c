// SPDX-License-Identifier: Apache-2.0

#include "npc/metrics.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace npc {

namespace {

Json canonical_value(const Json& v) {
  if (v.is_object()) {
    std::vector<std::string> keys;
    for (const auto& [k, _] : v.items()) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    Json out = Json::object();
    for (const auto& k : keys) out[k] = canonical_value(v.at(k));
    return out;
  }
  if (v.is_array()) {
    Json out = Json::array();
    for (const auto& item : v) out.push_back(canonical_value(item));
    return out;
  }
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }
  return v;
}

std::map<std::string, int> call_counts(std::span<const ToolCall> calls) {
  std::map<std::string, int> counts;
  for (const auto& c : calls) ++counts[canonicalize_call(c).dump()];
  return counts;
}

// Same set as Python's str.isspace(), so sacrebleu agrees on what is dropped.
bool is_unicode_space(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0D) || (cp >= 0x1C && cp <= 0x20) || cp == 0x85 || cp == 0xA0 ||
         cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 ||
         cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

// Decodes UTF-8, dropping whitespace. Invalid bytes map to U+FFFD.
std::u32string code_points_without_space(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    char32_t cp = 0xFFFD;
    size_t len = 1;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6 && i + 1 < s.size()) {
      cp = ((c & 0x1F) << 6) | (s[i + 1] & 0x3F);
      len = 2;
    } else if ((c >> 4) == 0xE && i + 2 < s.size()) {
      cp = ((c & 0x0F) << 12) | ((s[i + 1] & 0x3F) << 6) | (s[i + 2] & 0x3F);
      len = 3;
    } else if ((c >> 3) == 0x1E && i + 3 < s.size()) {
      cp = ((c & 0x07) << 18) | ((s[i + 1] & 0x3F) << 12) | ((s[i + 2] & 0x3F) << 6) | (s[i + 3] & 0x3F);
      len = 4;
    }
    for (size_t k = 1; k < len; ++k)
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) {
        cp = 0xFFFD;
        len = 1;
        break;
      }
    i += len;
    if (!is_unicode_space(cp)) out.push_back(cp);
  }
  return out;
}

struct U32Hash {
  size_t operator()(std::u32string_view v) const noexcept {
    return std::hash<std::u32string_view>{}(v);
  }
};

using NgramCounts = std::unordered_map<std::u32string_view, int, U32Hash>;

NgramCounts ngrams(const std::u32string& s, size_t n) {
  NgramCounts counts;
  if (s.size() < n) return counts;
  for (size_t i = 0; i + n <= s.size(); ++i) ++counts[std::u32string_view(s).substr(i, n)];
  return counts;
}

}  // namespace

Json canonicalize_call(const ToolCall& call) {
  Json out = Json::object();
  out["name"] = call.name;
  out["parameters"] = canonical_value(call.parameters);
  return out;
}

double function_score(std::span<const ToolCall> predicted, std::span<const ToolCall> gold) {
  if (predicted.empty() && gold.empty()) return 1.0;
  if (predicted.empty() || gold.empty()) return 0.0;
  const auto p = call_counts(predicted);
  const auto g = call_counts(gold);
  int matched = 0;
  for (const auto& [key, count] : p)
    if (auto it = g.find(key); it != g.end()) matched += std::min(count, it->second);
  if (matched == 0) return 0.0;
  const double precision = static_cast<double>(matched) / static_cast<double>(predicted.size());
  const double recall = static_cast<double>(matched) / static_cast<double>(gold.size());
  return 2.0 * precision * recall / (precision + recall);
}

double text_similarity(std::string_view prediction, std::string_view reference) {
  const std::u32string hyp = code_points_without_space(prediction);
  const std::u32string ref = code_points_without_space(reference);
  if (hyp == ref) return 1.0;

  double precision_sum = 0.0;
  double recall_sum = 0.0;
  int orders = 0;
  for (size_t n = 1; n <= static_cast<size_t>(kChrfOrder); ++n) {
    if (hyp.size() < n || ref.size() < n) break;
    const NgramCounts h = ngrams(hyp, n);
    const NgramCounts r = ngrams(ref, n);
    long matched = 0;
    for (const auto& [gram, count] : h)
      if (auto it = r.find(gram); it != r.end()) matched += std::min(count, it->second);
    precision_sum += static_cast<double>(matched) / static_cast<double>(hyp.size() - n + 1);
    recall_sum += static_cast<double>(matched) / static_cast<double>(ref.size() - n + 1);
    ++orders;
  }
  if (orders == 0) return 0.0;
  const double p = precision_sum / orders;
  const double r = recall_sum / orders;
  const double beta2 = kChrfBeta * kChrfBeta;
  const double denom = beta2 * p + r;
  return denom > 0.0 ? (1.0 + beta2) * p * r / denom : 0.0;
}

std::vector<double> text_similarity_batch_reference(std::span<const TextPair> pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& [pred, ref] : pairs) out.push_back(text_similarity(pred, ref));
  return out;
}

std::vector<double> text_similarity_batch(std::span<const TextPair> pairs) {
  std::vector<double> out(pairs.size());
  const long n = static_cast<long>(pairs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < n; ++i) out[i] = text_similarity(pairs[i].first, pairs[i].second);
  return out;
}

}  // namespace npc
