// SPDX-License-Identifier: Apache-2.0

#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "npc/errors.hpp"

#ifndef NPC_SOURCE_DIR
#error "NPC_SOURCE_DIR must be defined"
#endif
#ifndef NPC_BINARY_DIR
#error "NPC_BINARY_DIR must be defined"
#endif

namespace npc::test {

std::filesystem::path source_path(const std::string& relative) {
  return std::filesystem::path(NPC_SOURCE_DIR) / relative;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::path(NPC_BINARY_DIR) / "scratch" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

namespace {

std::vector<std::uint32_t> decode_utf8_no_space(const std::string& s) {
  static const std::vector<std::uint32_t> kSpaces = {
      0x09, 0x0A, 0x0B, 0x0C, 0x0D, 0x1C, 0x1D, 0x1E, 0x1F, 0x20, 0x85, 0xA0, 0x1680,
      0x2000, 0x2001, 0x2002, 0x2003, 0x2004, 0x2005, 0x2006, 0x2007, 0x2008, 0x2009,
      0x200A, 0x2028, 0x2029, 0x202F, 0x205F, 0x3000};
  std::vector<std::uint32_t> out;
  size_t i = 0;
  while (i < s.size()) {
    const unsigned b0 = static_cast<unsigned char>(s[i]);
    int extra = b0 >= 0xF0 ? 3 : b0 >= 0xE0 ? 2 : b0 >= 0xC0 ? 1 : 0;
    std::uint32_t cp = extra == 0 ? b0 : b0 & (0x3F >> extra);
    bool valid = b0 < 0x80 || (b0 >= 0xC0 && b0 < 0xF8);
    if (i + extra >= s.size() + (extra ? 0 : 1)) valid = false;
    for (int k = 1; valid && k <= extra; ++k) {
      const unsigned b = static_cast<unsigned char>(s[i + k]);
      if (b < 0x80 || b > 0xBF) valid = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!valid) {
      cp = 0xFFFD;
      extra = 0;
    }
    i += 1 + extra;
    if (std::find(kSpaces.begin(), kSpaces.end(), cp) == kSpaces.end()) out.push_back(cp);
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> sorted_grams(const std::vector<std::uint32_t>& s, size_t n) {
  std::vector<std::vector<std::uint32_t>> grams;
  for (size_t i = 0; i + n <= s.size(); ++i) grams.emplace_back(s.begin() + i, s.begin() + i + n);
  std::sort(grams.begin(), grams.end());
  return grams;
}

}  // namespace

double chrf_oracle(const std::string& hyp, const std::string& ref) {
  const auto h = decode_utf8_no_space(hyp);
  const auto r = decode_utf8_no_space(ref);
  if (h == r) return 1.0;
  double psum = 0, rsum = 0;
  int orders = 0;
  for (size_t n = 1; n <= 6; ++n) {
    const auto hg = sorted_grams(h, n);
    const auto rg = sorted_grams(r, n);
    if (hg.empty() || rg.empty()) continue;
    size_t a = 0, b = 0, match = 0;
    while (a < hg.size() && b < rg.size()) {
      if (hg[a] == rg[b]) {
        ++match, ++a, ++b;
      } else if (hg[a] < rg[b]) {
        ++a;
      } else {
        ++b;
      }
    }
    psum += double(match) / double(hg.size());
    rsum += double(match) / double(rg.size());
    ++orders;
  }
  if (orders == 0) return 0.0;
  const double p = psum / orders, rc = rsum / orders;
  if (p + rc == 0.0) return 0.0;
  return 5.0 * p * rc / (4.0 * p + rc);
}

double decode_f16(std::uint16_t bits) {
  const int sign = bits >> 15 ? -1 : 1;
  const int exp = (bits >> 10) & 0x1F;
  const int mant = bits & 0x3FF;
  if (exp == 0) return sign * std::ldexp(mant, -24);
  if (exp == 31) return mant ? NAN : sign * INFINITY;
  return sign * std::ldexp(1024 + mant, exp - 25);
}

double decode_bf16(std::uint16_t bits) {
  const int sign = bits >> 15 ? -1 : 1;
  const int exp = (bits >> 7) & 0xFF;
  const int mant = bits & 0x7F;
  if (exp == 0) return sign * std::ldexp(mant, -133);
  if (exp == 255) return mant ? NAN : sign * INFINITY;
  return sign * std::ldexp(128 + mant, exp - 134);
}

namespace {
double ulp_for(double x, int mant_bits, int min_exp) {
  if (x == 0.0) return std::ldexp(1.0, min_exp - mant_bits);
  const int e = std::max(std::ilogb(x), min_exp);
  return std::ldexp(1.0, e - mant_bits);
}
}  // namespace

double ulp_f16(double x) { return ulp_for(x, 10, -14); }
double ulp_bf16(double x) { return ulp_for(x, 7, -126); }

std::vector<double> decode_tensor(const Tensor& t) {
  std::vector<double> out(t.numel());
  for (size_t i = 0; i < out.size(); ++i) {
    if (t.dtype == DType::f32) {
      float f;
      std::memcpy(&f, t.data.data() + 4 * i, 4);
      out[i] = f;
    } else {
      const auto lo = static_cast<std::uint16_t>(t.data[2 * i]);
      const auto hi = static_cast<std::uint16_t>(t.data[2 * i + 1]);
      const std::uint16_t bits = static_cast<std::uint16_t>(lo | (hi << 8));
      out[i] = t.dtype == DType::f16 ? decode_f16(bits) : decode_bf16(bits);
    }
  }
  return out;
}

AdapterCheckpoint random_checkpoint(
    std::mt19937_64& rng, DType dtype,
    const std::vector<std::pair<std::string, std::vector<std::int64_t>>>& tensors,
    std::int64_t rank, double alpha) {
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  AdapterCheckpoint ck;
  ck.metadata.rank = rank;
  ck.metadata.alpha = alpha;
  ck.metadata.target_modules = {"q_proj", "v_proj"};
  for (const auto& [name, shape] : tensors) {
    size_t n = 1;
    for (auto d : shape) n *= static_cast<size_t>(d);
    std::vector<float> values(n);
    for (auto& v : values) v = dist(rng);
    ck.tensors.emplace_back(name, Tensor::from_f32(values, shape, dtype));
  }
  return ck;
}

namespace {

std::string random_string(std::mt19937_64& rng) {
  static const std::vector<std::string> kPieces = {
      "a", "Z", "sword", " ", "\"", "\\", "/", "\n", "\t", "{", "}", "[", "]", ",", ":",
      "<tool_call>", "</tool_call>", "<tools>", "é", "剑", "🗡", "\x01", "0", "-1.5", "null"};
  std::uniform_int_distribution<int> len(0, 8);
  std::uniform_int_distribution<size_t> pick(0, kPieces.size() - 1);
  std::string s;
  for (int i = len(rng); i > 0; --i) s += kPieces[pick(rng)];
  return s;
}

Json random_value(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> kind(0, depth > 2 ? 4 : 6);
  switch (kind(rng)) {
    case 0: return random_string(rng);
    case 1: return std::uniform_int_distribution<std::int64_t>(-1'000'000'000, 1'000'000'000)(rng);
    case 2: return std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
    case 3: return std::bernoulli_distribution(0.5)(rng);
    case 4: return nullptr;
    case 5: {
      Json arr = Json::array();
      for (int i = std::uniform_int_distribution<int>(0, 3)(rng); i > 0; --i)
        arr.push_back(random_value(rng, depth + 1));
      return arr;
    }
    default: {
      Json obj = Json::object();
      for (int i = std::uniform_int_distribution<int>(0, 3)(rng); i > 0; --i)
        obj[random_string(rng) + std::to_string(i)] = random_value(rng, depth + 1);
      return obj;
    }
  }
}

}  // namespace

ToolCall random_tool_call(std::mt19937_64& rng) {
  ToolCall call;
  call.name = "fn_" + std::to_string(rng() % 1000);
  if (std::bernoulli_distribution(0.3)(rng)) call.name += random_string(rng);
  for (int i = std::uniform_int_distribution<int>(0, 5)(rng); i > 0; --i)
    call.parameters["p" + std::to_string(i) + random_string(rng)] = random_value(rng, 0);
  return call;
}

PromptCase load_prompt_case() {
  const Json j = Json::parse(read_text(source_path("tests/fixtures/prompt_case.json")));
  PromptCase c;
  c.conversation = conversation_from_json(j.at("conversation"), "/conversation");
  const Registry reg = parse_registry(Json::array({j.at("function_list")}).dump());
  c.functions = reg.lookup(j.at("function_list").at("id").get<std::string>());
  c.additional_info = j.at("additional_info").get<std::string>();
  c.query = j.at("query").get<std::string>();
  for (size_t i = 0; i < j.at("results").size(); ++i)
    c.results.push_back(tool_result_from_json(j.at("results")[i], "/results/" + std::to_string(i)));
  return c;
}

}  // namespace npc::test
