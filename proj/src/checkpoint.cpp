// SPDX-License-Identifier: Apache-2.0

#include "npc/checkpoint.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "npc/half.hpp"

namespace npc {

namespace {

using OJson = nlohmann::ordered_json;

constexpr const char* kMetadataKey = "__metadata__";

DType dtype_from_string(const std::string& s, const std::string& tensor) {
  if (s == "F32") return DType::f32;
  if (s == "F16") return DType::f16;
  if (s == "BF16") return DType::bf16;
  throw CheckpointError("unknown dtype '" + s + "' for tensor '" + tensor + "'");
}

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename T>
T parse_number(const std::string& text, const char* what) {
  T value{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw CheckpointError(std::string("malformed metadata ") + what + " '" + text + "'");
  return value;
}

LoraMetadata parse_metadata(const OJson& header, const std::vector<std::pair<std::string, Tensor>>& tensors) {
  LoraMetadata meta;
  bool have_rank = false;
  bool have_alpha = false;
  if (auto it = header.find(kMetadataKey); it != header.end()) {
    if (!it->is_object()) throw CheckpointError("__metadata__ must be an object");
    for (const auto& [key, value] : it->items()) {
      if (!value.is_string()) throw CheckpointError("__metadata__ value for '" + key + "' is not a string");
      const std::string text = value.get<std::string>();
      if (key == "rank") {
        meta.rank = parse_number<std::int64_t>(text, "rank");
        have_rank = true;
      } else if (key == "alpha") {
        meta.alpha = parse_number<double>(text, "alpha");
        have_alpha = true;
      } else if (key == "target_modules") {
        const OJson list = OJson::parse(text, nullptr, false);
        if (!list.is_array()) throw CheckpointError("target_modules must be a JSON array of strings");
        for (const auto& m : list) {
          if (!m.is_string()) throw CheckpointError("target_modules must be a JSON array of strings");
          meta.target_modules.push_back(m.get<std::string>());
        }
      } else {
        meta.extras.emplace(key, text);
      }
    }
  }
  if (!have_rank) {
    // Plain PEFT exports keep rank in a side file; lora_A is [rank, in].
    for (const auto& [name, t] : tensors)
      if (name.find("lora_A") != std::string::npos && !t.shape.empty()) {
        meta.rank = t.shape.front();
        have_rank = true;
        break;
      }
  }
  if (!have_rank || meta.rank <= 0) throw CheckpointError("missing or non-positive LoRA rank");
  if (!have_alpha) meta.alpha = static_cast<double>(meta.rank);
  return meta;
}

}  // namespace

std::size_t dtype_size(DType dtype) { return dtype == DType::f32 ? 4 : 2; }

std::string_view to_string(DType dtype) {
  switch (dtype) {
    case DType::f32: return "F32";
    case DType::f16: return "F16";
    case DType::bf16: return "BF16";
  }
  return "F32";
}

std::size_t Tensor::numel() const {
  std::size_t n = 1;
  for (auto d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

void Tensor::check() const {
  for (auto d : shape)
    if (d <= 0) throw std::invalid_argument("tensor dims must be positive");
  if (data.size() != numel() * dtype_size(dtype))
    throw std::invalid_argument("tensor buffer length does not match shape and dtype");
}

std::vector<float> Tensor::to_f32() const {
  const std::size_t n = numel();
  std::vector<float> out(n);
  if (dtype == DType::f32) {
    std::memcpy(out.data(), data.data(), n * 4);
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::uint16_t bits;
    std::memcpy(&bits, data.data() + 2 * i, 2);
    out[i] = dtype == DType::f16 ? half_to_float(bits) : bf16_to_float(bits);
  }
  return out;
}

Tensor Tensor::from_f32(std::span<const float> values, std::vector<std::int64_t> shape, DType dtype) {
  Tensor t;
  t.dtype = dtype;
  t.shape = std::move(shape);
  t.data.resize(values.size() * dtype_size(dtype));
  if (dtype == DType::f32) {
    std::memcpy(t.data.data(), values.data(), values.size() * 4);
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::uint16_t bits = dtype == DType::f16 ? float_to_half(values[i]) : float_to_bf16(values[i]);
      std::memcpy(t.data.data() + 2 * i, &bits, 2);
    }
  }
  t.check();
  return t;
}

const Tensor* AdapterCheckpoint::find(std::string_view name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return &t;
  return nullptr;
}

AdapterCheckpoint parse_checkpoint(std::span<const std::byte> bytes) {
  if (bytes.size() < 8) throw CheckpointError("bad header length: file shorter than 8 bytes");
  std::uint64_t header_len = 0;
  for (int i = 7; i >= 0; --i) header_len = (header_len << 8) | static_cast<std::uint8_t>(bytes[i]);
  if (header_len > bytes.size() - 8) throw CheckpointError("bad header length: exceeds file size");

  const char* header_begin = reinterpret_cast<const char*>(bytes.data() + 8);
  const OJson header = OJson::parse(header_begin, header_begin + header_len, nullptr, false);
  if (header.is_discarded() || !header.is_object()) throw CheckpointError("bad header: not a JSON object");

  const std::span<const std::byte> payload = bytes.subspan(8 + header_len);
  AdapterCheckpoint ckpt;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;

  for (const auto& [name, entry] : header.items()) {
    if (name == kMetadataKey) continue;
    if (!entry.is_object() || !entry.contains("dtype") || !entry.contains("shape") ||
        !entry.contains("data_offsets"))
      throw CheckpointError("bad header entry for tensor '" + name + "'");
    const auto& offsets = entry["data_offsets"];
    if (!entry["dtype"].is_string() || !entry["shape"].is_array() || !offsets.is_array() ||
        offsets.size() != 2 || !offsets[0].is_number_unsigned() || !offsets[1].is_number_unsigned())
      throw CheckpointError("bad header entry for tensor '" + name + "'");

    Tensor t;
    t.dtype = dtype_from_string(entry["dtype"].get<std::string>(), name);
    for (const auto& d : entry["shape"]) {
      if (!d.is_number_integer() || d.get<std::int64_t>() <= 0)
        throw CheckpointError("bad shape for tensor '" + name + "'");
      t.shape.push_back(d.get<std::int64_t>());
    }
    const auto begin = offsets[0].get<std::uint64_t>();
    const auto end = offsets[1].get<std::uint64_t>();
    if (end < begin) throw CheckpointError("bad data_offsets for tensor '" + name + "'");
    if (end > payload.size()) throw CheckpointError("truncated payload: tensor '" + name + "'");
    if (end - begin != t.numel() * dtype_size(t.dtype))
      throw CheckpointError("data_offsets of tensor '" + name + "' do not match its shape");
    ranges.emplace_back(begin, end);
    const auto* src = payload.data() + begin;
    t.data.assign(src, src + (end - begin));
    ckpt.tensors.emplace_back(name, std::move(t));
  }

  std::sort(ranges.begin(), ranges.end());
  for (std::size_t i = 1; i < ranges.size(); ++i)
    if (ranges[i].first < ranges[i - 1].second) throw CheckpointError("overlapping offsets");

  ckpt.metadata = parse_metadata(header, ckpt.tensors);
  return ckpt;
}

AdapterCheckpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_checkpoint(std::as_bytes(std::span(raw)));
}

std::vector<std::byte> serialize_checkpoint(const AdapterCheckpoint& ckpt) {
  if (ckpt.metadata.rank <= 0) throw std::invalid_argument("checkpoint rank must be > 0");

  OJson header = OJson::object();
  OJson meta = OJson::object();
  meta["rank"] = std::to_string(ckpt.metadata.rank);
  meta["alpha"] = format_real(ckpt.metadata.alpha);
  meta["target_modules"] = OJson(ckpt.metadata.target_modules).dump();
  for (const auto& [k, v] : ckpt.metadata.extras) meta[k] = v;
  header[kMetadataKey] = std::move(meta);

  std::uint64_t offset = 0;
  for (const auto& [name, t] : ckpt.tensors) {
    t.check();
    if (header.contains(name)) throw std::invalid_argument("duplicate tensor name '" + name + "'");
    header[name] = OJson{{"dtype", std::string(to_string(t.dtype))},
                         {"shape", t.shape},
                         {"data_offsets", {offset, offset + t.data.size()}}};
    offset += t.data.size();
  }

  std::string text = header.dump();
  text.append((8 - text.size() % 8) % 8, ' ');

  std::vector<std::byte> out(8 + text.size() + offset);
  std::uint64_t n = text.size();
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::byte>((n >> (8 * i)) & 0xffu);
  std::memcpy(out.data() + 8, text.data(), text.size());
  std::byte* dst = out.data() + 8 + text.size();
  for (const auto& [_, t] : ckpt.tensors) {
    std::memcpy(dst, t.data.data(), t.data.size());
    dst += t.data.size();
  }
  return out;
}

void write_checkpoint(const AdapterCheckpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("write failed for " + path.string());
}

}  // namespace npc
