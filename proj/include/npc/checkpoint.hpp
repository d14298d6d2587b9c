// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace npc {

enum class DType { f32, f16, bf16 };

std::size_t dtype_size(DType dtype);
// Container spelling: "F32", "F16", "BF16".
std::string_view to_string(DType dtype);

struct Tensor {
  DType dtype = DType::f32;
  std::vector<std::int64_t> shape;
  std::vector<std::byte> data;  // little-endian, contiguous

  std::size_t numel() const;
  // Throws std::invalid_argument on a non-positive dim or a size mismatch.
  void check() const;

  std::vector<float> to_f32() const;
  static Tensor from_f32(std::span<const float> values, std::vector<std::int64_t> shape,
                         DType dtype = DType::f32);

  bool operator==(const Tensor&) const = default;
};

struct LoraMetadata {
  std::int64_t rank = 0;
  double alpha = 0.0;
  std::vector<std::string> target_modules;
  std::map<std::string, std::string> extras;

  bool operator==(const LoraMetadata&) const = default;
};

struct AdapterCheckpoint {
  // Order is preserved through read and write.
  std::vector<std::pair<std::string, Tensor>> tensors;
  LoraMetadata metadata;

  const Tensor* find(std::string_view name) const;
  bool operator==(const AdapterCheckpoint&) const = default;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// safetensors layout: u64 little-endian header length N, N bytes of JSON
// header ({name: {dtype, shape, data_offsets}} plus a "__metadata__" string
// map), then the tensor bytes. Throws CheckpointError.
AdapterCheckpoint parse_checkpoint(std::span<const std::byte> bytes);
AdapterCheckpoint read_checkpoint(const std::filesystem::path& path);

std::vector<std::byte> serialize_checkpoint(const AdapterCheckpoint& checkpoint);
void write_checkpoint(const AdapterCheckpoint& checkpoint, const std::filesystem::path& path);

}  // namespace npc
