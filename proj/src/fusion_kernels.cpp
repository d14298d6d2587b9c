// SPDX-License-Identifier: Apache-2.0

#include "npc/fusion_kernels.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "npc/half.hpp"

namespace npc::kernels {

namespace {

template <DType D>
inline double load(const std::byte* base, std::size_t i) {
  if constexpr (D == DType::f32) {
    float v;
    std::memcpy(&v, base + 4 * i, 4);
    return v;
  } else {
    std::uint16_t bits;
    std::memcpy(&bits, base + 2 * i, 2);
    if constexpr (D == DType::f16) return half_to_float(bits);
    else return bf16_to_float(bits);
  }
}

template <DType D>
inline void store(std::byte* base, std::size_t i, double v) {
  // 16-bit outputs narrow through f32; the double rounding stays within one ULP.
  const float f = static_cast<float>(v);
  if constexpr (D == DType::f32) {
    std::memcpy(base + 4 * i, &f, 4);
  } else {
    const std::uint16_t bits = D == DType::f16 ? float_to_half(f) : float_to_bf16(f);
    std::memcpy(base + 2 * i, &bits, 2);
  }
}

void check_args(DType dtype, std::span<const std::span<const std::byte>> inputs,
                std::span<const double> weights, std::span<std::byte> out) {
  if (inputs.size() != weights.size()) throw std::invalid_argument("one weight per input required");
  for (const auto& in : inputs)
    if (in.size() != out.size()) throw std::invalid_argument("input and output sizes differ");
  if (out.size() % dtype_size(dtype) != 0) throw std::invalid_argument("buffer not a whole number of elements");
}

// Inputs sharing a weight, summed before the multiply. Uniform averaging
// becomes w * (x_0 + ... + x_k-1): the inner sum of 16-bit or f32 values is
// exact in double for typical spreads, so inputs that cancel give exactly 0
// instead of a rounding residue of fl(w) that bf16 could represent.
struct WeightGroup {
  double weight;
  std::vector<std::size_t> members;  // input order
};

std::vector<WeightGroup> group_by_weight(std::span<const double> weights) {
  std::vector<WeightGroup> groups;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const WeightGroup& g) { return g.weight == weights[i]; });
    if (it == groups.end()) groups.push_back({weights[i], {i}});
    else it->members.push_back(i);
  }
  return groups;
}

template <DType D>
void reference_impl(std::span<const std::span<const std::byte>> inputs, std::span<const double> weights,
                    std::span<std::byte> out) {
  const std::size_t count = out.size() / dtype_size(D);
  const std::vector<WeightGroup> groups = group_by_weight(weights);
  for (std::size_t e = 0; e < count; ++e) {
    double acc = 0.0;
    for (const auto& g : groups) {
      double sum = 0.0;
      for (std::size_t i : g.members) sum += load<D>(inputs[i].data(), e);
      acc += g.weight * sum;
    }
    store<D>(out.data(), e, acc);
  }
}

constexpr std::size_t kBlock = 2048;

template <DType D>
void parallel_impl(std::span<const std::span<const std::byte>> inputs, std::span<const double> weights,
                   std::span<std::byte> out) {
  const std::size_t count = out.size() / dtype_size(D);
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  const std::vector<WeightGroup> groups = group_by_weight(weights);

#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(count, lo + kBlock);
    std::array<double, kBlock> acc{};
    std::array<double, kBlock> sum;
    // Input-major within a block; per element the operation order matches
    // reference_impl exactly.
    for (const auto& g : groups) {
      sum.fill(0.0);
      for (std::size_t i : g.members) {
        const std::byte* src = inputs[i].data();
        for (std::size_t e = lo; e < hi; ++e) sum[e - lo] += load<D>(src, e);
      }
      for (std::size_t e = lo; e < hi; ++e) acc[e - lo] += g.weight * sum[e - lo];
    }
    for (std::size_t e = lo; e < hi; ++e) store<D>(out.data(), e, acc[e - lo]);
  }
}

}  // namespace

void weighted_sum_reference(DType dtype, std::span<const std::span<const std::byte>> inputs,
                            std::span<const double> weights, std::span<std::byte> out) {
  check_args(dtype, inputs, weights, out);
  switch (dtype) {
    case DType::f32: return reference_impl<DType::f32>(inputs, weights, out);
    case DType::f16: return reference_impl<DType::f16>(inputs, weights, out);
    case DType::bf16: return reference_impl<DType::bf16>(inputs, weights, out);
  }
}

void weighted_sum_parallel(DType dtype, std::span<const std::span<const std::byte>> inputs,
                           std::span<const double> weights, std::span<std::byte> out) {
  check_args(dtype, inputs, weights, out);
  switch (dtype) {
    case DType::f32: return parallel_impl<DType::f32>(inputs, weights, out);
    case DType::f16: return parallel_impl<DType::f16>(inputs, weights, out);
    case DType::bf16: return parallel_impl<DType::bf16>(inputs, weights, out);
  }
}

}  // namespace npc::kernels
