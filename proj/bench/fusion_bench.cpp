// SPDX-License-Identifier: Apache-2.0
//
// Serial reference vs OpenMP kernels: checkpoint averaging and batch chrF.
// OMP_NUM_THREADS controls the parallel variants.

#include <benchmark/benchmark.h>

#include <cstring>
#include <random>

#include "npc/fusion_kernels.hpp"
#include "npc/half.hpp"
#include "npc/metrics.hpp"

namespace {

using npc::DType;

struct Inputs {
  std::vector<std::vector<std::byte>> buffers;
  std::vector<std::span<const std::byte>> views;
  std::vector<double> weights;
  std::vector<std::byte> out;
};

Inputs make_inputs(DType dtype, std::size_t count, int k) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  Inputs in;
  const std::size_t width = npc::dtype_size(dtype);
  for (int i = 0; i < k; ++i) {
    std::vector<std::byte> buf(count * width);
    for (std::size_t e = 0; e < count; ++e) {
      const float x = dist(rng);
      if (dtype == DType::f32) {
        std::memcpy(buf.data() + 4 * e, &x, 4);
      } else {
        const std::uint16_t h = dtype == DType::f16 ? npc::float_to_half(x) : npc::float_to_bf16(x);
        std::memcpy(buf.data() + 2 * e, &h, 2);
      }
    }
    in.buffers.push_back(std::move(buf));
  }
  for (const auto& b : in.buffers) in.views.emplace_back(b);
  in.weights.assign(k, 1.0 / k);
  in.out.resize(count * width);
  return in;
}

template <bool Parallel>
void BM_WeightedSum(benchmark::State& state) {
  const auto dtype = static_cast<DType>(state.range(0));
  const auto count = static_cast<std::size_t>(state.range(1));
  Inputs in = make_inputs(dtype, count, 3);
  for (auto _ : state) {
    if constexpr (Parallel) {
      npc::kernels::weighted_sum_parallel(dtype, in.views, in.weights, in.out);
    } else {
      npc::kernels::weighted_sum_reference(dtype, in.views, in.weights, in.out);
    }
    benchmark::DoNotOptimize(in.out.data());
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(count * npc::dtype_size(dtype) * 4));
}

void fusion_args(benchmark::internal::Benchmark* b) {
  for (int dt : {0, 1, 2})
    for (int64_t n : {64 * 128, 1 << 20, 5120 * 128}) b->Args({dt, n});
}

BENCHMARK(BM_WeightedSum<false>)->Name("weighted_sum/reference")->Apply(fusion_args);
BENCHMARK(BM_WeightedSum<true>)->Name("weighted_sum/parallel")->Apply(fusion_args);

std::vector<npc::TextPair> make_pairs(std::size_t n) {
  std::mt19937 rng(7);
  const std::string alphabet = "abcdefghijklmnop qrstuvw xyz,.";
  auto text = [&] {
    std::string s;
    for (int i = 40 + rng() % 200; i > 0; --i) s += alphabet[rng() % alphabet.size()];
    return s;
  };
  std::vector<npc::TextPair> pairs;
  for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(text(), text());
  return pairs;
}

void BM_ChrfBatchReference(benchmark::State& state) {
  const auto pairs = make_pairs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(npc::text_similarity_batch_reference(pairs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ChrfBatchParallel(benchmark::State& state) {
  const auto pairs = make_pairs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(npc::text_similarity_batch(pairs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_ChrfBatchReference)->Name("chrf_batch/reference")->Arg(1000);
BENCHMARK(BM_ChrfBatchParallel)->Name("chrf_batch/parallel")->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
