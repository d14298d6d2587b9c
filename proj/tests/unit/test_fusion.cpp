// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "doctest.h"
#include "npc/fusion.hpp"
#include "npc/fusion_kernels.hpp"
#include "test_support.hpp"

using namespace npc;

namespace {

const std::vector<std::pair<std::string, std::vector<std::int64_t>>> kShapes = {
    {"q.lora_A.weight", {8, 64}}, {"q.lora_B.weight", {64, 8}}, {"v.lora_A.weight", {8, 64}}};

std::vector<AdapterCheckpoint> random_set(std::mt19937_64& rng, DType dt, int k) {
  std::vector<AdapterCheckpoint> out;
  for (int i = 0; i < k; ++i) out.push_back(test::random_checkpoint(rng, dt, kShapes));
  return out;
}

}  // namespace

TEST_CASE("parallel and reference kernels agree bit for bit") {
  std::mt19937_64 rng(9);
  for (DType dt : {DType::f32, DType::f16, DType::bf16}) {
    const auto set = random_set(rng, dt, 4);
    const std::vector<double> w = {0.1, 0.2, 0.3, 0.4};
    CHECK(average_checkpoints(set, w, FusionKernel::parallel) ==
          average_checkpoints(set, w, FusionKernel::reference));
  }
}

TEST_CASE("weighted average matches the oracle") {
  std::mt19937_64 rng(10);
  const auto set = random_set(rng, DType::f32, 3);
  const std::vector<double> w = {0.5, 0.25, 0.25};
  const AdapterCheckpoint fused = average_checkpoints(set, w);
  for (size_t t = 0; t < kShapes.size(); ++t) {
    const auto got = test::decode_tensor(fused.tensors[t].second);
    std::vector<std::vector<double>> in;
    for (const auto& ck : set) in.push_back(test::decode_tensor(ck.tensors[t].second));
    for (size_t e = 0; e < got.size(); ++e) {
      const double want = 0.5 * in[0][e] + 0.25 * in[1][e] + 0.25 * in[2][e];
      REQUIRE(std::fabs(got[e] - want) <= 1e-6);
    }
  }
}

TEST_CASE("weights are checked") {
  std::mt19937_64 rng(11);
  const auto set = random_set(rng, DType::f32, 2);
  CHECK_THROWS_AS(average_checkpoints(set, std::vector<double>{0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(average_checkpoints(set, std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(average_checkpoints(set, std::vector<double>{NAN, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(average_checkpoints(std::span<const AdapterCheckpoint>{}, std::vector<double>{}),
                  std::invalid_argument);
  CHECK(uniform_weights(4) == std::vector<double>{0.25, 0.25, 0.25, 0.25});
}

TEST_CASE("incompatible inputs are reported") {
  std::mt19937_64 rng(12);
  auto set = random_set(rng, DType::f32, 2);
  CHECK(check_compatible(set).ok());

  auto rank = set;
  rank[1].metadata.rank = 16;
  CHECK(check_compatible(rank).has("rank mismatch"));
  CHECK_THROWS_AS(average_checkpoints(rank, uniform_weights(2)), std::invalid_argument);

  auto shape = set;
  shape[1].tensors[0].second = Tensor::from_f32(std::vector<float>(8 * 32), {8, 32});
  CHECK(check_compatible(shape).has("shape mismatch"));

  auto keys = set;
  keys[1].tensors.pop_back();
  CHECK(check_compatible(keys).has("key set mismatch"));

  auto dtype = set;
  dtype[1] = test::random_checkpoint(rng, DType::f16, kShapes);
  CHECK(check_compatible(dtype).has("dtype mismatch"));

  auto modules = set;
  modules[1].metadata.target_modules = {"q_proj"};
  const auto report = check_compatible(modules);
  CHECK(report.ok());
  CHECK(report.has("target_modules differ"));
}

TEST_CASE("fusion plan reads and writes files") {
  std::mt19937_64 rng(13);
  const auto dir = test::scratch_dir("fusion_plan");
  FusionPlan plan;
  for (int i = 0; i < 3; ++i) {
    const auto path = dir / ("epoch" + std::to_string(i) + ".safetensors");
    write_checkpoint(test::random_checkpoint(rng, DType::bf16, kShapes), path);
    plan.inputs.push_back(path);
  }
  plan.output = dir / "fused.safetensors";
  const AdapterCheckpoint fused = average_checkpoints(plan);
  CHECK(read_checkpoint(plan.output) == fused);
}
