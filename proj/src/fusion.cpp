// SPDX-License-Identifier: Apache-2.0

#include "npc/fusion.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "npc/fusion_kernels.hpp"

namespace npc {

namespace {

std::string shape_str(const std::vector<std::int64_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
  return s + "]";
}

void check_weights(std::span<const double> weights, std::size_t n) {
  if (weights.size() != n) throw std::invalid_argument("need exactly one weight per checkpoint");
  double sum = 0;
  for (double w : weights) {
    if (!std::isfinite(w)) throw std::invalid_argument("weights must be finite");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw std::invalid_argument("weights must sum to 1");
}

}  // namespace

std::vector<double> uniform_weights(std::size_t n) {
  return std::vector<double>(n, n ? 1.0 / static_cast<double>(n) : 0.0);
}

ValidationReport check_compatible(std::span<const AdapterCheckpoint> ckpts) {
  ValidationReport report;
  if (ckpts.size() < 2) return report;
  const AdapterCheckpoint& first = ckpts.front();
  std::set<std::string> keys;
  for (const auto& [name, _] : first.tensors) keys.insert(name);

  for (std::size_t i = 1; i < ckpts.size(); ++i) {
    const AdapterCheckpoint& other = ckpts[i];
    const std::string who = "checkpoint " + std::to_string(i);
    std::set<std::string> other_keys;
    for (const auto& [name, _] : other.tensors) other_keys.insert(name);
    if (other_keys != keys) report.add("key set mismatch", who + " differs from checkpoint 0");

    for (const auto& [name, t] : first.tensors) {
      const Tensor* u = other.find(name);
      if (!u) continue;
      if (u->shape != t.shape)
        report.add("shape mismatch", who + " '" + name + "': " + shape_str(u->shape) + " vs " +
                                         shape_str(t.shape));
      if (u->dtype != t.dtype)
        report.add("dtype mismatch", who + " '" + name + "': " + std::string(to_string(u->dtype)) +
                                         " vs " + std::string(to_string(t.dtype)));
    }
    const LoraMetadata& a = first.metadata;
    const LoraMetadata& b = other.metadata;
    if (a.rank != b.rank)
      report.add("rank mismatch", who + ": " + std::to_string(b.rank) + " vs " + std::to_string(a.rank));
    if (a.alpha != b.alpha) report.add("alpha mismatch", who);
    if (a.target_modules != b.target_modules) report.add("target_modules differ", who, false);
    if (a.extras != b.extras) report.add("metadata extras differ", who, false);
  }
  return report;
}

AdapterCheckpoint average_checkpoints(std::span<const AdapterCheckpoint> ckpts,
                                      std::span<const double> weights, FusionKernel kernel) {
  if (ckpts.empty()) throw std::invalid_argument("nothing to average");
  const std::vector<double> uniform = uniform_weights(ckpts.size());
  if (weights.empty()) weights = uniform;
  check_weights(weights, ckpts.size());

  const ValidationReport compat = check_compatible(ckpts);
  if (!compat.ok()) {
    std::string msg = "checkpoints are not fusable:";
    for (const auto& f : compat.findings)
      if (f.blocking) msg += " [" + f.kind + ": " + f.detail + "]";
    throw std::invalid_argument(msg);
  }

  AdapterCheckpoint out;
  out.metadata = ckpts.front().metadata;
  out.tensors.reserve(ckpts.front().tensors.size());
  std::vector<std::span<const std::byte>> inputs(ckpts.size());

  for (const auto& [name, proto] : ckpts.front().tensors) {
    for (std::size_t i = 0; i < ckpts.size(); ++i) inputs[i] = ckpts[i].find(name)->data;
    Tensor fused;
    fused.dtype = proto.dtype;
    fused.shape = proto.shape;
    fused.data.resize(proto.data.size());
    if (kernel == FusionKernel::parallel)
      kernels::weighted_sum_parallel(proto.dtype, inputs, weights, fused.data);
    else
      kernels::weighted_sum_reference(proto.dtype, inputs, weights, fused.data);
    out.tensors.emplace_back(name, std::move(fused));
  }
  return out;
}

AdapterCheckpoint average_checkpoints(const FusionPlan& plan) {
  if (plan.inputs.empty()) throw std::invalid_argument("fusion plan has no inputs");
  std::vector<AdapterCheckpoint> ckpts;
  ckpts.reserve(plan.inputs.size());
  for (const auto& p : plan.inputs) ckpts.push_back(read_checkpoint(p));
  AdapterCheckpoint fused = average_checkpoints(ckpts, plan.weights, plan.kernel);
  if (!plan.output.empty()) write_checkpoint(fused, plan.output);
  return fused;
}

}  // namespace npc
