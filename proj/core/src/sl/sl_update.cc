// Copyright 2026 The NFSP-PPO Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nfsp/sl/sl_update.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nfsp/common/error.h"

namespace nfsp::sl {
namespace {

constexpr double kLogFloor = 1e-12;

}  // namespace

rl::LossTerm SlLoss(const nn::Matrix& targets, const nn::Matrix& probs) {
  if (targets.rows() != probs.rows() || targets.cols() != probs.cols()) {
    throw std::invalid_argument("sl loss: target and prediction shapes differ");
  }
  rl::LossTerm out;
  out.grad = nn::Matrix::Zero(probs.rows(), probs.cols());
  if (probs.rows() == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(probs.rows());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    for (Eigen::Index a = 0; a < probs.cols(); ++a) {
      const double t = targets(i, a);
      if (t == 0.0) continue;
      const double p = probs(i, a);
      out.value -= t * std::log(std::max(p, kLogFloor)) * inv_n;
      if (p > kLogFloor) out.grad(i, a) = -t / p * inv_n;
    }
  }
  return out;
}

SlGradient SlGradientFor(const nn::Network& net, const SlBatch& batch, const rl::Hyperparams& h) {
  SlGradient out;
  const nn::ForwardTrace trace = net.Trace({batch.states, batch.legal}, nn::Head::kPolicySl);
  const rl::LossTerm loss = SlLoss(batch.targets, trace.outputs.policy_sl);
  out.metrics.loss = loss.value;
  nn::LossGraph graph;
  graph.value = loss.value;
  graph.d_policy_sl = loss.grad;
  try {
    const nn::GradientSet raw = net.Backward(trace, graph);
    if (!raw.AllFinite()) throw NonFiniteError("sl: non-finite gradient");
    out.metrics.grad_norm = raw.Norm();
    out.grads = nn::ClipGlobalNorm(raw, h.max_grad_norm);
  } catch (const NonFiniteError&) {
    out.metrics.skipped = true;
    out.grads = nn::GradientSet(std::vector<double>(net.num_params(), 0.0));
  }
  return out;
}

SlMetrics SlUpdate(nn::Network& net, ReservoirBuffer& buffer, const rl::Hyperparams& h) {
  if (buffer.size() == 0) {
    SlMetrics m;
    m.skipped = true;
    return m;
  }
  const SlGradient g = SlGradientFor(net, buffer.Sample(h.sl_sample), h);
  if (!g.metrics.skipped) net.ApplyGradient(g.grads, h.lr_sl);
  return g.metrics;
}

}  // namespace nfsp::sl
