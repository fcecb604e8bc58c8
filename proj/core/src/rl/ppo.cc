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

#include "nfsp/rl/ppo.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nfsp/common/error.h"

namespace nfsp::rl {
namespace {

constexpr double kLogFloor = 1e-12;

void CheckSame(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

GaeResult ComputeGae(std::span<const double> rewards, std::span<const double> values,
                     std::span<const std::uint8_t> terminal, double gamma, double decay) {
  const std::size_t n = rewards.size();
  CheckSame(values.size(), n + 1, "gae values (expected T + 1)");
  CheckSame(terminal.size(), n, "gae terminal flags");
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.targets.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double next = terminal[i] ? 0.0 : values[i + 1];
    const double delta = rewards[i] + gamma * next - values[i];
    running = delta + (terminal[i] ? 0.0 : decay * running);
    out.advantages[i] = running;
    out.targets[i] = running + values[i];
  }
  return out;
}

std::vector<double> NormalizeAdvantages(std::span<const double> a) {
  if (a.size() < 2) throw std::invalid_argument("normalize_advantages: need at least 2 entries");
  double mean = 0.0;
  for (double x : a) mean += x;
  mean /= static_cast<double>(a.size());
  double var = 0.0;
  for (double x : a) var += (x - mean) * (x - mean);
  var /= static_cast<double>(a.size());
  const double scale = 1.0 / std::max(std::sqrt(var), 1e-8);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] - mean) * scale;
  return out;
}

LossTerm PpoPolicyLoss(const Matrix& probs, const Matrix& old_probs,
                       std::span<const int> actions, std::span<const double> advantages,
                       double eps) {
  const std::size_t n = actions.size();
  CheckSame(static_cast<std::size_t>(probs.rows()), n, "ppo probs");
  CheckSame(static_cast<std::size_t>(old_probs.rows()), n, "ppo old probs");
  CheckSame(advantages.size(), n, "ppo advantages");
  if (n == 0) throw std::invalid_argument("ppo: empty batch");
  LossTerm out;
  out.grad = Matrix::Zero(probs.rows(), probs.cols());
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t t = 0; t < n; ++t) {
    const int a = actions[t];
    const double old = old_probs(t, a);
    if (!(old > 0.0)) {
      throw std::invalid_argument("ppo: zero old probability for the taken action at row " +
                                  std::to_string(t));
    }
    const double r = probs(t, a) / old;
    const double adv = advantages[t];
    const double unclipped = r * adv;
    const double clipped = std::clamp(r, 1.0 - eps, 1.0 + eps) * adv;
    // Ties resolve to the unclipped branch; inside the clip range both branches
    // have the same derivative anyway.
    if (unclipped <= clipped) {
      out.value -= unclipped * inv_n;
      out.grad(t, a) = -adv / old * inv_n;
    } else {
      out.value -= clipped * inv_n;
    }
  }
  return out;
}

LossTerm EntropyTerm(const Matrix& probs) {
  LossTerm out;
  out.grad = Matrix::Zero(probs.rows(), probs.cols());
  if (probs.rows() == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(probs.rows());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    for (Eigen::Index a = 0; a < probs.cols(); ++a) {
      const double p = probs(i, a);
      if (p <= 0.0) continue;
      const double logp = std::log(std::max(p, kLogFloor));
      out.value += p * logp * inv_n;
      out.grad(i, a) = (logp + (p > kLogFloor ? 1.0 : 0.0)) * inv_n;
    }
  }
  return out;
}

LossTerm ClippedValueLoss(std::span<const double> v_new, std::span<const double> v_old,
                          std::span<const double> targets, double eps) {
  const std::size_t n = v_new.size();
  CheckSame(v_old.size(), n, "value loss v_old");
  CheckSame(targets.size(), n, "value loss targets");
  LossTerm out;
  out.grad = Matrix::Zero(static_cast<Eigen::Index>(n), 1);
  if (n == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = v_new[i] - v_old[i];
    const double v_clip = std::clamp(diff, -eps, eps) + v_old[i];
    const double plain = (v_new[i] - targets[i]) * (v_new[i] - targets[i]);
    const double clipped = (v_clip - targets[i]) * (v_clip - targets[i]);
    if (plain >= clipped) {
      out.value += plain * inv_n;
      out.grad(i, 0) = 2.0 * (v_new[i] - targets[i]) * inv_n;
    } else {
      out.value += clipped * inv_n;
      const bool active = diff > -eps && diff < eps;
      out.grad(i, 0) = active ? 2.0 * (v_clip - targets[i]) * inv_n : 0.0;
    }
  }
  return out;
}

void TrajectoryBatch::Validate() const {
  const auto n = static_cast<std::size_t>(size());
  if (lanes < 1 || steps < 1) throw std::invalid_argument("trajectory batch: empty");
  CheckSame(static_cast<std::size_t>(states.rows()), n, "trajectory states");
  CheckSame(static_cast<std::size_t>(old_policy.rows()), n, "trajectory policies");
  if (legal.size() != 0) CheckSame(static_cast<std::size_t>(legal.rows()), n, "trajectory legal");
  CheckSame(actions.size(), n, "trajectory actions");
  CheckSame(rewards.size(), n, "trajectory rewards");
  CheckSame(values_old.size(), n, "trajectory values");
  CheckSame(terminal.size(), n, "trajectory terminal flags");
  CheckSame(bootstrap.size(), static_cast<std::size_t>(lanes), "trajectory bootstrap");
  for (std::size_t i = 0; i < n; ++i) {
    const int a = actions[i];
    if (a < 0 || a >= old_policy.cols() || !(old_policy(static_cast<Eigen::Index>(i), a) > 0.0)) {
      throw std::invalid_argument("trajectory batch: taken action " + std::to_string(a) +
                                  " has zero stored probability at row " + std::to_string(i));
    }
  }
}

PpoGradient PpoGradientFor(const nn::Network& net, const TrajectoryBatch& batch,
                           const Hyperparams& h) {
  batch.Validate();
  const int lanes = batch.lanes, steps = batch.steps;
  const std::size_t n = static_cast<std::size_t>(batch.size());
  std::vector<double> adv(n), targets(n);
  for (int l = 0; l < lanes; ++l) {
    const std::size_t off = static_cast<std::size_t>(l) * steps;
    std::vector<double> values(batch.values_old.begin() + off,
                               batch.values_old.begin() + off + steps);
    values.push_back(batch.bootstrap[l]);
    const GaeResult g = ComputeGae(
        std::span(batch.rewards).subspan(off, steps), values,
        std::span(batch.terminal).subspan(off, steps), h.gamma, h.gae_decay);
    std::copy(g.advantages.begin(), g.advantages.end(), adv.begin() + off);
    std::copy(g.targets.begin(), g.targets.end(), targets.begin() + off);
  }
  PpoGradient out;
  PpoMetrics& m = out.metrics;
  for (double a : adv) m.mean_abs_advantage += std::abs(a) / static_cast<double>(n);
  const std::vector<double> norm_adv = NormalizeAdvantages(adv);

  const nn::ForwardTrace trace =
      net.Trace({batch.states, batch.legal}, nn::HeadSet::Rl());
  const Matrix& probs = trace.outputs.policy_rl;
  const std::vector<double> v_new(trace.outputs.value.data(),
                                  trace.outputs.value.data() + trace.outputs.value.size());

  const LossTerm pol = PpoPolicyLoss(probs, batch.old_policy, batch.actions, norm_adv, h.clip_eps);
  const LossTerm ent = EntropyTerm(probs);
  const LossTerm val = ClippedValueLoss(v_new, batch.values_old, targets, h.value_clip);
  m.policy_loss = pol.value;
  m.entropy = ent.value;
  m.value_loss = val.value;
  m.total_loss = pol.value + h.entropy_coef * ent.value + h.value_coef * val.value;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    m.mean_ratio += probs(row, batch.actions[i]) / batch.old_policy(row, batch.actions[i]) /
                    static_cast<double>(n);
  }

  nn::LossGraph graph;
  graph.value = m.total_loss;
  graph.d_policy_rl = pol.grad + h.entropy_coef * ent.grad;
  graph.d_value = h.value_coef * val.grad.col(0);
  try {
    const nn::GradientSet raw = net.Backward(trace, graph);
    if (!raw.AllFinite()) throw NonFiniteError("ppo: non-finite gradient");
    m.grad_norm = raw.Norm();
    out.grads = nn::ClipGlobalNorm(raw, h.max_grad_norm);
  } catch (const NonFiniteError&) {
    m.aborted = true;
    out.grads = nn::GradientSet(std::vector<double>(net.num_params(), 0.0));
  }
  return out;
}

PpoMetrics PpoUpdate(nn::Network& net, const TrajectoryBatch& batch, const Hyperparams& h) {
  PpoMetrics first;
  for (int e = 0; e < h.epochs; ++e) {
    const PpoGradient g = PpoGradientFor(net, batch, h);
    if (e == 0) first = g.metrics;
    if (g.metrics.aborted) {
      first.aborted = true;
      break;
    }
    net.ApplyGradient(g.grads, h.lr_rl);
  }
  return first;
}

}  // namespace nfsp::rl
