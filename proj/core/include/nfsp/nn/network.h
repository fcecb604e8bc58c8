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

#ifndef NFSP_NN_NETWORK_H_
#define NFSP_NN_NETWORK_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nfsp::nn {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class BodyKind : std::uint32_t { kMlp = 0, kConv = 1 };

// kFrozenAffine applies a learned per-channel scale and shift only. With
// kBatchStatistics every forward pass normalises each channel by the mean and
// variance of the current batch before the affine step.
enum class NormMode : std::uint32_t { kFrozenAffine = 0, kBatchStatistics = 1 };

// Shape of the shared-body, three-head network. In MLP mode the input is the
// flattened channels * height * width vector and each block is a dense layer
// followed by a leaky ReLU. In conv mode each block is a 3x3 convolution
// (stride 1, zero "same" padding), per-channel normalisation and a leaky ReLU,
// with a 2x2 max pool after every `pool_every` blocks.
struct ArchSpec {
  BodyKind body = BodyKind::kMlp;
  int channels = 1;
  int height = 1;
  int width = 1;
  int blocks = 2;
  int block_width = 32;
  int pool_every = 2;
  double leaky_slope = 0.1;
  int num_actions = 9;
  NormMode norm = NormMode::kFrozenAffine;

  int InputSize() const { return channels * height * width; }

  // Throws std::invalid_argument naming the offending field.
  void Validate() const;

  static ArchSpec Mlp(int input_size, int blocks, int width, int actions);
  static ArchSpec Conv(int channels, int height, int width, int blocks,
                       int block_channels, int actions);

  bool operator==(const ArchSpec&) const = default;
};

std::string ToString(const ArchSpec& spec);

enum class Head : unsigned { kPolicySl = 1u, kPolicyRl = 2u, kValueRl = 4u };

class HeadSet {
 public:
  constexpr HeadSet() = default;
  constexpr HeadSet(Head h) : bits_(static_cast<unsigned>(h)) {}  // NOLINT
  constexpr HeadSet operator|(HeadSet o) const { return FromBits(bits_ | o.bits_); }
  constexpr bool Has(Head h) const { return bits_ & static_cast<unsigned>(h); }
  constexpr bool empty() const { return bits_ == 0; }
  static constexpr HeadSet All() { return FromBits(7u); }
  static constexpr HeadSet Rl() { return FromBits(6u); }

 private:
  static constexpr HeadSet FromBits(unsigned b) {
    HeadSet s;
    s.bits_ = b;
    return s;
  }
  unsigned bits_ = 0;
};

constexpr HeadSet operator|(Head a, Head b) { return HeadSet(a) | HeadSet(b); }

// Contiguous parameter groups. The RL body feeds both the pi_RL and V_RL
// heads; the SL body feeds only pi_SL.
enum class Part { kRlBody = 0, kPolicyRlHead, kValueRlHead, kSlBody, kPolicySlHead };

struct ParamRange {
  std::size_t offset = 0;
  std::size_t size = 0;
};

struct Inputs {
  Matrix features;  // batch x InputSize()
  Matrix legal;     // batch x num_actions of 0/1; empty means all legal
};

struct Outputs {
  Matrix policy_sl;  // batch x num_actions, empty unless requested
  Matrix policy_rl;
  Vector value;
};

// A scalar loss together with its partial derivatives with respect to the
// head outputs of one forward trace. Empty gradient blocks contribute zero.
struct LossGraph {
  double value = 0.0;
  Matrix d_policy_sl;
  Matrix d_policy_rl;
  Vector d_value;
};

class GradientSet {
 public:
  GradientSet() = default;
  explicit GradientSet(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double Norm() const { return norm_; }
  bool AllFinite() const;

 private:
  std::vector<double> values_;
  double norm_ = 0.0;
};

// Rescales g to have L2 norm max_norm when it exceeds it.
GradientSet ClipGlobalNorm(const GradientSet& grads, double max_norm);

enum class LayerKind { kDense, kConv, kNorm, kLeaky, kPool };

struct LayerDesc {
  LayerKind kind = LayerKind::kDense;
  int in_c = 0, in_h = 1, in_w = 1;
  int out_c = 0, out_h = 1, out_w = 1;
  std::size_t offset = 0;
  std::size_t num_params = 0;
  double slope = 0.0;
  bool batch_stats = false;

  int in_size() const { return in_c * in_h * in_w; }
  int out_size() const { return out_c * out_h * out_w; }
};

struct LayerCache {
  Matrix input;
  Matrix normalized;             // batch-statistics norm: x-hat
  Vector inv_std;                // batch-statistics norm
  std::vector<int> argmax;       // max pool
};

struct BodyTrace {
  std::vector<LayerCache> layers;
  Matrix output;
};

struct ForwardTrace {
  HeadSet heads;
  Outputs outputs;
  BodyTrace rl;
  BodyTrace sl;
};

class Network {
 public:
  // Fan-in scaled uniform weights, zero biases, unit norm scales. Identical
  // (spec, seed) yields bit-identical parameters.
  static Network Build(const ArchSpec& spec, std::uint64_t seed);

  // Builds from an existing parameter vector (checkpoint loading).
  static Network FromParams(const ArchSpec& spec, std::vector<double> params);

  const ArchSpec& arch() const { return arch_; }
  std::span<const double> params() const { return params_; }
  std::span<double> mutable_params() { return params_; }
  std::size_t num_params() const { return params_.size(); }
  ParamRange range(Part part) const { return ranges_[static_cast<int>(part)]; }
  std::span<const double> part_params(Part part) const;

  // Pure function of (params, inputs). Throws std::invalid_argument on shape
  // mismatch.
  Outputs Forward(const Inputs& inputs, HeadSet heads) const;

  // Forward pass that keeps the activations needed by Backward.
  ForwardTrace Trace(const Inputs& inputs, HeadSet heads) const;

  // Reverse-mode pass. Throws NonFiniteError for a NaN/inf loss before any
  // propagation happens.
  GradientSet Backward(const ForwardTrace& trace, const LossGraph& loss) const;

  // params -= lr * grads.
  void ApplyGradient(const GradientSet& grads, double lr);

  // Copies one parameter group onto another of identical layout
  // (RL body <-> SL body, pi_RL head <-> pi_SL head).
  void CopyPart(Part from, Part to);
  void CopyPartFrom(const Network& other, Part from, Part to);
  void ReinitializePart(Part part, std::uint64_t seed);
  void ZeroHead(Head head);

 private:
  Network() = default;
  void Layout();
  void InitLayers(std::span<const LayerDesc> layers, std::uint64_t seed);
  BodyTrace RunBody(std::span<const LayerDesc> body, const Matrix& x,
                    bool keep) const;
  Matrix BackBody(std::span<const LayerDesc> body, const BodyTrace& trace,
                  Matrix grad, std::span<double> out) const;
  const LayerDesc& head_desc(Head head) const;

  ArchSpec arch_;
  std::vector<double> params_;
  std::vector<LayerDesc> rl_body_;
  std::vector<LayerDesc> sl_body_;
  LayerDesc pi_rl_head_;
  LayerDesc v_head_;
  LayerDesc pi_sl_head_;
  std::array<ParamRange, 5> ranges_{};
};

Network SgdStep(Network net, const GradientSet& grads, double lr);

// Masked softmax over each row. Entries with legal == 0 get probability 0;
// rows with no legal entry fall back to the unmasked softmax.
Matrix MaskedSoftmax(const Matrix& logits, const Matrix& legal);

}  // namespace nfsp::nn

#endif  // NFSP_NN_NETWORK_H_
