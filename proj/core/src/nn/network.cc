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

#include "nfsp/nn/network.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "nfsp/common/error.h"
#include "nfsp/common/random.h"

namespace nfsp::nn {
namespace {

constexpr double kNormEpsilon = 1e-5;

using ConstMatrixMap = Eigen::Map<const Matrix>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstVectorMap = Eigen::Map<const Vector>;
using VectorMap = Eigen::Map<Vector>;

void RequirePositive(int value, const char* field) {
  if (value <= 0) {
    throw std::invalid_argument(std::string("ArchSpec.") + field +
                                " must be positive, got " +
                                std::to_string(value));
  }
}

// --- Dense -----------------------------------------------------------------

Matrix DenseForward(const LayerDesc& d, const double* p, const Matrix& x) {
  ConstMatrixMap w(p + d.offset, d.out_c, d.in_size());
  ConstVectorMap b(p + d.offset + static_cast<std::size_t>(d.out_c) * d.in_size(),
                   d.out_c);
  Matrix y = x * w.transpose();
  y.rowwise() += b.transpose();
  return y;
}

Matrix DenseBackward(const LayerDesc& d, const double* p, const Matrix& x,
                     const Matrix& dy, double* g) {
  ConstMatrixMap w(p + d.offset, d.out_c, d.in_size());
  MatrixMap gw(g + d.offset, d.out_c, d.in_size());
  VectorMap gb(g + d.offset + static_cast<std::size_t>(d.out_c) * d.in_size(),
               d.out_c);
  gw.noalias() += dy.transpose() * x;
  gb += dy.colwise().sum().transpose();
  return dy * w;
}

// --- 3x3 convolution, stride 1, zero padding 1 ------------------------------

Matrix Im2Col(const LayerDesc& d, const double* row) {
  const int h = d.in_h, w = d.in_w, c = d.in_c;
  Matrix col = Matrix::Zero(h * w, c * 9);
  for (int ch = 0; ch < c; ++ch) {
    const double* plane = row + static_cast<std::ptrdiff_t>(ch) * h * w;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int pix = y * w + x;
        for (int ky = 0; ky < 3; ++ky) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          for (int kx = 0; kx < 3; ++kx) {
            const int sx = x + kx - 1;
            if (sx < 0 || sx >= w) continue;
            col(pix, ch * 9 + ky * 3 + kx) = plane[sy * w + sx];
          }
        }
      }
    }
  }
  return col;
}

Matrix ConvForward(const LayerDesc& d, const double* p, const Matrix& x) {
  const int hw = d.in_h * d.in_w;
  ConstMatrixMap w(p + d.offset, d.out_c, d.in_c * 9);
  ConstVectorMap b(p + d.offset + static_cast<std::size_t>(d.out_c) * d.in_c * 9,
                   d.out_c);
  Matrix y(x.rows(), d.out_size());
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    const Matrix col = Im2Col(d, x.row(n).data());
    Matrix out = col * w.transpose();  // hw x out_c
    out.rowwise() += b.transpose();
    // Output layout is channel-major: out_c x (h*w).
    MatrixMap dst(y.row(n).data(), d.out_c, hw);
    dst = out.transpose();
  }
  return y;
}

Matrix ConvBackward(const LayerDesc& d, const double* p, const Matrix& x,
                    const Matrix& dy, double* g) {
  const int hw = d.in_h * d.in_w;
  const int h = d.in_h, wd = d.in_w;
  ConstMatrixMap w(p + d.offset, d.out_c, d.in_c * 9);
  MatrixMap gw(g + d.offset, d.out_c, d.in_c * 9);
  VectorMap gb(g + d.offset + static_cast<std::size_t>(d.out_c) * d.in_c * 9,
               d.out_c);
  Matrix dx = Matrix::Zero(x.rows(), d.in_size());
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    const Matrix col = Im2Col(d, x.row(n).data());
    const Matrix grad = ConstMatrixMap(dy.row(n).data(), d.out_c, hw).transpose();
    gw.noalias() += grad.transpose() * col;
    gb += grad.colwise().sum().transpose();
    const Matrix dcol = grad * w;  // hw x in_c*9
    double* drow = dx.row(n).data();
    for (int ch = 0; ch < d.in_c; ++ch) {
      double* plane = drow + static_cast<std::ptrdiff_t>(ch) * hw;
      for (int y = 0; y < h; ++y) {
        for (int xx = 0; xx < wd; ++xx) {
          const int pix = y * wd + xx;
          for (int ky = 0; ky < 3; ++ky) {
            const int sy = y + ky - 1;
            if (sy < 0 || sy >= h) continue;
            for (int kx = 0; kx < 3; ++kx) {
              const int sx = xx + kx - 1;
              if (sx < 0 || sx >= wd) continue;
              plane[sy * wd + sx] += dcol(pix, ch * 9 + ky * 3 + kx);
            }
          }
        }
      }
    }
  }
  return dx;
}

// --- Per-channel normalisation ----------------------------------------------

Matrix NormForward(const LayerDesc& d, const double* p, const Matrix& x,
                   LayerCache* cache) {
  const int hw = d.in_h * d.in_w;
  const double* gamma = p + d.offset;
  const double* beta = gamma + d.in_c;
  Matrix y(x.rows(), x.cols());
  if (!d.batch_stats) {
    for (Eigen::Index n = 0; n < x.rows(); ++n) {
      for (int c = 0; c < d.in_c; ++c) {
        for (int i = 0; i < hw; ++i) {
          y(n, c * hw + i) = gamma[c] * x(n, c * hw + i) + beta[c];
        }
      }
    }
    return y;
  }
  const double count = static_cast<double>(x.rows()) * hw;
  Matrix xhat(x.rows(), x.cols());
  Vector inv_std(d.in_c);
  for (int c = 0; c < d.in_c; ++c) {
    double mean = 0.0;
    for (Eigen::Index n = 0; n < x.rows(); ++n) {
      mean += x.row(n).segment(c * hw, hw).sum();
    }
    mean /= count;
    double var = 0.0;
    for (Eigen::Index n = 0; n < x.rows(); ++n) {
      var += (x.row(n).segment(c * hw, hw).array() - mean).square().sum();
    }
    var /= count;
    inv_std[c] = 1.0 / std::sqrt(var + kNormEpsilon);
    for (Eigen::Index n = 0; n < x.rows(); ++n) {
      for (int i = 0; i < hw; ++i) {
        const double v = (x(n, c * hw + i) - mean) * inv_std[c];
        xhat(n, c * hw + i) = v;
        y(n, c * hw + i) = gamma[c] * v + beta[c];
      }
    }
  }
  if (cache != nullptr) {
    cache->normalized = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

Matrix NormBackward(const LayerDesc& d, const double* p, const LayerCache& cache,
                    const Matrix& dy, double* g) {
  const int hw = d.in_h * d.in_w;
  const double* gamma = p + d.offset;
  double* ggamma = g + d.offset;
  double* gbeta = ggamma + d.in_c;
  const Matrix& x = cache.input;
  Matrix dx(dy.rows(), dy.cols());
  if (!d.batch_stats) {
    for (Eigen::Index n = 0; n < dy.rows(); ++n) {
      for (int c = 0; c < d.in_c; ++c) {
        for (int i = 0; i < hw; ++i) {
          const double gy = dy(n, c * hw + i);
          ggamma[c] += gy * x(n, c * hw + i);
          gbeta[c] += gy;
          dx(n, c * hw + i) = gamma[c] * gy;
        }
      }
    }
    return dx;
  }
  const double count = static_cast<double>(dy.rows()) * hw;
  for (int c = 0; c < d.in_c; ++c) {
    double sum_dxhat = 0.0;
    double sum_dxhat_xhat = 0.0;
    for (Eigen::Index n = 0; n < dy.rows(); ++n) {
      for (int i = 0; i < hw; ++i) {
        const double gy = dy(n, c * hw + i);
        const double xh = cache.normalized(n, c * hw + i);
        ggamma[c] += gy * xh;
        gbeta[c] += gy;
        sum_dxhat += gy * gamma[c];
        sum_dxhat_xhat += gy * gamma[c] * xh;
      }
    }
    for (Eigen::Index n = 0; n < dy.rows(); ++n) {
      for (int i = 0; i < hw; ++i) {
        const double dxhat = dy(n, c * hw + i) * gamma[c];
        const double xh = cache.normalized(n, c * hw + i);
        dx(n, c * hw + i) = cache.inv_std[c] / count *
                            (count * dxhat - sum_dxhat - xh * sum_dxhat_xhat);
      }
    }
  }
  return dx;
}

// --- Activations and pooling --------------------------------------------------

Matrix LeakyForward(const LayerDesc& d, const Matrix& x) {
  return x.unaryExpr([s = d.slope](double v) { return v > 0.0 ? v : s * v; });
}

Matrix LeakyBackward(const LayerDesc& d, const Matrix& x, const Matrix& dy) {
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index i = 0; i < dy.size(); ++i) {
    dx.data()[i] = x.data()[i] > 0.0 ? dy.data()[i] : d.slope * dy.data()[i];
  }
  return dx;
}

Matrix PoolForward(const LayerDesc& d, const Matrix& x, std::vector<int>* argmax) {
  Matrix y(x.rows(), d.out_size());
  if (argmax != nullptr) argmax->assign(static_cast<std::size_t>(y.size()), 0);
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    for (int c = 0; c < d.in_c; ++c) {
      for (int oy = 0; oy < d.out_h; ++oy) {
        for (int ox = 0; ox < d.out_w; ++ox) {
          int best = -1;
          double best_v = 0.0;
          for (int ky = 0; ky < 2; ++ky) {
            for (int kx = 0; kx < 2; ++kx) {
              const int idx =
                  c * d.in_h * d.in_w + (2 * oy + ky) * d.in_w + (2 * ox + kx);
              if (best < 0 || x(n, idx) > best_v) {
                best = idx;
                best_v = x(n, idx);
              }
            }
          }
          const int out_idx = c * d.out_h * d.out_w + oy * d.out_w + ox;
          y(n, out_idx) = best_v;
          if (argmax != nullptr) {
            (*argmax)[static_cast<std::size_t>(n * y.cols() + out_idx)] = best;
          }
        }
      }
    }
  }
  return y;
}

Matrix PoolBackward(const LayerDesc& d, const LayerCache& cache, const Matrix& dy) {
  Matrix dx = Matrix::Zero(dy.rows(), d.in_size());
  for (Eigen::Index n = 0; n < dy.rows(); ++n) {
    for (Eigen::Index j = 0; j < dy.cols(); ++j) {
      dx(n, cache.argmax[static_cast<std::size_t>(n * dy.cols() + j)]) += dy(n, j);
    }
  }
  return dx;
}

// Softmax Jacobian-vector product: dz = p * (dp - <dp, p>).
Matrix SoftmaxBackward(const Matrix& probs, const Matrix& dprobs) {
  Matrix dz(probs.rows(), probs.cols());
  for (Eigen::Index n = 0; n < probs.rows(); ++n) {
    const double dot = probs.row(n).dot(dprobs.row(n));
    dz.row(n) = probs.row(n).array() * (dprobs.row(n).array() - dot);
  }
  return dz;
}

std::vector<LayerDesc> BuildBody(const ArchSpec& spec, std::size_t* offset) {
  std::vector<LayerDesc> layers;
  int c = spec.channels, h = spec.height, w = spec.width;
  auto push = [&](LayerDesc d) {
    d.offset = *offset;
    *offset += d.num_params;
    layers.push_back(d);
  };
  if (spec.body == BodyKind::kMlp) {
    int in = spec.InputSize();
    for (int b = 0; b < spec.blocks; ++b) {
      LayerDesc dense;
      dense.kind = LayerKind::kDense;
      dense.in_c = in;
      dense.out_c = spec.block_width;
      dense.num_params = static_cast<std::size_t>(in + 1) * spec.block_width;
      push(dense);
      LayerDesc act;
      act.kind = LayerKind::kLeaky;
      act.in_c = act.out_c = spec.block_width;
      act.slope = spec.leaky_slope;
      push(act);
      in = spec.block_width;
    }
    return layers;
  }
  for (int b = 0; b < spec.blocks; ++b) {
    LayerDesc conv;
    conv.kind = LayerKind::kConv;
    conv.in_c = c;
    conv.in_h = conv.out_h = h;
    conv.in_w = conv.out_w = w;
    conv.out_c = spec.block_width;
    conv.num_params = static_cast<std::size_t>(c * 9 + 1) * spec.block_width;
    push(conv);
    c = spec.block_width;
    LayerDesc norm;
    norm.kind = LayerKind::kNorm;
    norm.in_c = norm.out_c = c;
    norm.in_h = norm.out_h = h;
    norm.in_w = norm.out_w = w;
    norm.num_params = 2 * static_cast<std::size_t>(c);
    norm.batch_stats = spec.norm == NormMode::kBatchStatistics;
    push(norm);
    LayerDesc act;
    act.kind = LayerKind::kLeaky;
    act.in_c = act.out_c = c;
    act.in_h = act.out_h = h;
    act.in_w = act.out_w = w;
    act.slope = spec.leaky_slope;
    push(act);
    if (spec.pool_every > 0 && (b + 1) % spec.pool_every == 0) {
      LayerDesc pool;
      pool.kind = LayerKind::kPool;
      pool.in_c = pool.out_c = c;
      pool.in_h = h;
      pool.in_w = w;
      h /= 2;
      w /= 2;
      pool.out_h = h;
      pool.out_w = w;
      push(pool);
    }
  }
  return layers;
}

LayerDesc MakeHead(int in, int out, std::size_t* offset) {
  LayerDesc d;
  d.kind = LayerKind::kDense;
  d.in_c = in;
  d.out_c = out;
  d.num_params = static_cast<std::size_t>(in + 1) * out;
  d.offset = *offset;
  *offset += d.num_params;
  return d;
}

}  // namespace

void ArchSpec::Validate() const {
  RequirePositive(channels, "channels");
  RequirePositive(height, "height");
  RequirePositive(width, "width");
  RequirePositive(blocks, "blocks");
  RequirePositive(block_width, "block_width");
  if (num_actions < 2) {
    throw std::invalid_argument("ArchSpec.num_actions must be >= 2, got " +
                                std::to_string(num_actions));
  }
  if (pool_every < 0) {
    throw std::invalid_argument("ArchSpec.pool_every must be >= 0, got " +
                                std::to_string(pool_every));
  }
  if (!(leaky_slope >= 0.0 && leaky_slope < 1.0)) {
    throw std::invalid_argument("ArchSpec.leaky_slope must lie in [0, 1)");
  }
  if (body == BodyKind::kConv && pool_every > 0) {
    int h = height, w = width;
    for (int b = 0; b < blocks; ++b) {
      if ((b + 1) % pool_every != 0) continue;
      if (h < 2 || w < 2) {
        throw std::invalid_argument(
            "ArchSpec.pool_every pools the " + std::to_string(h) + "x" +
            std::to_string(w) + " feature map below 1x1; reduce blocks or "
            "increase height/width");
      }
      h /= 2;
      w /= 2;
    }
  }
}

ArchSpec ArchSpec::Mlp(int input_size, int blocks, int width, int actions) {
  ArchSpec s;
  s.body = BodyKind::kMlp;
  s.channels = input_size;
  s.blocks = blocks;
  s.block_width = width;
  s.num_actions = actions;
  return s;
}

ArchSpec ArchSpec::Conv(int channels, int height, int width, int blocks,
                        int block_channels, int actions) {
  ArchSpec s;
  s.body = BodyKind::kConv;
  s.channels = channels;
  s.height = height;
  s.width = width;
  s.blocks = blocks;
  s.block_width = block_channels;
  s.num_actions = actions;
  return s;
}

std::string ToString(const ArchSpec& spec) {
  std::ostringstream os;
  os << (spec.body == BodyKind::kMlp ? "mlp" : "conv") << "(" << spec.channels
     << "x" << spec.height << "x" << spec.width << ", blocks=" << spec.blocks
     << ", width=" << spec.block_width << ", actions=" << spec.num_actions << ")";
  return os.str();
}

GradientSet::GradientSet(std::vector<double> values) : values_(std::move(values)) {
  double sq = 0.0;
  for (double v : values_) sq += v * v;
  norm_ = std::sqrt(sq);
}

bool GradientSet::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

GradientSet ClipGlobalNorm(const GradientSet& grads, double max_norm) {
  if (!(max_norm > 0.0)) {
    throw std::invalid_argument("clip_global_norm: max_norm must be > 0");
  }
  if (!grads.AllFinite()) {
    throw NonFiniteError("clip_global_norm: gradient has non-finite entries");
  }
  const double norm = grads.Norm();
  if (norm <= max_norm) return grads;
  const double scale = max_norm / norm;
  std::vector<double> scaled(grads.values().begin(), grads.values().end());
  for (double& v : scaled) v *= scale;
  return GradientSet(std::move(scaled));
}

Matrix MaskedSoftmax(const Matrix& logits, const Matrix& legal) {
  Matrix probs(logits.rows(), logits.cols());
  for (Eigen::Index n = 0; n < logits.rows(); ++n) {
    bool any = false;
    if (legal.size() != 0) {
      for (Eigen::Index a = 0; a < logits.cols(); ++a) any |= legal(n, a) > 0.0;
    }
    const bool masked = any;
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < logits.cols(); ++a) {
      if (masked && !(legal(n, a) > 0.0)) continue;
      mx = std::max(mx, logits(n, a));
    }
    double total = 0.0;
    for (Eigen::Index a = 0; a < logits.cols(); ++a) {
      const double e = (masked && !(legal(n, a) > 0.0))
                           ? 0.0
                           : std::exp(logits(n, a) - mx);
      probs(n, a) = e;
      total += e;
    }
    probs.row(n) /= total;
  }
  return probs;
}

Network Network::Build(const ArchSpec& spec, std::uint64_t seed) {
  spec.Validate();
  Network net;
  net.arch_ = spec;
  net.Layout();
  net.params_.assign(net.ranges_[static_cast<int>(Part::kPolicySlHead)].offset +
                         net.ranges_[static_cast<int>(Part::kPolicySlHead)].size,
                     0.0);
  net.InitLayers(net.rl_body_, DeriveSeed(seed, 0));
  net.InitLayers(std::span(&net.pi_rl_head_, 1), DeriveSeed(seed, 1));
  net.InitLayers(std::span(&net.v_head_, 1), DeriveSeed(seed, 2));
  net.InitLayers(net.sl_body_, DeriveSeed(seed, 3));
  net.InitLayers(std::span(&net.pi_sl_head_, 1), DeriveSeed(seed, 4));
  return net;
}

Network Network::FromParams(const ArchSpec& spec, std::vector<double> params) {
  spec.Validate();
  Network net;
  net.arch_ = spec;
  net.Layout();
  const ParamRange last = net.ranges_[static_cast<int>(Part::kPolicySlHead)];
  if (params.size() != last.offset + last.size) {
    throw std::invalid_argument(
        "parameter count mismatch: architecture expects " +
        std::to_string(last.offset + last.size) + ", got " +
        std::to_string(params.size()));
  }
  net.params_ = std::move(params);
  return net;
}

void Network::Layout() {
  std::size_t offset = 0;
  rl_body_ = BuildBody(arch_, &offset);
  ranges_[static_cast<int>(Part::kRlBody)] = {0, offset};
  const int feat = rl_body_.back().out_size();
  std::size_t start = offset;
  pi_rl_head_ = MakeHead(feat, arch_.num_actions, &offset);
  ranges_[static_cast<int>(Part::kPolicyRlHead)] = {start, offset - start};
  start = offset;
  v_head_ = MakeHead(feat, 1, &offset);
  ranges_[static_cast<int>(Part::kValueRlHead)] = {start, offset - start};
  start = offset;
  sl_body_ = BuildBody(arch_, &offset);
  ranges_[static_cast<int>(Part::kSlBody)] = {start, offset - start};
  start = offset;
  pi_sl_head_ = MakeHead(feat, arch_.num_actions, &offset);
  ranges_[static_cast<int>(Part::kPolicySlHead)] = {start, offset - start};
}

void Network::InitLayers(std::span<const LayerDesc> layers, std::uint64_t seed) {
  Rng rng(seed);
  for (const LayerDesc& d : layers) {
    double* p = params_.data() + d.offset;
    switch (d.kind) {
      case LayerKind::kDense:
      case LayerKind::kConv: {
        const int fan_in = d.kind == LayerKind::kDense ? d.in_size() : d.in_c * 9;
        const std::size_t weights =
            d.num_params - static_cast<std::size_t>(d.out_c);
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < weights; ++i) {
          p[i] = (2.0 * UniformUnit(rng) - 1.0) * bound;
        }
        std::fill(p + weights, p + d.num_params, 0.0);
        break;
      }
      case LayerKind::kNorm:
        std::fill(p, p + d.in_c, 1.0);
        std::fill(p + d.in_c, p + 2 * d.in_c, 0.0);
        break;
      case LayerKind::kLeaky:
      case LayerKind::kPool:
        break;
    }
  }
}

std::span<const double> Network::part_params(Part part) const {
  const ParamRange r = range(part);
  return std::span<const double>(params_).subspan(r.offset, r.size);
}

BodyTrace Network::RunBody(std::span<const LayerDesc> body, const Matrix& x,
                           bool keep) const {
  BodyTrace trace;
  if (keep) trace.layers.resize(body.size());
  Matrix cur = x;
  const double* p = params_.data();
  for (std::size_t i = 0; i < body.size(); ++i) {
    const LayerDesc& d = body[i];
    LayerCache* cache = keep ? &trace.layers[i] : nullptr;
    Matrix next;
    switch (d.kind) {
      case LayerKind::kDense: next = DenseForward(d, p, cur); break;
      case LayerKind::kConv: next = ConvForward(d, p, cur); break;
      case LayerKind::kNorm: next = NormForward(d, p, cur, cache); break;
      case LayerKind::kLeaky: next = LeakyForward(d, cur); break;
      case LayerKind::kPool:
        next = PoolForward(d, cur, cache ? &cache->argmax : nullptr);
        break;
    }
    if (keep) cache->input = std::move(cur);
    cur = std::move(next);
  }
  trace.output = std::move(cur);
  return trace;
}

Matrix Network::BackBody(std::span<const LayerDesc> body, const BodyTrace& trace,
                         Matrix grad, std::span<double> out) const {
  const double* p = params_.data();
  double* g = out.data();
  for (std::size_t i = body.size(); i-- > 0;) {
    const LayerDesc& d = body[i];
    const LayerCache& cache = trace.layers[i];
    switch (d.kind) {
      case LayerKind::kDense: grad = DenseBackward(d, p, cache.input, grad, g); break;
      case LayerKind::kConv: grad = ConvBackward(d, p, cache.input, grad, g); break;
      case LayerKind::kNorm: grad = NormBackward(d, p, cache, grad, g); break;
      case LayerKind::kLeaky: grad = LeakyBackward(d, cache.input, grad); break;
      case LayerKind::kPool: grad = PoolBackward(d, cache, grad); break;
    }
  }
  return grad;
}

namespace {

void CheckInputs(const ArchSpec& arch, const Inputs& in) {
  if (in.features.rows() == 0) {
    throw std::invalid_argument("forward: batch must be nonempty");
  }
  if (in.features.cols() != arch.InputSize()) {
    throw std::invalid_argument(
        "forward: state shape mismatch, expected " + std::to_string(arch.channels) +
        "x" + std::to_string(arch.height) + "x" + std::to_string(arch.width) + " (" +
        std::to_string(arch.InputSize()) + " features), got " +
        std::to_string(in.features.cols()) + " features");
  }
  if (in.legal.size() != 0 &&
      (in.legal.rows() != in.features.rows() || in.legal.cols() != arch.num_actions)) {
    throw std::invalid_argument(
        "forward: legal mask shape mismatch, expected " +
        std::to_string(in.features.rows()) + "x" + std::to_string(arch.num_actions) +
        ", got " + std::to_string(in.legal.rows()) + "x" +
        std::to_string(in.legal.cols()));
  }
}

}  // namespace

ForwardTrace Network::Trace(const Inputs& inputs, HeadSet heads) const {
  CheckInputs(arch_, inputs);
  ForwardTrace trace;
  trace.heads = heads;
  const double* p = params_.data();
  if (heads.Has(Head::kPolicyRl) || heads.Has(Head::kValueRl)) {
    trace.rl = RunBody(rl_body_, inputs.features, true);
    if (heads.Has(Head::kPolicyRl)) {
      trace.outputs.policy_rl =
          MaskedSoftmax(DenseForward(pi_rl_head_, p, trace.rl.output), inputs.legal);
    }
    if (heads.Has(Head::kValueRl)) {
      trace.outputs.value = DenseForward(v_head_, p, trace.rl.output).col(0);
    }
  }
  if (heads.Has(Head::kPolicySl)) {
    trace.sl = RunBody(sl_body_, inputs.features, true);
    trace.outputs.policy_sl =
        MaskedSoftmax(DenseForward(pi_sl_head_, p, trace.sl.output), inputs.legal);
  }
  return trace;
}

Outputs Network::Forward(const Inputs& inputs, HeadSet heads) const {
  CheckInputs(arch_, inputs);
  Outputs out;
  const double* p = params_.data();
  if (heads.Has(Head::kPolicyRl) || heads.Has(Head::kValueRl)) {
    const BodyTrace body = RunBody(rl_body_, inputs.features, false);
    if (heads.Has(Head::kPolicyRl)) {
      out.policy_rl =
          MaskedSoftmax(DenseForward(pi_rl_head_, p, body.output), inputs.legal);
    }
    if (heads.Has(Head::kValueRl)) {
      out.value = DenseForward(v_head_, p, body.output).col(0);
    }
  }
  if (heads.Has(Head::kPolicySl)) {
    const BodyTrace body = RunBody(sl_body_, inputs.features, false);
    out.policy_sl =
        MaskedSoftmax(DenseForward(pi_sl_head_, p, body.output), inputs.legal);
  }
  return out;
}

GradientSet Network::Backward(const ForwardTrace& trace, const LossGraph& loss) const {
  if (!std::isfinite(loss.value)) {
    throw NonFiniteError("backward: loss is not finite");
  }
  std::vector<double> grads(params_.size(), 0.0);
  const double* p = params_.data();
  const auto rows = [&]() -> Eigen::Index {
    if (trace.outputs.policy_rl.size()) return trace.outputs.policy_rl.rows();
    if (trace.outputs.value.size()) return trace.outputs.value.size();
    return trace.outputs.policy_sl.rows();
  }();

  const bool rl_policy = loss.d_policy_rl.size() != 0;
  const bool rl_value = loss.d_value.size() != 0;
  if ((rl_policy && !trace.heads.Has(Head::kPolicyRl)) ||
      (rl_value && !trace.heads.Has(Head::kValueRl)) ||
      (loss.d_policy_sl.size() != 0 && !trace.heads.Has(Head::kPolicySl))) {
    throw std::invalid_argument("backward: loss refers to a head the trace lacks");
  }
  if (rl_policy || rl_value) {
    Matrix dfeat = Matrix::Zero(rows, trace.rl.output.cols());
    if (rl_policy) {
      const Matrix dz = SoftmaxBackward(trace.outputs.policy_rl, loss.d_policy_rl);
      dfeat += DenseBackward(pi_rl_head_, p, trace.rl.output, dz, grads.data());
    }
    if (rl_value) {
      const Matrix dv = loss.d_value;
      dfeat += DenseBackward(v_head_, p, trace.rl.output, dv, grads.data());
    }
    BackBody(rl_body_, trace.rl, std::move(dfeat), grads);
  }
  if (loss.d_policy_sl.size() != 0) {
    const Matrix dz = SoftmaxBackward(trace.outputs.policy_sl, loss.d_policy_sl);
    Matrix dfeat = DenseBackward(pi_sl_head_, p, trace.sl.output, dz, grads.data());
    BackBody(sl_body_, trace.sl, std::move(dfeat), grads);
  }
  return GradientSet(std::move(grads));
}

void Network::ApplyGradient(const GradientSet& grads, double lr) {
  if (grads.size() != params_.size()) {
    throw std::invalid_argument("sgd_step: gradient length " +
                                std::to_string(grads.size()) +
                                " does not match parameter count " +
                                std::to_string(params_.size()));
  }
  if (!(lr > 0.0)) throw std::invalid_argument("sgd_step: lr must be > 0");
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= lr * grads[i];
}

Network SgdStep(Network net, const GradientSet& grads, double lr) {
  net.ApplyGradient(grads, lr);
  return net;
}

void Network::CopyPart(Part from, Part to) { CopyPartFrom(*this, from, to); }

void Network::CopyPartFrom(const Network& other, Part from, Part to) {
  const ParamRange src = other.range(from);
  const ParamRange dst = range(to);
  if (src.size != dst.size) {
    throw std::invalid_argument("copy_part: parameter groups differ in size (" +
                                std::to_string(src.size) + " vs " +
                                std::to_string(dst.size) + ")");
  }
  std::copy_n(other.params_.begin() + static_cast<std::ptrdiff_t>(src.offset),
              src.size, params_.begin() + static_cast<std::ptrdiff_t>(dst.offset));
}

void Network::ReinitializePart(Part part, std::uint64_t seed) {
  switch (part) {
    case Part::kRlBody: InitLayers(rl_body_, seed); break;
    case Part::kSlBody: InitLayers(sl_body_, seed); break;
    case Part::kPolicyRlHead: InitLayers(std::span(&pi_rl_head_, 1), seed); break;
    case Part::kValueRlHead: InitLayers(std::span(&v_head_, 1), seed); break;
    case Part::kPolicySlHead: InitLayers(std::span(&pi_sl_head_, 1), seed); break;
  }
}

const LayerDesc& Network::head_desc(Head head) const {
  switch (head) {
    case Head::kPolicySl: return pi_sl_head_;
    case Head::kPolicyRl: return pi_rl_head_;
    case Head::kValueRl: break;
  }
  return v_head_;
}

void Network::ZeroHead(Head head) {
  const LayerDesc& d = head_desc(head);
  std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(d.offset), d.num_params,
              0.0);
}

}  // namespace nfsp::nn
