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

#include "nfsp/train/transfer.h"

#include <algorithm>
#include <stdexcept>

#include "nfsp/common/random.h"

namespace nfsp::train {

nn::Network PretrainTransfer(const nn::Network& source, const nn::ArchSpec& target,
                             const TransferOptions& options) {
  if (!(source.arch() == target)) {
    throw std::invalid_argument("pretrain transfer: architecture mismatch (source " +
                                nn::ToString(source.arch()) + ", target " +
                                nn::ToString(target) + ")");
  }
  nn::Network out = nn::Network::Build(target, options.seed);
  out.CopyPartFrom(source, nn::Part::kRlBody, nn::Part::kRlBody);
  out.CopyPartFrom(source, nn::Part::kPolicyRlHead, nn::Part::kPolicyRlHead);
  if (options.copy_value) out.CopyPartFrom(source, nn::Part::kValueRlHead, nn::Part::kValueRlHead);
  if (options.copy_sl) {
    out.CopyPartFrom(source, nn::Part::kRlBody, nn::Part::kSlBody);
    out.CopyPartFrom(source, nn::Part::kPolicyRlHead, nn::Part::kPolicySlHead);
  }
  return out;
}

PretrainResult PretrainBundles(
    const TrainConfig& nfsp_config, std::int64_t selfplay_updates, TransferOptions options,
    const std::function<void(const std::vector<UpdateRecord>&)>& on_round) {
  TrainConfig sp = nfsp_config;
  sp.mode = Mode::kSelfPlay;
  sp.max_updates = selfplay_updates;
  sp.max_episodes = 0;
  NfspRunner runner(sp);
  while (runner.updates() < sp.max_updates) {
    const auto records = runner.Round();
    if (on_round) on_round(records);
  }
  TrainConfig nf = nfsp_config;
  nf.mode = Mode::kNfsp;
  PretrainResult out{runner.bundles().front().net, MakeBundles(nf)};
  const auto& source = runner.bundles();
  for (std::size_t b = 0; b < out.bundles.size(); ++b) {
    options.seed = DeriveSeed(nfsp_config.seed, 0x7866ULL + b);
    out.bundles[b].net =
        PretrainTransfer(source[std::min(b, source.size() - 1)].net, nf.arch, options);
  }
  return out;
}

}  // namespace nfsp::train
