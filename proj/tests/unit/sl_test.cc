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

#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "nfsp/common/error.h"
#include "nfsp/sl/reservoir.h"
#include "nfsp/sl/sl_update.h"
#include "test_util.h"

namespace nfsp::sl {
namespace {

constexpr double kTol = 1e-10;

void Offer(ReservoirBuffer& buf, double tag) {
  const double s[1] = {tag};
  const std::uint8_t legal[2] = {1, 1};
  const double d[2] = {0.5, 0.5};
  buf.Insert(s, legal, d);
}

double Kl(std::span<const double> p, std::span<const double> q) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

TEST_SUITE("sl") {
  TEST_CASE("first capacity offers are always stored") {
    ReservoirBuffer buf(512, 1, 2, 1);
    for (int i = 0; i < 512; ++i) Offer(buf, i);
    CHECK(buf.size() == 512);
    CHECK(buf.offered() == 512);
    for (int i = 0; i < 512; ++i) CHECK(buf.id(i) == i);
  }

  TEST_CASE("buffer never exceeds capacity and counts every offer") {
    ReservoirBuffer buf(16, 1, 2, 3);
    for (int i = 0; i < 1000; ++i) {
      Offer(buf, i);
      CHECK(buf.size() == std::min<std::int64_t>(i + 1, 16));
      CHECK(buf.offered() == i + 1);
    }
  }

  TEST_CASE("capacity one keeps the second of two offers half the time") {
    const int trials = 100000;
    int second = 0;
    for (int t = 0; t < trials; ++t) {
      ReservoirBuffer buf(1, 1, 2, DeriveSeed(99, t));
      Offer(buf, 0);
      Offer(buf, 1);
      second += buf.id(0) == 1;
    }
    const double sigma = std::sqrt(trials * 0.25);
    CHECK(std::abs(second - trials * 0.5) <= 3 * sigma);
  }

  TEST_CASE("residency is uniform over the stream") {
    const int capacity = 32, offers = 1024, trials = 20000;
    std::vector<std::int64_t> counts(offers, 0);
    for (int t = 0; t < trials; ++t) {
      ReservoirBuffer buf(capacity, 1, 2, DeriveSeed(7, t));
      for (int i = 0; i < offers; ++i) Offer(buf, i);
      for (int s = 0; s < capacity; ++s) ++counts[buf.id(s)];
    }
    const double expected = static_cast<double>(trials) * capacity / offers;
    CHECK(testing::ChiSquareStatistic(counts, expected) <
          testing::ChiSquareCritical01(offers - 1));
  }

  TEST_CASE("sampling draws residents uniformly with replacement") {
    ReservoirBuffer buf(512, 1, 2, 5);
    for (int i = 0; i < 512; ++i) Offer(buf, i);
    std::vector<std::int64_t> counts(512, 0);
    const int draws = 400;
    for (int r = 0; r < draws; ++r) {
      const SlBatch b = buf.Sample(512);
      for (int i = 0; i < 512; ++i) ++counts[static_cast<int>(b.states(i, 0))];
    }
    const double n = 512.0 * draws, p = 1.0 / 512;
    const double sigma = std::sqrt(n * p * (1 - p));
    int outside = 0;
    for (auto c : counts) outside += std::abs(c - n * p) > 3 * sigma;
    // About 0.3% of items fall outside 3 sigma by chance.
    CHECK(outside <= 6);
    CHECK(testing::ChiSquareStatistic(counts, n * p) < testing::ChiSquareCritical01(511));
  }

  TEST_CASE("sampling edge cases") {
    ReservoirBuffer buf(4, 1, 2, 5);
    CHECK(buf.Sample(0).states.rows() == 0);
    CHECK_THROWS_AS(buf.Sample(3), MissingDataError);
    Offer(buf, 42);
    const SlBatch b = buf.Sample(16);
    for (int i = 0; i < 16; ++i) CHECK(b.states(i, 0) == 42.0);
    const double wrong[3] = {0, 0, 0};
    const std::uint8_t legal[2] = {1, 1};
    CHECK_THROWS_AS(buf.Insert(wrong, legal, std::span(wrong, 2)), std::invalid_argument);
  }

  TEST_CASE("snapshot round trip restores contents and stream position") {
    ReservoirBuffer buf(8, 1, 2, 11);
    for (int i = 0; i < 40; ++i) Offer(buf, i);
    std::stringstream io;
    buf.Write(io);
    ReservoirBuffer back = ReservoirBuffer::Read(io);
    CHECK(back.size() == buf.size());
    CHECK(back.offered() == buf.offered());
    for (int s = 0; s < 8; ++s) CHECK(back.id(s) == buf.id(s));
    for (int i = 40; i < 100; ++i) {
      Offer(buf, i);
      Offer(back, i);
    }
    for (int s = 0; s < 8; ++s) CHECK(back.id(s) == buf.id(s));
  }

  TEST_CASE("cross entropy closed forms") {
    const nn::Matrix u9 = nn::Matrix::Constant(1, 9, 1.0 / 9);
    CHECK(std::abs(SlLoss(u9, u9).value - std::log(9.0)) <= kTol);
    nn::Matrix one(1, 2), half(1, 2);
    one << 1.0, 0.0;
    half << 0.5, 0.5;
    CHECK(std::abs(SlLoss(one, half).value - std::log(2.0)) <= kTol);
    CHECK(SlLoss(one, one).value == 0.0);
  }

  TEST_CASE("cross entropy bounds the target entropy") {
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
      const nn::Matrix t = testing::RandomDistributions(3, 4, rng);
      const nn::Matrix p = testing::RandomDistributions(3, 4, rng);
      double h = 0.0;
      for (int r = 0; r < 3; ++r) {
        for (int a = 0; a < 4; ++a) h -= t(r, a) * std::log(t(r, a)) / 3;
      }
      CHECK(SlLoss(t, p).value >= h - kTol);
      CHECK(std::abs(SlLoss(t, t).value - h) <= kTol);
    }
  }

  TEST_CASE("sl update is a no-op on an empty buffer") {
    nn::Network net = nn::Network::Build(nn::ArchSpec::Mlp(1, 1, 4, 2), 1);
    const nn::Network before = net;
    ReservoirBuffer buf(4, 1, 2, 1);
    const SlMetrics m = SlUpdate(net, buf, rl::Hyperparams());
    CHECK(m.skipped);
    CHECK(std::equal(net.params().begin(), net.params().end(), before.params().begin()));
  }

  TEST_CASE("sl update reports the loss of its sample and spares the RL tower") {
    nn::Network net = nn::Network::Build(nn::ArchSpec::Mlp(3, 1, 6, 3), 2);
    const nn::Network before = net;
    rl::Hyperparams h;
    h.sl_sample = 32;
    ReservoirBuffer a(64, 3, 3, 21);
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
      const double s[3] = {UniformUnit(rng), UniformUnit(rng), UniformUnit(rng)};
      const std::uint8_t legal[3] = {1, 1, 1};
      const nn::Matrix d = testing::RandomDistributions(1, 3, rng);
      a.Insert(s, legal, std::span(d.data(), 3));
    }
    ReservoirBuffer b = a;
    const SlBatch drawn = b.Sample(h.sl_sample);
    const double expected =
        SlLoss(drawn.targets, net.Forward({drawn.states, drawn.legal}, nn::Head::kPolicySl).policy_sl)
            .value;
    const SlMetrics m = SlUpdate(net, a, h);
    CHECK(std::abs(m.loss - expected) <= kTol);
    for (nn::Part part : {nn::Part::kRlBody, nn::Part::kPolicyRlHead, nn::Part::kValueRlHead}) {
      const auto x = before.part_params(part);
      const auto y = net.part_params(part);
      CHECK(std::equal(x.begin(), x.end(), y.begin()));
    }
    const auto x = before.part_params(nn::Part::kPolicySlHead);
    const auto y = net.part_params(nn::Part::kPolicySlHead);
    CHECK_FALSE(std::equal(x.begin(), x.end(), y.begin()));
  }

  TEST_CASE("repeated updates on one stored pair shrink the KL divergence monotonically") {
    nn::Network net = nn::Network::Build(nn::ArchSpec::Mlp(2, 1, 8, 3), 6);
    rl::Hyperparams h;
    h.lr_sl = 0.05;
    h.sl_sample = 8;
    ReservoirBuffer buf(4, 2, 3, 1);
    const double s[2] = {0.3, -0.7};
    const std::uint8_t legal[3] = {1, 1, 1};
    const double target[3] = {0.6, 0.3, 0.1};
    buf.Insert(s, legal, target);
    const nn::Inputs in{buf.Sample(1).states, {}};
    auto kl = [&] {
      const nn::Matrix p = net.Forward(in, nn::Head::kPolicySl).policy_sl;
      return Kl(target, std::span(p.data(), 3));
    };
    double prev = kl();
    for (int i = 0; i < 300; ++i) {
      SlUpdate(net, buf, h);
      const double now = kl();
      CHECK(now <= prev + 1e-15);
      prev = now;
    }
    CHECK(prev < 1e-3);
  }
}

}  // namespace
}  // namespace nfsp::sl
