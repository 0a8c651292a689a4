// Copyright 2026 The swam-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

#include "support/errors.hpp"
#include "swam/core_model.hpp"

namespace swam {
namespace {

using testing::error_code;

TunnelId tun(int t, int i, int j) {
  return TunnelId(TenantId{t}, NodeId{i}, NodeId{j});
}

TEST(VlanTagTest, AcceptsUsableRangeOnly) {
  EXPECT_EQ(VlanTag(1).id(), 1);
  EXPECT_EQ(VlanTag(4094).id(), 4094);
  EXPECT_EQ(error_code([] { VlanTag(0); }), ErrorCode::kInvalidVlan);
  EXPECT_EQ(error_code([] { VlanTag(4095); }), ErrorCode::kInvalidVlan);
}

TEST(TunnelIdTest, DirectionMatters) {
  EXPECT_NE(tun(1, 0, 2), tun(1, 2, 0));
  EXPECT_EQ(tun(1, 0, 2).reversed(), tun(1, 2, 0));
  EXPECT_EQ(tun(2, 1, 4).to_string(), "B:1->4");
  EXPECT_EQ(error_code([] { tun(1, 3, 3); }), ErrorCode::kInvalidArgument);
}

TEST(VlanAllocatorTest, DigitEncodingExamples) {
  VlanAllocator a(VlanMode::kDigits);
  EXPECT_EQ(a.encode(tun(1, 0, 2)).id(), 102);
  EXPECT_EQ(a.encode(tun(1, 0, 3)).id(), 103);
  EXPECT_EQ(a.encode(tun(1, 2, 0)).id(), 120);
  EXPECT_EQ(a.encode(tun(1, 3, 0)).id(), 130);
  EXPECT_EQ(a.decode(VlanTag(102)), tun(1, 0, 2));
  EXPECT_EQ(a.decode(VlanTag(130)), tun(1, 3, 0));
}

TEST(VlanAllocatorTest, EncodeIsIdempotent) {
  for (VlanMode mode : {VlanMode::kDigits, VlanMode::kSequential}) {
    VlanAllocator a(mode);
    VlanTag first = a.encode(tun(1, 0, 2));
    EXPECT_EQ(a.encode(tun(1, 0, 2)), first);
    EXPECT_EQ(a.size(), 1);
  }
}

TEST(VlanAllocatorTest, UnknownVlan) {
  VlanAllocator a(VlanMode::kDigits);
  a.encode(tun(1, 0, 2));
  EXPECT_EQ(error_code([&] { a.decode(VlanTag(999)); }), ErrorCode::kUnknownVlan);
}

TEST(VlanAllocatorTest, DigitModeRejectsLargeIds) {
  VlanAllocator a(VlanMode::kDigits);
  EXPECT_EQ(error_code([&] { a.encode(tun(10, 0, 1)); }), ErrorCode::kEncodingOverflow);
  EXPECT_EQ(error_code([&] { a.encode(tun(1, 0, 10)); }), ErrorCode::kEncodingOverflow);
  EXPECT_EQ(a.size(), 0);
}

TEST(VlanAllocatorTest, SequentialStartsAtHundredThenWrapsLow) {
  VlanAllocator a(VlanMode::kSequential);
  EXPECT_EQ(a.encode(tun(1, 0, 1)).id(), 100);
  EXPECT_EQ(a.encode(tun(1, 1, 0)).id(), 101);
  // Fill 100..4094, the next goes to 1.
  int k = 0;
  while (a.size() < kMaxVlanId - 99) {
    a.encode(tun(2 + k / 900, (k % 900) / 30, 30 + (k % 30)));
    ++k;
  }
  EXPECT_EQ(a.encode(tun(20, 0, 1)).id(), 1);
}

TEST(VlanAllocatorTest, BudgetIsEnforced) {
  VlanAllocator a(VlanMode::kSequential, 3);
  a.encode(tun(1, 0, 1));
  a.encode(tun(1, 1, 0));
  a.encode(tun(1, 0, 2));
  EXPECT_EQ(a.remaining(), 0);
  EXPECT_EQ(error_code([&] { a.encode(tun(1, 2, 0)); }), ErrorCode::kCapacityExceeded);
  // Already-allocated tunnels still resolve.
  EXPECT_EQ(a.encode(tun(1, 0, 1)).id(), 100);
}

// Random encode sequences keep the map a bijection.
TEST(VlanAllocatorTest, BijectionUnderRandomSequences) {
  std::mt19937 rng(11);
  for (VlanMode mode : {VlanMode::kDigits, VlanMode::kSequential}) {
    VlanAllocator a(mode);
    std::set<int> tags;
    std::set<TunnelId> tunnels;
    for (int k = 0; k < 2000; ++k) {
      int t = 1 + static_cast<int>(rng() % 9);
      int i = static_cast<int>(rng() % 10);
      int j = static_cast<int>(rng() % 10);
      if (i == j) continue;
      VlanTag v = a.encode(tun(t, i, j));
      EXPECT_EQ(a.decode(v), tun(t, i, j));
      tunnels.insert(tun(t, i, j));
      tags.insert(v.id());
    }
    EXPECT_EQ(tags.size(), tunnels.size());
    EXPECT_EQ(static_cast<std::size_t>(a.size()), tunnels.size());
  }
}

TEST(VlanStackTest, PushPopOrder) {
  Frame f;
  Frame one = push_vlan(f, VlanTag(102));
  EXPECT_EQ(one.vlans.to_string(), "[102]");
  Frame two = push_vlan(one, VlanTag(7));
  EXPECT_EQ(two.vlans.to_string(), "[7,102]");
  EXPECT_EQ(two.vlans.outer().id(), 7);
  EXPECT_EQ(error_code([&] { push_vlan(two, VlanTag(5)); }), ErrorCode::kStackOverflow);
  auto [back, tag] = pop_vlan(two);
  EXPECT_EQ(tag.id(), 7);
  EXPECT_EQ(back, one);
  auto [bare, inner] = pop_vlan(back);
  EXPECT_EQ(inner.id(), 102);
  EXPECT_EQ(bare, f);
  EXPECT_EQ(error_code([&] { pop_vlan(bare); }), ErrorCode::kStackUnderflow);
}

TEST(VlanStackTest, RandomPushPopNeverExceedsTwo) {
  std::mt19937 rng(3);
  Frame f;
  std::vector<int> model;
  for (int k = 0; k < 5000; ++k) {
    if (rng() % 2) {
      int id = 1 + static_cast<int>(rng() % 4094);
      if (model.size() == 2) {
        EXPECT_EQ(error_code([&] { f = push_vlan(f, VlanTag(id)); }),
                  ErrorCode::kStackOverflow);
      } else {
        f = push_vlan(f, VlanTag(id));
        model.insert(model.begin(), id);
      }
    } else if (model.empty()) {
      EXPECT_EQ(error_code([&] { pop_vlan(f); }), ErrorCode::kStackUnderflow);
    } else {
      auto [g, tag] = pop_vlan(f);
      EXPECT_EQ(tag.id(), model.front());
      model.erase(model.begin());
      f = g;
    }
    ASSERT_LE(f.vlans.depth(), 2);
    ASSERT_EQ(f.vlans.depth(), static_cast<int>(model.size()));
  }
}

TEST(ScalingTest, TunnelCountExamples) {
  EXPECT_EQ(tunnel_count(10, 14), 3640);
  EXPECT_EQ(tunnel_count(1, 2), 4);
  EXPECT_EQ(tunnel_count(5, 20), 3800);
}

TEST(ScalingTest, TunnelCountMatchesEnumeration) {
  for (int t = 1; t <= 12; ++t) {
    for (int n = 2; n <= 25; ++n) {
      std::int64_t brute = 0;
      for (int k = 0; k < t; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            if (i != j) brute += 2;  // both directions of each ordered pair
      ASSERT_EQ(tunnel_count(t, n), brute) << "T=" << t << " N=" << n;
    }
  }
}

TEST(ScalingTest, MaxNodes) {
  EXPECT_EQ(max_nodes(10, 4096), 14);
  EXPECT_EQ(max_nodes(5, 4096), 20);
  EXPECT_EQ(max_nodes(1, 4096), 45);
  for (int t = 1; t <= 12; ++t) {
    std::int64_t n = max_nodes(t, 4096);
    EXPECT_LE(tunnel_count(t, n), 4096);
    EXPECT_GT(tunnel_count(t, n + 1), 4096);
  }
}

TEST(ScalingTest, StrictlyIncreasing) {
  for (int t = 1; t < 12; ++t) {
    for (int n = 2; n < 25; ++n) {
      EXPECT_LT(tunnel_count(t, n), tunnel_count(t + 1, n));
      EXPECT_LT(tunnel_count(t, n), tunnel_count(t, n + 1));
    }
  }
}

TEST(MacAddressTest, ParseAndFormat) {
  MacAddress m = MacAddress::parse("02:00:00:00:0A:01");
  EXPECT_EQ(m.to_string(), "02:00:00:00:0a:01");
  EXPECT_TRUE(MacAddress::broadcast().is_broadcast());
  EXPECT_FALSE(m.is_broadcast());
  EXPECT_EQ(error_code([] { MacAddress::parse("02:00:00:00:0a"); }), ErrorCode::kParseError);
  EXPECT_EQ(error_code([] { MacAddress::parse("02-00-00-00-0a-01"); }), ErrorCode::kParseError);
  EXPECT_EQ(MacAddress::from_u64(0x0a01).to_string(), "02:00:00:00:0a:01");
}

TEST(TraceLineTest, Format) {
  Frame f;
  f.src = MacAddress::parse("02:00:00:00:0a:01");
  f.dst = MacAddress::broadcast();
  f.kind = FrameKind::kArpRequest;
  f = push_vlan(push_vlan(f, VlanTag(102)), VlanTag(2));
  EXPECT_EQ(format_trace_line(1500, "s0", "radio0", Direction::kOut, f),
            "t=1500 node=s0 if=radio0 dir=out src=02:00:00:00:0a:01 "
            "dst=ff:ff:ff:ff:ff:ff vlans=[2,102] kind=ARP_REQUEST");
}

TEST(NamesTest, TenantAndNode) {
  EXPECT_EQ(tenant_name(TenantId{1}), "A");
  EXPECT_EQ(tenant_name(TenantId{26}), "Z");
  EXPECT_EQ(tenant_name(TenantId{27}), "T27");
  EXPECT_EQ(node_name(NodeId{4}), "s4");
}

}  // namespace
}  // namespace swam
