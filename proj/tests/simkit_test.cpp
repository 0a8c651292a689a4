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

#include <algorithm>
#include <random>

#include "support/errors.hpp"
#include "swam/presets.hpp"
#include "swam/scenario.hpp"
#include "swam/simkit.hpp"

namespace swam {
namespace {

using testing::error_code;

TEST(EventQueueTest, TimeThenInsertionOrder) {
  std::mt19937 rng(9);
  EventQueue q;
  std::vector<std::pair<SimTime, int>> pushed;
  for (int k = 0; k < 2000; ++k) {
    SimTime t = static_cast<SimTime>(rng() % 50);
    q.push(t, EventKind::kScenarioAction, Action{[] {}});
    pushed.emplace_back(t, k);
  }
  std::stable_sort(pushed.begin(), pushed.end(),
                   [](auto& a, auto& b) { return a.first < b.first; });
  std::uint64_t last_seq = 0;
  for (std::size_t i = 0; i < pushed.size(); ++i) {
    Event e = q.pop();
    ASSERT_EQ(e.time, pushed[i].first);
    if (i && e.time == pushed[i - 1].first) {
      ASSERT_GT(e.seq, last_seq);
    }
    last_seq = e.seq;
  }
  EXPECT_TRUE(q.empty());
}

TEST(FlowTest, Offsets) {
  FlowConfig ping;
  ping.kind = FlowKind::kPing;
  ping.interval = msec(5);
  EXPECT_EQ(flow_offset(ping, 0), 0);
  EXPECT_EQ(flow_offset(ping, 3), msec(15));
  EXPECT_EQ(nominal_interval(ping), msec(5));

  FlowConfig cbr;
  cbr.kind = FlowKind::kCbr;
  cbr.rate_bps = 32'000'000;
  cbr.packet_bytes = 1250;  // 10 000 bits -> 312.5 us
  EXPECT_EQ(nominal_interval(cbr), 312);
  EXPECT_EQ(flow_offset(cbr, 2), 625);
  EXPECT_EQ(flow_offset(cbr, 32'000), sec(10));  // no drift from rounding
}

MetricStore store_with_ping(std::vector<SimTime> receipts, SimTime interval = msec(5)) {
  MetricStore m;
  FlowMetrics f;
  f.config.name = "p";
  f.config.kind = FlowKind::kPing;
  f.config.interval = interval;
  for (std::size_t i = 0; i < receipts.size(); ++i) {
    f.rtt.push_back(RttSample{receipts[i], msec(2), receipts[i] - msec(1), i});
  }
  m.flows.push_back(f);
  return m;
}

TEST(OutageTest, LargestGapMinusInterval) {
  MetricStore m = store_with_ping({0, 5000, 10000, 200000, 205000, 900000, 905000});
  EXPECT_EQ(outage_duration(m, "p"), 695000 - 5000);
  EXPECT_EQ(outage_duration(m, "p", std::nullopt, 300000), 190000 - 5000);
  EXPECT_EQ(outage_duration(m, "p", 200001), 690000);
  EXPECT_EQ(outage_duration(m, "p", 901000), 0);  // window empty
  EXPECT_EQ(outage_duration(store_with_ping({0, 5000, 10000}), "p"), 0);
  EXPECT_EQ(error_code([] { outage_duration(store_with_ping({7}), "p"); }),
            ErrorCode::kNoSamples);
  EXPECT_EQ(error_code([&] { outage_duration(m, "nope"); }), ErrorCode::kInvalidArgument);
}

TEST(OutageTest, MatchesBruteForceOnRandomSeries) {
  std::mt19937 rng(21);
  for (int round = 0; round < 200; ++round) {
    std::vector<SimTime> t{0};
    int n = 2 + static_cast<int>(rng() % 40);
    for (int i = 1; i < n; ++i) t.push_back(t.back() + 1 + static_cast<SimTime>(rng() % 20000));
    MetricStore m = store_with_ping(t);
    SimTime lo = static_cast<SimTime>(rng() % (t.back() + 1));
    SimTime hi = lo + static_cast<SimTime>(rng() % (t.back() + 1));
    SimTime worst = 0;
    for (std::size_t i = 1; i < t.size(); ++i)
      if (t[i] >= lo && t[i] < hi) worst = std::max(worst, t[i] - t[i - 1]);
    ASSERT_EQ(outage_duration(m, "p", lo, hi), std::max<SimTime>(0, worst - msec(5)));
  }
}

TEST(TunnelUpdateTest, FirstReplyAfterAttach) {
  MetricStore m = store_with_ping({sec(30) - 1000, sec(30) + 500, sec(30) + 6000});
  // Receipts minus 1 ms: the first reply leaving the home network after 30 s.
  EXPECT_EQ(tunnel_update_time(m, "p", sec(30)), 5000);
  EXPECT_EQ(error_code([&] { tunnel_update_time(m, "p", sec(40)); }), ErrorCode::kNoSamples);
}

TEST(CsvTest, HeadersAndRows) {
  MetricStore m = store_with_ping({1000, 6000});
  m.horizon = sec(1);
  m.events.push_back({10, "link_down", "s1-s3"});
  m.totals.drops[static_cast<int>(DropCause::kDeadLink)] = 4;
  EXPECT_EQ(rtt_csv(m), "flow,t_us,rtt_us\np,1000,2000\np,6000,2000\n");
  EXPECT_EQ(events_csv(m), "t_us,kind,detail\n10,link_down,s1-s3\n");
  std::string drops = drops_csv(m);
  EXPECT_EQ(drops.rfind("cause,count\n", 0), 0u);
  EXPECT_NE(drops.find("dead-link,4\n"), std::string::npos);
  EXPECT_EQ(std::count(drops.begin(), drops.end(), '\n'), kDropCauseCount + 1);
  EXPECT_EQ(throughput_csv(MetricStore{}), "flow,bin_start_us,bps\n");
}

TEST(ThroughputTest, BinsAtHomeNetwork) {
  MetricStore m;
  FlowMetrics f;
  f.config.name = "c";
  f.config.kind = FlowKind::kCbr;
  f.config.rate_bps = 8000;
  f.config.packet_bytes = 100;
  for (int i = 0; i < 25; ++i) {
    f.hn_arrivals.push_back(msec(100) * i);
    f.hn_bytes.push_back(100);
  }
  m.flows.push_back(f);
  auto s = throughput_series(m, "c", sec(1));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_DOUBLE_EQ(s[0].second, 8000.0);
  EXPECT_DOUBLE_EQ(s[2].second, 4000.0);
  EXPECT_EQ(error_code([&] { throughput_series(m, "c", 0); }), ErrorCode::kInvalidArgument);
}

std::unique_ptr<World> kite_with(const std::string& timeline, SimTime horizon = sec(3)) {
  std::string text = *preset_text("kite");
  text += "\n[timeline]\n" + timeline;
  Scenario s = parse_scenario(text, "kite-test");
  s.params.horizon = horizon;
  validate_scenario(s);
  auto w = build_world(s);
  w->run();
  return w;
}

std::optional<SimTime> first_event(const World& w, const std::string& kind) {
  for (const EventRecord& e : w.metrics().events)
    if (e.kind == kind) return e.t;
  return std::nullopt;
}

TEST(WorldTimingTest, LinkFailureReachesRulesAfterDetectionAndControl) {
  auto w = kite_with("at 2s link_down s1 s2\n");
  EXPECT_EQ(first_event(*w, "link_down"), sec(2));
  EXPECT_EQ(first_event(*w, "link_notify"), sec(2) + msec(50));
  EXPECT_EQ(first_event(*w, "reroute"), sec(2) + msec(100));
  for (const RuleChange& c : w->metrics().rule_log) {
    if (c.time > 0) {
      EXPECT_EQ(c.time, sec(2) + msec(100));
    }
  }
  EXPECT_TRUE(w->metrics().conserved());
}

TEST(WorldTimingTest, RootUpdateRulesThenSpoofedArp) {
  auto w = kite_with("at 2s update_root B s1 s0\n");
  EXPECT_EQ(first_event(*w, "root_rules"), sec(2) + msec(50));
  EXPECT_EQ(first_event(*w, "spoofed_arp"), sec(2) + msec(100));
  EXPECT_EQ(w->controller().presence.at(TenantId{2}).root_of.at(NodeId{1}), NodeId{0});
}

TEST(WorldTimingTest, AttachSendsXidThenAgentArp) {
  auto w = kite_with("at 2s handover STA_A1 s2\n");
  bool saw_xid = false;
  for (const EventRecord& e : w->metrics().events) {
    if (e.kind == "llc_xid" && e.t == sec(2)) saw_xid = true;
  }
  EXPECT_TRUE(saw_xid);
  SimTime agent = 0;
  for (const EventRecord& e : w->metrics().events)
    if (e.kind == "agent_arp" && e.detail == "STA_A1 at s2") agent = e.t;
  EXPECT_EQ(agent, sec(2) + msec(20));
  EXPECT_TRUE(w->admitted(*w->client_mac("STA_A1")));
}

TEST(WorldTest, PingRttOnIdleKite) {
  auto w = kite_with("", sec(2));
  // Two radio hops each way at 1 ms.
  for (const char* flow : {"ping_A1", "ping_B1"}) {
    const FlowMetrics& f = w->metrics().flow(flow);
    ASSERT_FALSE(f.rtt.empty()) << flow;
    for (const RttSample& s : f.rtt) ASSERT_EQ(s.rtt, msec(4)) << flow;
  }
  // s3 sits one hop from s4.
  for (const RttSample& s : w->metrics().flow("ping_B2").rtt) ASSERT_EQ(s.rtt, msec(2));
  EXPECT_TRUE(w->metrics().conserved());
  EXPECT_EQ(w->metrics().in_flight, 0);
}

TEST(WorldTest, RunIsDeterministic) {
  auto a = kite_with("at 1500ms link_down s1 s2\n");
  auto b = kite_with("at 1500ms link_down s1 s2\n");
  EXPECT_EQ(rtt_csv(a->metrics()), rtt_csv(b->metrics()));
  EXPECT_EQ(events_csv(a->metrics()), events_csv(b->metrics()));
  EXPECT_EQ(a->dump_rules(), b->dump_rules());
}

TEST(WorldTest, DefaultHomeMac) {
  EXPECT_EQ(default_home_mac(TenantId{1}).to_string(), "02:fe:00:00:00:01");
  EXPECT_EQ(home_port_name(NodeId{0}), "gw_s0");
}

}  // namespace
}  // namespace swam
