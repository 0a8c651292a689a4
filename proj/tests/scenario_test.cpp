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

#include "support/errors.hpp"
#include "swam/presets.hpp"
#include "swam/scenario.hpp"

namespace swam {
namespace {

using testing::error_code;

TEST(ParseHelpersTest, Durations) {
  EXPECT_EQ(parse_duration("60s"), sec(60));
  EXPECT_EQ(parse_duration("50ms"), msec(50));
  EXPECT_EQ(parse_duration("250us"), 250);
  EXPECT_EQ(parse_duration("0.5s"), msec(500));
  EXPECT_EQ(parse_duration("1.25ms"), 1250);
  EXPECT_EQ(parse_duration("0s"), 0);
  for (const char* bad : {"", "5", "ms", "5 parsecs", "-1s", "0.0000001s", "1.2.3s"}) {
    EXPECT_EQ(error_code([&] { parse_duration(bad); }), ErrorCode::kParseError) << bad;
  }
}

TEST(ParseHelpersTest, Rates) {
  EXPECT_EQ(parse_rate("32Mbps"), 32'000'000);
  EXPECT_EQ(parse_rate("800kbps"), 800'000);
  EXPECT_EQ(parse_rate("1Gbps"), 1'000'000'000);
  EXPECT_EQ(parse_rate("1000bps"), 1000);
  EXPECT_EQ(parse_rate("1.5Mbps"), 1'500'000);
  EXPECT_EQ(error_code([] { parse_rate("32MB"); }), ErrorCode::kParseError);
}

TEST(ParseHelpersTest, NodesAndTenants) {
  EXPECT_EQ(parse_node("s3"), NodeId{3});
  EXPECT_EQ(parse_node("s12"), NodeId{12});
  EXPECT_EQ(parse_tenant("A"), TenantId{1});
  EXPECT_EQ(parse_tenant("C"), TenantId{3});
  EXPECT_EQ(error_code([] { parse_node("x3"); }), ErrorCode::kParseError);
  EXPECT_EQ(error_code([] { parse_node("s"); }), ErrorCode::kParseError);
  EXPECT_EQ(error_code([] { parse_tenant("a"); }), ErrorCode::kParseError);
}

TEST(ScenarioTest, KitePreset) {
  Scenario s = load_scenario_or_preset("kite");
  EXPECT_EQ(s.topology.nodes.size(), 5u);
  EXPECT_EQ(s.topology.links.size(), 5u);
  EXPECT_EQ(s.tenants.size(), 2u);
  EXPECT_EQ(s.clients.size(), 3u);
  EXPECT_EQ(s.flows.size(), 3u);
  EXPECT_EQ(s.params.horizon, sec(10));
  EXPECT_EQ(s.params.detection_delay, msec(50));
  EXPECT_EQ(s.topology.links[0].capacity_bps, 50'000'000);
  EXPECT_EQ(s.paths.size(), 2u);
  EXPECT_TRUE(s.paths[0].symmetric);
  EXPECT_EQ(s.clients[1].mac.to_string(), "02:00:00:00:0b:01");
  EXPECT_EQ(s.clients[2].node, NodeId{3});
}

TEST(ScenarioTest, EveryPresetValidatesAndBuilds) {
  for (const PresetFile& p : preset_files()) {
    Scenario s = parse_scenario(p.content, p.name);
    EXPECT_NO_THROW(validate_scenario(s)) << p.name;
    EXPECT_NO_THROW(build_world(s)) << p.name;
  }
}

TEST(ScenarioTest, UnknownPreset) {
  std::string msg;
  EXPECT_EQ(error_code([] { load_scenario_or_preset("no-such-thing"); }, &msg),
            ErrorCode::kParseError);
  EXPECT_NE(msg.find("kite"), std::string::npos);  // lists what exists
}

const char* kMinimal = R"(# tiny
[parameters]
horizon = 2s

[topology]
node s0 wired
node s1
link s0 s1

[tenants]
tenant A vaps=s1 gateways=s0

[clients]
client C1 mac=02:00:00:00:0a:01 tenant=A node=s1

[flows]
flow f client=C1 ping interval=10ms
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

// Error code and message for a broken variant of kMinimal.
std::pair<std::optional<ErrorCode>, std::string> check(const std::string& text) {
  std::string msg;
  auto code = error_code(
      [&] {
        Scenario s = parse_scenario(text, "t.scn");
        validate_scenario(s);
        build_world(s);
      },
      &msg);
  return {code, msg};
}

TEST(ScenarioTest, MinimalBuildsAndRuns) {
  auto [code, msg] = check(kMinimal);
  EXPECT_FALSE(code) << msg;
  Scenario s = parse_scenario(kMinimal, "t.scn");
  EXPECT_EQ(s.topology.links[0].latency, msec(1));
  EXPECT_EQ(s.topology.links[0].capacity_bps, 0);
  EXPECT_TRUE(s.flows[0].config.autostart);
}

TEST(ScenarioTest, SyntaxErrorsCarryLineNumbers) {
  auto [c1, m1] = check(replace(kMinimal, "link s0 s1", "link s0"));
  EXPECT_EQ(c1, ErrorCode::kParseError);
  EXPECT_EQ(m1.rfind("t.scn:8:", 0), 0u) << m1;

  auto [c2, m2] = check(replace(kMinimal, "[flows]", "[flowz]"));
  EXPECT_EQ(c2, ErrorCode::kParseError);
  EXPECT_EQ(m2.rfind("t.scn:16:", 0), 0u) << m2;

  auto [c3, m3] = check(replace(kMinimal, "horizon = 2s", "horizon = soon"));
  EXPECT_EQ(c3, ErrorCode::kParseError);
  EXPECT_EQ(m3.rfind("t.scn:3:", 0), 0u) << m3;

  auto [c4, m4] = check(replace(kMinimal, "interval=10ms", "interval=10ms color=red"));
  EXPECT_EQ(c4, ErrorCode::kParseError);
}

TEST(ScenarioTest, ValidationErrors) {
  struct Case {
    std::string from, to, needle;
  };
  std::vector<Case> cases{
      {"gateways=s0", "gateways=", "tenant A has no gateway"},
      {"node s1\n", "node s1\nnode s1\n", "duplicate"},
      {"link s0 s1", "link s0 s7", "unknown node"},
      {"link s0 s1", "link s0 s1\nlink s1 s0", "duplicate"},
      {"link s0 s1", "link s0 s0", "itself"},
      {"node s0 wired", "node s0", "wired"},
      {"node=s1", "node=s0", "placed on s0, which has no vap for tenant A"},
      {"tenant=A", "tenant=B", "B"},
      {"client=C1", "client=C9", "C9"},
      {"flow f client=C1 ping interval=10ms",
       "flow f client=C1 ping interval=10ms\n[timeline]\nat 5s link_down s0 s1",
       "beyond the horizon"},
      {"flow f client=C1 ping interval=10ms",
       "flow f client=C1 ping interval=10ms\n[timeline]\nat 1s link_down s0 s1\nat 0.5s link_up s0 s1",
       "order"},
  };
  for (const Case& c : cases) {
    auto [code, msg] = check(replace(kMinimal, c.from, c.to));
    EXPECT_EQ(code, ErrorCode::kValidationError) << c.to << ": " << msg;
    EXPECT_NE(msg.find(c.needle), std::string::npos) << msg;
    EXPECT_EQ(msg.rfind("t.scn:", 0), 0u) << msg;
  }
}

TEST(ScenarioTest, GatewayErrorPointsAtTenantLine) {
  auto [code, msg] = check(replace(kMinimal, "gateways=s0", "gateways="));
  EXPECT_EQ(msg.rfind("t.scn:11: tenant A has no gateway", 0), 0u) << msg;
}

TEST(ScenarioTest, TimelineParsing) {
  std::string text = std::string(kMinimal) +
                     "\n[timeline]\n"
                     "at 0.5s link_down s0 s1\n"
                     "at 600ms link_up s0 s1\n"
                     "at 1s handover C1 s1 gap=5ms\n"
                     "at 1s detach C1\n"
                     "at 1.5s attach C1 s1\n"
                     "at 1.6s flow_stop f\n";
  Scenario s = parse_scenario(text, "t.scn");
  validate_scenario(s);
  ASSERT_EQ(s.timeline.size(), 6u);
  EXPECT_EQ(s.timeline[0].kind, ActionKind::kLinkDown);
  EXPECT_EQ(s.timeline[0].at, msec(500));
  EXPECT_EQ(s.timeline[2].kind, ActionKind::kHandover);
  EXPECT_EQ(s.timeline[2].gap, msec(5));
  EXPECT_EQ(s.timeline[2].name, "C1");
  EXPECT_EQ(s.timeline[5].kind, ActionKind::kFlowStop);
}

TEST(ScenarioTest, FlowStartActionDisablesAutostart) {
  std::string text = replace(kMinimal, "interval=10ms", "interval=10ms") +
                     "\n[timeline]\nat 1s flow_start f\n";
  Scenario s = parse_scenario(text, "t.scn");
  EXPECT_FALSE(s.flows[0].config.autostart);
}

TEST(ScenarioTest, ParametersOverride) {
  std::string text = replace(kMinimal, "horizon = 2s",
                             "horizon = 2s\nvlan_mode = digits\nllc_xid = off\n"
                             "mac_aging = 300ms\njitter = 100us\nseed = 9");
  Scenario s = parse_scenario(text, "t.scn");
  EXPECT_EQ(s.params.vlan_mode, VlanMode::kDigits);
  EXPECT_FALSE(s.params.llc_xid);
  EXPECT_EQ(s.params.mac_aging, msec(300));
  EXPECT_EQ(s.params.jitter, 100);
  EXPECT_EQ(s.params.seed, 9u);
}

}  // namespace
}  // namespace swam
