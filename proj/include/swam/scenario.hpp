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

// Scenario files: sectioned text (see docs/scenario-format.md), parsing,
// validation and construction of a ready-to-run World.

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swam/simkit.hpp"

namespace swam {

struct TenantSpec {
  TenantId id;
  std::vector<NodeId> vaps;
  std::vector<NodeId> gateways;
  std::optional<MacAddress> home_mac;
  int line = 0;
};

struct RootSpec {
  TenantId tenant;
  NodeId node;
  NodeId root;
  int line = 0;
};

struct PathSpec {
  TenantId tenant;
  Path path;
  bool symmetric = false;
  int line = 0;
};

struct ClientSpec {
  std::string name;
  MacAddress mac;
  TenantId tenant;
  std::optional<NodeId> node;  // initial attachment at t=0
  int line = 0;
};

struct FlowSpec {
  FlowConfig config;
  std::string client;
  bool has_start = false;
  int line = 0;
};

enum class ActionKind {
  kLinkDown,
  kLinkUp,
  kUpdateRoot,
  kHandover,
  kAttach,
  kDetach,
  kFlowStart,
  kFlowStop,
};

struct TimelineAction {
  SimTime at = 0;
  ActionKind kind = ActionKind::kLinkDown;
  NodeId a;  // link end / node / handover target
  NodeId b;  // link end / new root
  TenantId tenant;
  std::string name;  // client or flow
  SimTime gap = 0;
  int line = 0;
};

struct Scenario {
  std::string name;
  WorldConfig params;
  TopologySpec topology;
  std::vector<TenantSpec> tenants;
  std::vector<RootSpec> roots;
  std::vector<PathSpec> paths;
  std::vector<ClientSpec> clients;
  std::vector<FlowSpec> flows;
  std::vector<TimelineAction> timeline;
};

// Throws kParseError (syntax) or kValidationError (references, ranges);
// messages start with "<name>:<line>:".
Scenario parse_scenario(std::string_view text, const std::string& name);
void validate_scenario(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);
// A file path, or the name of a built-in preset (kite, exp1, ...).
Scenario load_scenario_or_preset(const std::string& ref);

// Provisions tenants, clients, flows and the timeline.
std::unique_ptr<World> build_world(const Scenario& s);

// "60s", "50ms", "250us", "0.5s"; throws kParseError.
SimTime parse_duration(std::string_view text);
// "32Mbps", "50Mbps", "800kbps", "1Gbps", "1000bps".
std::int64_t parse_rate(std::string_view text);
// "s3" -> NodeId{3}.
NodeId parse_node(std::string_view text);
// "A" -> TenantId{1}.
TenantId parse_tenant(std::string_view text);

}  // namespace swam
