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

// The control plane: tenant provisioning, tunnel paths and backups, root
// assignment with loop-avoiding drop rules, reaction to link failures and
// client mobility. Every operation applies its changes to the node fabric
// immediately and returns them; the simulation decides when to call it.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "swam/core_model.hpp"
#include "swam/datapath.hpp"
#include "swam/substrate.hpp"

namespace swam {

using Path = std::vector<NodeId>;
using Fabric = std::map<NodeId, SwamNode>;

std::string path_to_string(const Path& p);  // [s1,s2,s4]

struct TenantPresence {
  TenantId tenant;
  std::set<NodeId> nodes;     // nodes with a vap
  std::set<NodeId> gateways;  // wired nodes with a tun_if
  std::map<NodeId, NodeId> root_of;

  // Nodes holding a tenant bridge: vap nodes plus gateways.
  std::set<NodeId> bridge_nodes() const;
};

enum class PathRole { kPrimary, kBackup };

struct PlanEntry {
  VlanTag vlan;
  Path path;  // installed path, empty while suspended
  std::optional<Path> backup;
  PathRole active = PathRole::kPrimary;
  bool suspended = false;
};

struct RuleChange {
  enum class Op { kAdd, kRemove };

  SimTime time = 0;
  NodeId node;
  std::string bridge;  // br_int, br_bh, br_A, ...
  Op op = Op::kAdd;
  std::string detail;

  // t=<us> node=<id> bridge=<name> op=<add|del> <rule>
  std::string to_string() const;
  bool is_drop_rule() const;
};

struct ControllerLimits {
  int vaps_per_radio = 5;
  int max_tenants = 10;
};

struct ControllerState {
  Topology view;  // the controller's picture of link states
  VlanAllocator allocator;
  std::map<TenantId, TenantPresence> presence;
  std::map<TunnelId, PlanEntry> plan;
  std::map<TunnelId, Path> pinned;
  ControllerLimits limits;
};

// Registers a tenant with its wired gateways, creating tun_if ports and the
// tunnel mesh between them. Throws kNotAGateway for unwired nodes.
std::vector<RuleChange> declare_tenant(ControllerState& cs, Fabric& fabric,
                                       TenantId tenant,
                                       const std::set<NodeId>& gateways,
                                       SimTime now);

// Creates the vap (and bridge, tunnels, paths and drop rules when the node
// is new to the tenant). `root` defaults to the nearest gateway. Idempotent.
// Throws kVapCapExceeded, kCapacityExceeded (atomically), kNotAGateway.
std::vector<RuleChange> provision_presence(
    ControllerState& cs, Fabric& fabric, TenantId tenant, NodeId node,
    SimTime now, std::optional<NodeId> root = std::nullopt);

// Fixes the primary path of one tunnel before it is provisioned.
void pin_path(ControllerState& cs, const TunnelId& t, const Path& path);

// Minimum hops over UP links, lexicographically smallest among equals.
// Throws kDisconnected.
Path compute_path(const Topology& topo, NodeId src, NodeId dst);
std::optional<Path> shortest_path(const Topology& topo, NodeId src, NodeId dst,
                                  const std::set<LinkKey>& avoid);
std::optional<Path> compute_backup(const Topology& topo, const TunnelId& t,
                                   const Path& primary);

// Throws kDisconnected when a hop is not an UP link in the controller view.
std::vector<RuleChange> install_tunnel_path(ControllerState& cs,
                                            Fabric& fabric, const TunnelId& t,
                                            const Path& path, SimTime now);

// Throws kNotAGateway.
std::vector<RuleChange> apply_root(ControllerState& cs, Fabric& fabric,
                                   TenantId tenant, NodeId node, NodeId root,
                                   SimTime now);

struct RootUpdate {
  std::vector<RuleChange> changes;
  std::vector<Frame> spoofed_arps;  // inject at the node's tenant vap
};

RootUpdate update_tenant_root(ControllerState& cs, Fabric& fabric,
                              TenantId tenant, NodeId node, NodeId new_root,
                              std::span<const MacAddress> attached,
                              SimTime now);

struct RerouteReport {
  std::vector<RuleChange> changes;
  std::vector<TunnelId> to_backup;
  std::vector<TunnelId> recomputed;
  std::vector<TunnelId> suspended;
  std::vector<TunnelId> restored;
};

RerouteReport on_link_failure(ControllerState& cs, Fabric& fabric,
                              LinkKey link, SimTime now);
// Restores suspended tunnels and refreshes missing backups. Working
// tunnels stay where they are.
RerouteReport on_link_recovery(ControllerState& cs, Fabric& fabric,
                               LinkKey link, SimTime now);

// The spoofed broadcast ARP the node agent injects for a new client.
Frame on_client_attach(const MacAddress& mac);

// Expected br_int drop rules of one node, for checks and dumps.
std::vector<IntRule> desired_drop_rules(const ControllerState& cs,
                                        const Fabric& fabric, TenantId tenant,
                                        NodeId node);

}  // namespace swam
