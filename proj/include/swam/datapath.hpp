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

// Per-node packet pipeline: tenant learning bridges, the integration bridge
// (br_int) that binds tenant ports to tunnel VLANs, the backhaul bridge
// (br_bh) that switches tunnels by inner VLAN, and the per-radio MUX that
// adds the next-hop LLID as the outer tag.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swam/core_model.hpp"

namespace swam {

enum class BridgeKind { kTenant, kInt, kBh, kMux };

struct BridgeId {
  BridgeKind kind = BridgeKind::kInt;
  int index = 0;  // tenant id for kTenant, radio index for kMux

  static BridgeId tenant(TenantId t) { return {BridgeKind::kTenant, t.value}; }
  static BridgeId integration() { return {BridgeKind::kInt, 0}; }
  static BridgeId backhaul() { return {BridgeKind::kBh, 0}; }
  static BridgeId mux(int radio) { return {BridgeKind::kMux, radio}; }

  auto operator<=>(const BridgeId&) const = default;
};

// br_A, br_int, br_bh, mux0
std::string bridge_name(BridgeId b);

struct PortRef {
  NodeId node;
  BridgeId bridge;
  std::string name;

  auto operator<=>(const PortRef&) const = default;
};

std::string vap_port_name(TenantId t, NodeId n);                 // vap_A_1
std::string tun_if_port_name(TenantId t);                        // tun_if_A
std::string backhaul_port_name(TenantId t, NodeId self, NodeId peer);  // p_A_0_2
std::string veth_to_name(NodeId peer);                           // veth_to_s2
std::string veth_from_name(NodeId peer);                         // veth_from_s2
inline constexpr const char* kPatchBh = "patch_bh";              // br_int side
inline constexpr const char* kRadioName = "radio0";

PortRef patch_bh_port(NodeId n);

enum class PortRole { kVap, kTunIf, kBackhaul, kOther };
PortRole port_role(const std::string& name);

struct MacEntry {
  PortRef port;
  SimTime last_seen = 0;
};

class MacTable {
 public:
  explicit MacTable(std::optional<SimTime> max_age = std::nullopt)
      : max_age_(max_age) {}

  // nullptr when unknown or aged out.
  const PortRef* lookup(const MacAddress& mac, SimTime now) const;
  // True when the binding changed (new MAC or different port).
  bool learn(const MacAddress& mac, const PortRef& port, SimTime now);
  void forget(const MacAddress& mac) { entries_.erase(mac); }

  const std::map<MacAddress, MacEntry>& entries() const { return entries_; }
  std::optional<SimTime> max_age() const { return max_age_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::optional<SimTime> max_age_;
  std::map<MacAddress, MacEntry> entries_;
};

struct MacChange {
  MacAddress mac;
  std::optional<PortRef> previous;
  PortRef current;
};

struct BridgeResult {
  std::vector<PortRef> out;
  std::optional<MacChange> learned;
};

// Classical learning bridge: learn src on in_port, forward to the known port,
// flood otherwise, never send back out of in_port.
BridgeResult bridge_forward(MacTable& table, const Frame& f,
                            const PortRef& in_port,
                            std::span<const PortRef> ports, SimTime now);

inline constexpr int kDropPriority = 100;
inline constexpr int kTunnelPriority = 10;

struct IntMatch {
  PortRef in_port;
  std::optional<VlanTag> inner_vlan;

  auto operator<=>(const IntMatch&) const = default;
};

enum class IntActionKind { kPush, kPop, kDrop };

struct IntAction {
  IntActionKind kind = IntActionKind::kDrop;
  std::optional<VlanTag> vlan;      // kPush
  std::optional<PortRef> out_port;  // kPush, kPop

  auto operator<=>(const IntAction&) const = default;
};

struct IntRule {
  int priority = kTunnelPriority;
  IntMatch match;
  IntAction action;

  static IntRule push(const PortRef& in, VlanTag vlan, const PortRef& out);
  static IntRule pop(const PortRef& in, VlanTag vlan, const PortRef& out);
  static IntRule drop(const PortRef& in,
                      std::optional<VlanTag> vlan = std::nullopt);

  bool matches(const Frame& f, const PortRef& in) const;
  std::string to_string() const;
  auto operator<=>(const IntRule&) const = default;
};

struct IntOutcome {
  enum class Kind { kForward, kDropped };
  Kind kind = Kind::kDropped;
  std::optional<PortRef> out_port;
  Frame frame;
  DropCause drop_cause = DropCause::kIntNoMatch;  // meaningful when dropped

  bool forwarded() const { return kind == Kind::kForward; }
};

// Applies the highest-priority matching rule; no match drops. Throws
// kMalformedFrame when a POP rule meets an untagged frame.
IntOutcome int_process(std::span<const IntRule> rules, const Frame& f,
                       const PortRef& in_port);

struct BhRule {
  VlanTag inner_vlan;
  PortRef out_port;

  std::string to_string() const;
  auto operator<=>(const BhRule&) const = default;
};

// Throws kNoRoute.
PortRef bh_forward(std::span<const BhRule> rules, const Frame& f);

// One p2mp radio. Egress: veth_to_<peer> <-> the LLID this node assigned to
// that peer. Ingress: (transmitter, LLID the transmitter assigned to us) ->
// veth_from_<transmitter>.
class MuxMap {
 public:
  MuxMap() = default;
  MuxMap(NodeId node, int radio) : node_(node), radio_(radio) {}

  void bind_egress(NodeId peer, VlanTag llid);
  void bind_ingress(NodeId transmitter, VlanTag llid);

  std::optional<VlanTag> egress_tag(const PortRef& vport) const;
  std::optional<NodeId> peer_for_tag(VlanTag llid) const;
  std::optional<PortRef> ingress_port(NodeId transmitter, VlanTag llid) const;

  PortRef vport_to(NodeId peer) const;
  PortRef vport_from(NodeId peer) const;

  NodeId node() const { return node_; }
  int radio() const { return radio_; }
  const std::map<NodeId, VlanTag>& egress() const { return egress_; }
  const std::map<NodeId, VlanTag>& ingress() const { return ingress_; }

 private:
  NodeId node_;
  int radio_ = 0;
  std::map<NodeId, VlanTag> egress_;   // peer -> our LLID for it
  std::map<NodeId, VlanTag> ingress_;  // transmitter -> its LLID for us
};

// Throws kUnknownVport.
Frame mux_egress(const MuxMap& m, const PortRef& vport, Frame f);
// Throws kUnknownOuterTag when the frame is not addressed to this node.
std::pair<PortRef, Frame> mux_ingress(const MuxMap& m, NodeId transmitter,
                                      Frame f);

struct TenantBridge {
  TenantId tenant;
  MacTable macs;
  std::vector<PortRef> ports;  // sorted by name

  bool has_port(const std::string& name) const;
};

struct Emission {
  std::string iface;  // vap_*, tun_if_* or radio0
  Frame frame;
  std::optional<NodeId> next_hop;  // radio emissions only
};

struct NodeDrop {
  DropCause cause;
  Frame frame;
};

struct BridgeLearn {
  TenantId tenant;
  MacChange change;
};

struct NodeResult {
  std::vector<Emission> emissions;
  std::vector<NodeDrop> drops;
  std::vector<BridgeLearn> learned;
};

class SwamNode {
 public:
  SwamNode() = default;
  SwamNode(NodeId id, bool wired) : id_(id), wired_(wired) {}

  NodeId id() const { return id_; }
  bool wired() const { return wired_; }

  void set_mac_aging(std::optional<SimTime> max_age) { mac_aging_ = max_age; }

  // Creates the tenant bridge on first use.
  TenantBridge& bridge(TenantId t);
  const TenantBridge* find_bridge(TenantId t) const;
  const std::map<TenantId, TenantBridge>& tenant_bridges() const {
    return bridges_;
  }

  // Returns false when nothing changed. A tun_if needs a wired node.
  bool add_port(TenantId t, const std::string& name);
  bool remove_port(TenantId t, const std::string& name);
  std::optional<TenantId> owner_of(const std::string& port_name) const;
  int vap_count() const;

  bool add_int_rule(const IntRule& rule);
  bool remove_int_rule(const IntRule& rule);
  const std::vector<IntRule>& int_rules() const { return int_rules_; }

  // Replaces any rule for the same VLAN.
  bool set_bh_rule(const BhRule& rule);
  bool remove_bh_rule(VlanTag vlan);
  const BhRule* find_bh_rule(VlanTag vlan) const;
  const std::vector<BhRule>& bh_rules() const { return bh_rules_; }

  MuxMap& mux() { return mux_; }
  const MuxMap& mux() const { return mux_; }

  PortRef port(TenantId t, const std::string& name) const;

  // Full traversal of the hierarchy for one frame arriving on `iface`.
  // `transmitter` is required for radio ingress.
  NodeResult process(const Frame& f, const std::string& iface, SimTime now,
                     std::optional<NodeId> transmitter = std::nullopt);

 private:
  void from_tenant_bridge(TenantId t, const Frame& f, const PortRef& in,
                          SimTime now, NodeResult& out);
  void to_backhaul(const Frame& tagged, NodeResult& out);
  bool terminates_here(VlanTag inner) const;

  NodeId id_;
  bool wired_ = false;
  std::optional<SimTime> mac_aging_;
  std::map<TenantId, TenantBridge> bridges_;
  std::map<std::string, TenantId> port_owner_;
  std::vector<IntRule> int_rules_;
  std::vector<BhRule> bh_rules_;
  MuxMap mux_;
};

NodeResult node_process(SwamNode& n, const Frame& f, const std::string& iface,
                        SimTime now,
                        std::optional<NodeId> transmitter = std::nullopt);

// Sorted, deterministic text dumps used by golden files and before/after
// comparisons.
std::string dump_int_rules(const SwamNode& n);
std::string dump_bh_rules(const SwamNode& n);
std::string dump_access(const SwamNode& n);  // tenant bridge ports + MACs
std::string dump_mux(const SwamNode& n);
std::string dump_node(const SwamNode& n);

}  // namespace swam
