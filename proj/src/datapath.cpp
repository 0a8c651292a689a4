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

#include "swam/datapath.hpp"

#include <algorithm>
#include <sstream>

namespace swam {

namespace {

// Dump order for br_int: priority high to low, then by match and action.
bool int_rule_before(const IntRule& a, const IntRule& b) {
  if (a.priority != b.priority) return a.priority > b.priority;
  if (a.match.in_port.name != b.match.in_port.name) {
    return a.match.in_port.name < b.match.in_port.name;
  }
  if (a.match.inner_vlan != b.match.inner_vlan) {
    return a.match.inner_vlan < b.match.inner_vlan;
  }
  return a.action < b.action;
}

bool starts_with(const std::string& s, std::string_view prefix) {
  return s.size() >= prefix.size() &&
         std::string_view(s).substr(0, prefix.size()) == prefix;
}

}  // namespace

std::string bridge_name(BridgeId b) {
  switch (b.kind) {
    case BridgeKind::kTenant: return "br_" + tenant_name(TenantId{b.index});
    case BridgeKind::kInt: return "br_int";
    case BridgeKind::kBh: return "br_bh";
    case BridgeKind::kMux: return "mux" + std::to_string(b.index);
  }
  return "?";
}

std::string vap_port_name(TenantId t, NodeId n) {
  return "vap_" + tenant_name(t) + "_" + std::to_string(n.index);
}

std::string tun_if_port_name(TenantId t) { return "tun_if_" + tenant_name(t); }

std::string backhaul_port_name(TenantId t, NodeId self, NodeId peer) {
  return "p_" + tenant_name(t) + "_" + std::to_string(self.index) + "_" +
         std::to_string(peer.index);
}

std::string veth_to_name(NodeId peer) { return "veth_to_" + node_name(peer); }

std::string veth_from_name(NodeId peer) {
  return "veth_from_" + node_name(peer);
}

PortRef patch_bh_port(NodeId n) {
  return PortRef{n, BridgeId::integration(), kPatchBh};
}

PortRole port_role(const std::string& name) {
  if (starts_with(name, "vap_")) return PortRole::kVap;
  if (starts_with(name, "tun_if_")) return PortRole::kTunIf;
  if (starts_with(name, "p_")) return PortRole::kBackhaul;
  return PortRole::kOther;
}

// --- MAC learning -----------------------------------------------------------

const PortRef* MacTable::lookup(const MacAddress& mac, SimTime now) const {
  auto it = entries_.find(mac);
  if (it == entries_.end()) return nullptr;
  if (max_age_ && now - it->second.last_seen > *max_age_) return nullptr;
  return &it->second.port;
}

bool MacTable::learn(const MacAddress& mac, const PortRef& port, SimTime now) {
  if (mac.is_broadcast()) return false;
  auto [it, inserted] = entries_.try_emplace(mac, MacEntry{port, now});
  if (inserted) return true;
  it->second.last_seen = now;
  if (it->second.port == port) return false;
  it->second.port = port;
  return true;
}

BridgeResult bridge_forward(MacTable& table, const Frame& f,
                            const PortRef& in_port,
                            std::span<const PortRef> ports, SimTime now) {
  if (!f.vlans.empty()) {
    throw Error(ErrorCode::kMalformedFrame,
                "tenant bridges only carry untagged frames");
  }
  if (std::find(ports.begin(), ports.end(), in_port) == ports.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "ingress port " + in_port.name + " not on this bridge");
  }
  BridgeResult result;
  std::optional<PortRef> previous;
  if (!f.src.is_broadcast()) {
    if (const PortRef* old = table.lookup(f.src, now)) previous = *old;
    if (table.learn(f.src, in_port, now)) {
      result.learned = MacChange{f.src, previous, in_port};
    }
  }
  if (!f.dst.is_broadcast()) {
    if (const PortRef* known = table.lookup(f.dst, now)) {
      if (*known != in_port) result.out.push_back(*known);
      return result;
    }
  }
  for (const PortRef& p : ports) {
    if (p != in_port) result.out.push_back(p);
  }
  return result;
}

// --- br_int -----------------------------------------------------------------

IntRule IntRule::push(const PortRef& in, VlanTag vlan, const PortRef& out) {
  return IntRule{kTunnelPriority, IntMatch{in, std::nullopt},
                 IntAction{IntActionKind::kPush, vlan, out}};
}

IntRule IntRule::pop(const PortRef& in, VlanTag vlan, const PortRef& out) {
  return IntRule{kTunnelPriority, IntMatch{in, vlan},
                 IntAction{IntActionKind::kPop, std::nullopt, out}};
}

IntRule IntRule::drop(const PortRef& in, std::optional<VlanTag> vlan) {
  return IntRule{kDropPriority, IntMatch{in, vlan},
                 IntAction{IntActionKind::kDrop, std::nullopt, std::nullopt}};
}

bool IntRule::matches(const Frame& f, const PortRef& in) const {
  if (match.in_port != in) return false;
  if (!match.inner_vlan) return true;
  return !f.vlans.empty() && f.vlans.outer() == *match.inner_vlan;
}

std::string IntRule::to_string() const {
  std::ostringstream os;
  os << "prio=" << priority << " in=" << match.in_port.name;
  if (match.inner_vlan) os << " vlan=" << match.inner_vlan->id();
  switch (action.kind) {
    case IntActionKind::kPush:
      os << " push=" << action.vlan->id() << " out=" << action.out_port->name;
      break;
    case IntActionKind::kPop:
      os << " pop out=" << action.out_port->name;
      break;
    case IntActionKind::kDrop:
      os << " drop";
      break;
  }
  return os.str();
}

IntOutcome int_process(std::span<const IntRule> rules, const Frame& f,
                       const PortRef& in_port) {
  const IntRule* best = nullptr;
  for (const IntRule& r : rules) {
    if (!r.matches(f, in_port)) continue;
    if (!best || r.priority > best->priority) best = &r;
  }
  IntOutcome out;
  out.frame = f;
  if (!best) {
    out.drop_cause = DropCause::kIntNoMatch;
    return out;
  }
  switch (best->action.kind) {
    case IntActionKind::kDrop:
      out.drop_cause = DropCause::kIntDropRule;
      return out;
    case IntActionKind::kPush:
      if (out.frame.vlans.depth() >= VlanStack::kMaxDepth) {
        throw Error(ErrorCode::kMalformedFrame,
                    "PUSH on a frame that already carries two tags");
      }
      out.frame.vlans.push(*best->action.vlan);
      break;
    case IntActionKind::kPop:
      if (out.frame.vlans.empty()) {
        throw Error(ErrorCode::kMalformedFrame, "POP on an untagged frame");
      }
      out.frame.vlans.pop();
      break;
  }
  out.kind = IntOutcome::Kind::kForward;
  out.out_port = best->action.out_port;
  return out;
}

// --- br_bh ------------------------------------------------------------------

std::string BhRule::to_string() const {
  return "vlan=" + std::to_string(inner_vlan.id()) + " out=" + out_port.name;
}

PortRef bh_forward(std::span<const BhRule> rules, const Frame& f) {
  if (f.vlans.empty()) {
    throw Error(ErrorCode::kMalformedFrame, "br_bh needs a tunnel VLAN");
  }
  VlanTag inner = f.vlans.outer();
  for (const BhRule& r : rules) {
    if (r.inner_vlan == inner) return r.out_port;
  }
  throw Error(ErrorCode::kNoRoute,
              "no br_bh rule for VLAN " + std::to_string(inner.id()));
}

// --- MUX --------------------------------------------------------------------

void MuxMap::bind_egress(NodeId peer, VlanTag llid) {
  for (const auto& [other, tag] : egress_) {
    if (other != peer && tag == llid) {
      throw Error(ErrorCode::kInvalidArgument,
                  "LLID " + std::to_string(llid.id()) + " already bound on " +
                      node_name(node_));
    }
  }
  egress_.insert_or_assign(peer, llid);
}

void MuxMap::bind_ingress(NodeId transmitter, VlanTag llid) {
  ingress_.insert_or_assign(transmitter, llid);
}

PortRef MuxMap::vport_to(NodeId peer) const {
  return PortRef{node_, BridgeId::backhaul(), veth_to_name(peer)};
}

PortRef MuxMap::vport_from(NodeId peer) const {
  return PortRef{node_, BridgeId::backhaul(), veth_from_name(peer)};
}

std::optional<VlanTag> MuxMap::egress_tag(const PortRef& vport) const {
  if (vport.node != node_ || !starts_with(vport.name, "veth_to_s")) {
    return std::nullopt;
  }
  int index = -1;
  try {
    index = std::stoi(vport.name.substr(9));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  auto it = egress_.find(NodeId{index});
  if (it == egress_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> MuxMap::peer_for_tag(VlanTag llid) const {
  for (const auto& [peer, tag] : egress_) {
    if (tag == llid) return peer;
  }
  return std::nullopt;
}

std::optional<PortRef> MuxMap::ingress_port(NodeId transmitter,
                                            VlanTag llid) const {
  auto it = ingress_.find(transmitter);
  if (it == ingress_.end() || it->second != llid) return std::nullopt;
  return vport_from(transmitter);
}

Frame mux_egress(const MuxMap& m, const PortRef& vport, Frame f) {
  auto tag = m.egress_tag(vport);
  if (!tag) {
    throw Error(ErrorCode::kUnknownVport,
                vport.name + " is not a virtual port of " +
                    bridge_name(BridgeId::mux(m.radio())));
  }
  if (f.vlans.depth() != 1) {
    throw Error(ErrorCode::kMalformedFrame,
                "MUX expects exactly the tunnel VLAN on egress");
  }
  f.vlans.push(*tag);
  return f;
}

std::pair<PortRef, Frame> mux_ingress(const MuxMap& m, NodeId transmitter,
                                      Frame f) {
  if (f.vlans.depth() != 2) {
    throw Error(ErrorCode::kMalformedFrame,
                "radio frames carry exactly two VLAN tags");
  }
  auto port = m.ingress_port(transmitter, f.vlans.outer());
  if (!port) {
    throw Error(ErrorCode::kUnknownOuterTag,
                "outer tag " + std::to_string(f.vlans.outer().id()) + " from " +
                    node_name(transmitter) + " not addressed to " +
                    node_name(m.node()));
  }
  f.vlans.pop();
  return {*port, std::move(f)};
}

// --- SwamNode ---------------------------------------------------------------

bool TenantBridge::has_port(const std::string& name) const {
  return std::any_of(ports.begin(), ports.end(),
                     [&](const PortRef& p) { return p.name == name; });
}

TenantBridge& SwamNode::bridge(TenantId t) {
  auto [it, inserted] = bridges_.try_emplace(t);
  if (inserted) {
    it->second.tenant = t;
    it->second.macs = MacTable(mac_aging_);
  }
  return it->second;
}

const TenantBridge* SwamNode::find_bridge(TenantId t) const {
  auto it = bridges_.find(t);
  return it == bridges_.end() ? nullptr : &it->second;
}

PortRef SwamNode::port(TenantId t, const std::string& name) const {
  return PortRef{id_, BridgeId::tenant(t), name};
}

bool SwamNode::add_port(TenantId t, const std::string& name) {
  if (port_role(name) == PortRole::kTunIf && !wired_) {
    throw Error(ErrorCode::kInvalidArgument,
                "tunnel interface " + name + " needs a wired node, " +
                    node_name(id_) + " has none");
  }
  if (auto owner = owner_of(name); owner && *owner != t) {
    throw Error(ErrorCode::kInvalidArgument,
                "port " + name + " already belongs to another bridge");
  }
  TenantBridge& br = bridge(t);
  if (br.has_port(name)) return false;
  PortRef p = port(t, name);
  br.ports.insert(std::upper_bound(br.ports.begin(), br.ports.end(), p), p);
  port_owner_.emplace(name, t);
  return true;
}

bool SwamNode::remove_port(TenantId t, const std::string& name) {
  auto it = bridges_.find(t);
  if (it == bridges_.end()) return false;
  auto& ports = it->second.ports;
  auto p = std::find_if(ports.begin(), ports.end(),
                        [&](const PortRef& x) { return x.name == name; });
  if (p == ports.end()) return false;
  ports.erase(p);
  port_owner_.erase(name);
  return true;
}

std::optional<TenantId> SwamNode::owner_of(const std::string& name) const {
  auto it = port_owner_.find(name);
  if (it == port_owner_.end()) return std::nullopt;
  return it->second;
}

int SwamNode::vap_count() const {
  int n = 0;
  for (const auto& [_, br] : bridges_) {
    for (const PortRef& p : br.ports) {
      if (port_role(p.name) == PortRole::kVap) ++n;
    }
  }
  return n;
}

bool SwamNode::add_int_rule(const IntRule& rule) {
  for (const IntRule& r : int_rules_) {
    if (r.priority == rule.priority && r.match == rule.match) {
      if (r == rule) return false;
      throw Error(ErrorCode::kInvalidArgument,
                  "conflicting br_int rule for the same match: " +
                      rule.to_string());
    }
  }
  int_rules_.insert(std::upper_bound(int_rules_.begin(), int_rules_.end(),
                                     rule, int_rule_before),
                    rule);
  return true;
}

bool SwamNode::remove_int_rule(const IntRule& rule) {
  auto it = std::find(int_rules_.begin(), int_rules_.end(), rule);
  if (it == int_rules_.end()) return false;
  int_rules_.erase(it);
  return true;
}

bool SwamNode::set_bh_rule(const BhRule& rule) {
  for (BhRule& r : bh_rules_) {
    if (r.inner_vlan == rule.inner_vlan) {
      if (r == rule) return false;
      r = rule;
      return true;
    }
  }
  bh_rules_.insert(
      std::upper_bound(bh_rules_.begin(), bh_rules_.end(), rule,
                       [](const BhRule& a, const BhRule& b) {
                         return a.inner_vlan < b.inner_vlan;
                       }),
      rule);
  return true;
}

bool SwamNode::remove_bh_rule(VlanTag vlan) {
  auto it = std::find_if(bh_rules_.begin(), bh_rules_.end(),
                         [&](const BhRule& r) { return r.inner_vlan == vlan; });
  if (it == bh_rules_.end()) return false;
  bh_rules_.erase(it);
  return true;
}

const BhRule* SwamNode::find_bh_rule(VlanTag vlan) const {
  for (const BhRule& r : bh_rules_) {
    if (r.inner_vlan == vlan) return &r;
  }
  return nullptr;
}

bool SwamNode::terminates_here(VlanTag inner) const {
  for (const IntRule& r : int_rules_) {
    if (r.match.in_port.name == kPatchBh && r.match.inner_vlan == inner) {
      return true;
    }
  }
  return false;
}

void SwamNode::to_backhaul(const Frame& tagged, NodeResult& out) {
  PortRef vport;
  try {
    vport = bh_forward(bh_rules_, tagged);
  } catch (const Error& e) {
    out.drops.push_back({e.code() == ErrorCode::kNoRoute ? DropCause::kNoRoute
                                                         : DropCause::kMalformed,
                         tagged});
    return;
  }
  Frame radio_frame;
  try {
    radio_frame = mux_egress(mux_, vport, tagged);
  } catch (const Error& e) {
    out.drops.push_back({e.code() == ErrorCode::kUnknownVport
                             ? DropCause::kNoRoute
                             : DropCause::kMalformed,
                         tagged});
    return;
  }
  auto next = mux_.peer_for_tag(radio_frame.vlans.outer());
  out.emissions.push_back({kRadioName, std::move(radio_frame), next});
}

void SwamNode::from_tenant_bridge(TenantId t, const Frame& f,
                                  const PortRef& in, SimTime now,
                                  NodeResult& out) {
  TenantBridge& br = bridges_.at(t);
  BridgeResult b = bridge_forward(br.macs, f, in, br.ports, now);
  if (b.learned) out.learned.push_back({t, *b.learned});
  if (b.out.empty()) {
    out.drops.push_back({DropCause::kFiltered, f});
    return;
  }
  for (const PortRef& p : b.out) {
    if (port_role(p.name) != PortRole::kBackhaul) {
      out.emissions.push_back({p.name, f, std::nullopt});
      continue;
    }
    IntOutcome o;
    try {
      o = int_process(int_rules_, f, p);
    } catch (const Error&) {
      out.drops.push_back({DropCause::kMalformed, f});
      continue;
    }
    if (!o.forwarded()) {
      out.drops.push_back({o.drop_cause, f});
      continue;
    }
    to_backhaul(o.frame, out);
  }
}

NodeResult SwamNode::process(const Frame& f, const std::string& iface,
                             SimTime now, std::optional<NodeId> transmitter) {
  NodeResult out;
  if (auto owner = owner_of(iface)) {
    PortRole role = port_role(iface);
    if (role != PortRole::kVap && role != PortRole::kTunIf) {
      throw Error(ErrorCode::kInvalidArgument,
                  iface + " is an internal port, not an ingress interface");
    }
    if (!f.vlans.empty()) {
      out.drops.push_back({DropCause::kMalformed, f});
      return out;
    }
    from_tenant_bridge(*owner, f, port(*owner, iface), now, out);
    return out;
  }
  if (iface != kRadioName) {
    throw Error(ErrorCode::kInvalidArgument,
                "no interface " + iface + " on " + node_name(id_));
  }
  if (!transmitter) {
    throw Error(ErrorCode::kInvalidArgument,
                "radio ingress needs the transmitting node");
  }
  std::pair<PortRef, Frame> demuxed;
  try {
    demuxed = mux_ingress(mux_, *transmitter, f);
  } catch (const Error& e) {
    out.drops.push_back({e.code() == ErrorCode::kUnknownOuterTag
                             ? DropCause::kUnknownOuterTag
                             : DropCause::kMalformed,
                         f});
    return out;
  }
  const Frame& inner = demuxed.second;
  if (!terminates_here(inner.vlans.outer())) {
    to_backhaul(inner, out);
    return out;
  }
  IntOutcome o;
  try {
    o = int_process(int_rules_, inner, patch_bh_port(id_));
  } catch (const Error&) {
    out.drops.push_back({DropCause::kMalformed, inner});
    return out;
  }
  if (!o.forwarded()) {
    out.drops.push_back({o.drop_cause, inner});
    return out;
  }
  auto owner = owner_of(o.out_port->name);
  if (!owner || !o.frame.vlans.empty()) {
    out.drops.push_back({DropCause::kMalformed, o.frame});
    return out;
  }
  from_tenant_bridge(*owner, o.frame, *o.out_port, now, out);
  return out;
}

NodeResult node_process(SwamNode& n, const Frame& f, const std::string& iface,
                        SimTime now, std::optional<NodeId> transmitter) {
  return n.process(f, iface, now, transmitter);
}

// --- dumps ------------------------------------------------------------------

std::string dump_int_rules(const SwamNode& n) {
  std::ostringstream os;
  os << "  br_int\n";
  for (const IntRule& r : n.int_rules()) os << "    " << r.to_string() << "\n";
  return os.str();
}

std::string dump_bh_rules(const SwamNode& n) {
  std::ostringstream os;
  os << "  br_bh\n";
  for (const BhRule& r : n.bh_rules()) os << "    " << r.to_string() << "\n";
  return os.str();
}

std::string dump_access(const SwamNode& n) {
  std::ostringstream os;
  for (const auto& [t, br] : n.tenant_bridges()) {
    os << "  " << bridge_name(BridgeId::tenant(t)) << " ports=";
    for (std::size_t i = 0; i < br.ports.size(); ++i) {
      os << (i ? "," : "") << br.ports[i].name;
    }
    os << "\n";
    for (const auto& [mac, entry] : br.macs.entries()) {
      os << "    mac " << mac.to_string() << " -> " << entry.port.name << "\n";
    }
  }
  return os.str();
}

std::string dump_mux(const SwamNode& n) {
  std::ostringstream os;
  const MuxMap& m = n.mux();
  os << "  " << bridge_name(BridgeId::mux(m.radio())) << " " << kRadioName
     << "\n";
  for (const auto& [peer, tag] : m.egress()) {
    os << "    egress " << veth_to_name(peer) << " llid=" << tag.id() << "\n";
  }
  for (const auto& [peer, tag] : m.ingress()) {
    os << "    ingress " << veth_from_name(peer) << " llid=" << tag.id()
       << "\n";
  }
  return os.str();
}

std::string dump_node(const SwamNode& n) {
  return "node " + node_name(n.id()) + (n.wired() ? " wired" : "") + "\n" +
         dump_access(n) + dump_int_rules(n) + dump_bh_rules(n) + dump_mux(n);
}

}  // namespace swam
