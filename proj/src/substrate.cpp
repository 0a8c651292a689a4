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

#include "swam/substrate.hpp"

#include <algorithm>

namespace swam {

std::string_view to_string(LinkState s) {
  return s == LinkState::kUp ? "up" : "down";
}

LinkKey LinkKey::of(NodeId x, NodeId y) {
  return x < y ? LinkKey{x, y} : LinkKey{y, x};
}

std::string LinkKey::to_string() const {
  return node_name(a) + "-" + node_name(b);
}

void Topology::add_node(NodeId id, bool wired) { wired_[id] = wired; }

void Topology::add_link(const RadioLink& link) {
  links_.insert_or_assign(link.key, link);
}

bool Topology::is_wired(NodeId n) const {
  auto it = wired_.find(n);
  return it != wired_.end() && it->second;
}

std::vector<NodeId> Topology::node_ids() const {
  std::vector<NodeId> out;
  for (const auto& [id, _] : wired_) out.push_back(id);
  return out;
}

const RadioLink* Topology::link(LinkKey key) const {
  auto it = links_.find(key);
  return it == links_.end() ? nullptr : &it->second;
}

RadioLink* Topology::link(LinkKey key) {
  auto it = links_.find(key);
  return it == links_.end() ? nullptr : &it->second;
}

bool Topology::is_up(NodeId x, NodeId y) const {
  const RadioLink* l = link(LinkKey::of(x, y));
  return l && l->state == LinkState::kUp;
}

std::vector<NodeId> Topology::neighbors(NodeId n, bool up_only) const {
  std::vector<NodeId> out;
  for (const auto& [key, l] : links_) {
    if (!key.touches(n)) continue;
    if (up_only && l.state != LinkState::kUp) continue;
    out.push_back(key.other(n));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Attachment> Topology::attachment(const MacAddress& mac) const {
  auto it = attach_.find(mac);
  if (it == attach_.end()) return std::nullopt;
  return it->second;
}

std::vector<MacAddress> Topology::clients_at(NodeId n, TenantId t) const {
  std::vector<MacAddress> out;
  for (const auto& [mac, a] : attach_) {
    if (a.node == n && a.tenant == t) out.push_back(mac);
  }
  return out;
}

LlidSpace LlidSpace::assign(const Topology& topo) {
  LlidSpace s;
  for (NodeId n : topo.node_ids()) {
    auto& row = s.table_[n];
    int next = 1;
    for (NodeId m : topo.neighbors(n)) row.emplace(m, VlanTag(next++));
  }
  return s;
}

std::optional<VlanTag> LlidSpace::llid(NodeId node, NodeId neighbor) const {
  auto it = table_.find(node);
  if (it == table_.end()) return std::nullopt;
  auto jt = it->second.find(neighbor);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

const std::map<NodeId, VlanTag>& LlidSpace::of(NodeId node) const {
  static const std::map<NodeId, VlanTag> empty;
  auto it = table_.find(node);
  return it == table_.end() ? empty : it->second;
}

namespace {

std::string at_line(int line) {
  return line > 0 ? "line " + std::to_string(line) + ": " : "";
}

}  // namespace

std::pair<Topology, LlidSpace> build_topology(const TopologySpec& spec) {
  Topology topo;
  if (spec.nodes.size() < 2) {
    throw Error(ErrorCode::kInvalidSpec, "topology needs at least two nodes");
  }
  for (const NodeSpec& n : spec.nodes) {
    if (n.id.index < 0) {
      throw Error(ErrorCode::kInvalidSpec,
                  at_line(n.line) + "negative node index");
    }
    if (topo.has_node(n.id)) {
      throw Error(ErrorCode::kInvalidSpec,
                  at_line(n.line) + "duplicate node " + node_name(n.id));
    }
    topo.add_node(n.id, n.wired);
  }
  for (const LinkSpec& l : spec.links) {
    if (l.a == l.b) {
      throw Error(ErrorCode::kInvalidSpec,
                  at_line(l.line) + "link from " + node_name(l.a) +
                      " to itself");
    }
    if (!topo.has_node(l.a) || !topo.has_node(l.b)) {
      throw Error(ErrorCode::kInvalidSpec,
                  at_line(l.line) + "link " + node_name(l.a) + "-" +
                      node_name(l.b) + " references an undeclared node");
    }
    if (l.latency < 0 || l.capacity_bps < 0) {
      throw Error(ErrorCode::kInvalidSpec,
                  at_line(l.line) + "negative latency or capacity");
    }
    LinkKey key = LinkKey::of(l.a, l.b);
    if (topo.link(key)) {
      throw Error(ErrorCode::kInvalidSpec,
                  at_line(l.line) + "duplicate link " + key.to_string());
    }
    topo.add_link(RadioLink{key, l.latency, l.capacity_bps, LinkState::kUp});
  }
  LlidSpace llids = LlidSpace::assign(topo);
  return {std::move(topo), std::move(llids)};
}

bool CapacityMeter::admit(const RadioLink& link, std::int64_t bits,
                          SimTime now) {
  if (link.capacity_bps <= 0) return true;
  Usage& u = usage_[link.key];
  std::int64_t index = now / window_;
  if (index != u.window_index) {
    u.window_index = index;
    u.used_bits = 0;
  }
  // capacity_bps * window_us / 1e6, kept in integers.
  std::int64_t budget = link.capacity_bps / 1000 * window_ / 1000;
  if (u.used_bits + bits > budget) return false;
  u.used_bits += bits;
  return true;
}

TransmitResult transmit(const Topology& topo, const LlidSpace& llids,
                        CapacityMeter& meter, NodeId from, const Frame& f,
                        SimTime now, SimTime extra_delay) {
  if (!topo.has_node(from)) {
    throw Error(ErrorCode::kInvalidArgument,
                "transmit from unknown node " + node_name(from));
  }
  TransmitResult r;
  if (f.vlans.depth() != 2) {
    r.drop = DropCause::kMalformed;
    return r;
  }
  VlanTag outer = f.vlans.outer();
  std::optional<NodeId> addressed;
  for (const auto& [peer, tag] : llids.of(from)) {
    if (tag == outer) addressed = peer;
  }
  for (NodeId n : topo.neighbors(from, true)) {
    if (n != addressed) ++r.overheard;
  }
  if (!addressed) {
    r.drop = DropCause::kUnknownOuterTag;
    return r;
  }
  LinkKey key = LinkKey::of(from, *addressed);
  r.link = key;
  const RadioLink* link = topo.link(key);
  if (!link || link->state != LinkState::kUp) {
    r.drop = DropCause::kDeadLink;
    return r;
  }
  if (!meter.admit(*link, std::int64_t{f.size_bytes} * 8, now)) {
    r.drop = DropCause::kCapacity;
    return r;
  }
  r.arrival = Arrival{now + link->latency + extra_delay, *addressed, from, f};
  return r;
}

std::optional<LinkEvent> set_link_state(Topology& topo, LinkKey link,
                                        LinkState state, SimTime now,
                                        SimTime detection_delay) {
  RadioLink* l = topo.link(link);
  if (!l) {
    throw Error(ErrorCode::kUnknownLink, "no link " + link.to_string());
  }
  if (l->state == state) return std::nullopt;
  l->state = state;
  return LinkEvent{now + detection_delay, link, state};
}

AttachOutcome attach_client(Topology& topo, const MacAddress& mac,
                            TenantId tenant, NodeId node, bool llc_xid) {
  if (!topo.has_vap(node, tenant)) {
    throw Error(ErrorCode::kNoSuchVap, node_name(node) + " has no vap for " +
                                           tenant_name(tenant));
  }
  AttachOutcome out;
  Attachment next{node, tenant};
  auto it = topo.attach_.find(mac);
  if (it != topo.attach_.end()) {
    out.previous = it->second;
    topo.attach_.erase(it);
  }
  topo.attach_.emplace(mac, next);
  out.changed = !out.previous || *out.previous != next;
  if (llc_xid && out.changed) {
    Frame f;
    f.src = mac;
    f.dst = MacAddress::broadcast();
    f.kind = FrameKind::kLlcXid;
    out.llc_xid = f;
  }
  return out;
}

std::optional<Attachment> detach_client(Topology& topo, const MacAddress& mac) {
  auto it = topo.attach_.find(mac);
  if (it == topo.attach_.end()) return std::nullopt;
  Attachment a = it->second;
  topo.attach_.erase(it);
  return a;
}

}  // namespace swam
