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

#include "swam/controller.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace swam {

std::string path_to_string(const Path& p) {
  std::string out = "[";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ",";
    out += node_name(p[i]);
  }
  return out + "]";
}

std::set<NodeId> TenantPresence::bridge_nodes() const {
  std::set<NodeId> out = nodes;
  out.insert(gateways.begin(), gateways.end());
  return out;
}

std::string RuleChange::to_string() const {
  std::ostringstream os;
  os << "t=" << time << " node=" << node_name(node) << " bridge=" << bridge
     << " op=" << (op == Op::kAdd ? "add" : "del") << " " << detail;
  return os.str();
}

bool RuleChange::is_drop_rule() const {
  return bridge == "br_int" && detail.size() >= 5 &&
         detail.compare(detail.size() - 5, 5, " drop") == 0;
}

namespace {

// Small helper that applies changes to the fabric and records them.
class Recorder {
 public:
  Recorder(Fabric& fabric, SimTime now) : fabric_(fabric), now_(now) {}

  SwamNode& node(NodeId n) {
    auto it = fabric_.find(n);
    if (it == fabric_.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "no datapath for node " + node_name(n));
    }
    return it->second;
  }

  void add_port(NodeId n, TenantId t, const std::string& name) {
    if (node(n).add_port(t, name)) {
      log(n, bridge_name(BridgeId::tenant(t)), RuleChange::Op::kAdd,
          "port=" + name);
    }
  }

  void add_int(NodeId n, const IntRule& r) {
    if (node(n).add_int_rule(r)) {
      log(n, "br_int", RuleChange::Op::kAdd, r.to_string());
    }
  }

  void remove_int(NodeId n, const IntRule& r) {
    if (node(n).remove_int_rule(r)) {
      log(n, "br_int", RuleChange::Op::kRemove, r.to_string());
    }
  }

  void set_bh(NodeId n, const BhRule& r) {
    const BhRule* old = node(n).find_bh_rule(r.inner_vlan);
    if (old && *old == r) return;
    if (old) log(n, "br_bh", RuleChange::Op::kRemove, old->to_string());
    node(n).set_bh_rule(r);
    log(n, "br_bh", RuleChange::Op::kAdd, r.to_string());
  }

  void remove_bh(NodeId n, VlanTag vlan) {
    const BhRule* old = node(n).find_bh_rule(vlan);
    if (!old) return;
    std::string text = old->to_string();
    node(n).remove_bh_rule(vlan);
    log(n, "br_bh", RuleChange::Op::kRemove, text);
  }

  void absorb(std::vector<RuleChange> more) {
    changes_.insert(changes_.end(), more.begin(), more.end());
  }

  std::vector<RuleChange> take() { return std::move(changes_); }

 private:
  void log(NodeId n, std::string bridge, RuleChange::Op op,
           std::string detail) {
    changes_.push_back(
        RuleChange{now_, n, std::move(bridge), op, std::move(detail)});
  }

  Fabric& fabric_;
  SimTime now_;
  std::vector<RuleChange> changes_;
};

TenantPresence& presence_of(ControllerState& cs, TenantId t) {
  auto it = cs.presence.find(t);
  if (it == cs.presence.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "tenant " + tenant_name(t) + " is not declared");
  }
  return it->second;
}

NodeId root_for(const TenantPresence& p, NodeId n) {
  if (p.gateways.count(n)) return n;
  auto it = p.root_of.find(n);
  return it == p.root_of.end() ? n : it->second;
}

bool port_enabled(const TenantPresence& p, NodeId i, NodeId j) {
  return root_for(p, i) == j || root_for(p, j) == i;
}

std::set<LinkKey> links_of(const Path& p) {
  std::set<LinkKey> out;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    out.insert(LinkKey::of(p[k], p[k + 1]));
  }
  return out;
}

bool path_alive(const Topology& topo, const Path& p) {
  if (p.size() < 2) return false;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    if (!topo.is_up(p[k], p[k + 1])) return false;
  }
  return true;
}

NodeId nearest_gateway(const ControllerState& cs, const TenantPresence& p,
                       NodeId n) {
  std::optional<NodeId> best;
  std::size_t best_hops = 0;
  for (NodeId g : p.gateways) {
    auto path = shortest_path(cs.view, n, g, {});
    if (!path) continue;
    if (!best || path->size() < best_hops) {
      best = g;
      best_hops = path->size();
    }
  }
  return best ? *best : *p.gateways.begin();
}

// Places one tunnel on its pinned or computed primary path. A tunnel with
// no route starts suspended.
void place_tunnel(ControllerState& cs, Fabric& fabric, const TunnelId& t,
                  Recorder& rec, SimTime now) {
  std::optional<Path> path;
  if (auto pin = cs.pinned.find(t); pin != cs.pinned.end()) {
    path = pin->second;
  } else {
    path = shortest_path(cs.view, t.origin, t.dest, {});
  }
  PlanEntry& e = cs.plan.at(t);
  if (!path) {
    e.suspended = true;
    return;
  }
  rec.absorb(install_tunnel_path(cs, fabric, t, *path, now));
  e.backup = compute_backup(cs.view, t, *path);
}

void sync_drop_rules(ControllerState& cs, Recorder& rec, const Fabric& fabric,
                     TenantId tenant) {
  const TenantPresence& p = cs.presence.at(tenant);
  // Block first, then open: the old root is cut before the new one is live.
  std::vector<std::pair<NodeId, IntRule>> to_add;
  std::vector<std::pair<NodeId, IntRule>> to_remove;
  for (NodeId n : p.bridge_nodes()) {
    std::vector<IntRule> want = desired_drop_rules(cs, fabric, tenant, n);
    const SwamNode& node = fabric.at(n);
    for (const IntRule& r : want) {
      if (std::find(node.int_rules().begin(), node.int_rules().end(), r) ==
          node.int_rules().end()) {
        to_add.emplace_back(n, r);
      }
    }
    for (const IntRule& r : node.int_rules()) {
      if (r.action.kind != IntActionKind::kDrop) continue;
      bool own = false;
      if (r.match.in_port.bridge == BridgeId::tenant(tenant)) own = true;
      if (r.match.in_port.name == kPatchBh && r.match.inner_vlan &&
          cs.allocator.contains(*r.match.inner_vlan) &&
          cs.allocator.decode(*r.match.inner_vlan).tenant == tenant) {
        own = true;
      }
      if (own && std::find(want.begin(), want.end(), r) == want.end()) {
        to_remove.emplace_back(n, r);
      }
    }
  }
  for (const auto& [n, r] : to_add) rec.add_int(n, r);
  for (const auto& [n, r] : to_remove) rec.remove_int(n, r);
}

// Adds `node` to the tenant's bridge set: ports, PUSH/POP rules and paths
// for the tunnels to and from every existing bridge node.
void join_bridge_node(ControllerState& cs, Fabric& fabric, TenantId tenant,
                      NodeId node, Recorder& rec, SimTime now) {
  TenantPresence& p = cs.presence.at(tenant);
  std::set<NodeId> others = p.bridge_nodes();
  if (others.count(node)) return;

  std::vector<TunnelId> fresh;
  for (NodeId m : others) {
    fresh.emplace_back(tenant, node, m);
    fresh.emplace_back(tenant, m, node);
  }
  // Validate the whole batch before touching anything.
  if (cs.allocator.mode() == VlanMode::kDigits) {
    VlanAllocator probe(VlanMode::kDigits, kUsableVlanCount);
    for (const TunnelId& t : fresh) probe.encode(t);
  }
  if (static_cast<int>(fresh.size()) > cs.allocator.remaining()) {
    throw Error(ErrorCode::kCapacityExceeded,
                "adding " + node_name(node) + " to tenant " +
                    tenant_name(tenant) + " needs " +
                    std::to_string(fresh.size()) + " VLANs, " +
                    std::to_string(cs.allocator.remaining()) + " left");
  }

  rec.node(node).bridge(tenant);
  for (const TunnelId& t : fresh) {
    VlanTag v = cs.allocator.encode(t);
    cs.plan.emplace(t, PlanEntry{v, {}, std::nullopt, PathRole::kPrimary,
                                 false});
  }
  for (NodeId m : others) {
    for (auto [i, j] : {std::pair{node, m}, std::pair{m, node}}) {
      std::string port_name = backhaul_port_name(tenant, i, j);
      rec.add_port(i, tenant, port_name);
      PortRef port = rec.node(i).port(tenant, port_name);
      VlanTag out_vlan = *cs.allocator.find(TunnelId(tenant, i, j));
      VlanTag in_vlan = *cs.allocator.find(TunnelId(tenant, j, i));
      rec.add_int(i, IntRule::push(port, out_vlan, patch_bh_port(i)));
      rec.add_int(i, IntRule::pop(patch_bh_port(i), in_vlan, port));
    }
  }
  for (const TunnelId& t : fresh) place_tunnel(cs, fabric, t, rec, now);
}

}  // namespace

std::vector<IntRule> desired_drop_rules(const ControllerState& cs,
                                        const Fabric& fabric, TenantId tenant,
                                        NodeId node) {
  std::vector<IntRule> out;
  const TenantPresence& p = cs.presence.at(tenant);
  const SwamNode& n = fabric.at(node);
  for (NodeId j : p.bridge_nodes()) {
    if (j == node || port_enabled(p, node, j)) continue;
    auto in_vlan = cs.allocator.find(TunnelId(tenant, j, node));
    if (!in_vlan) continue;
    out.push_back(
        IntRule::drop(n.port(tenant, backhaul_port_name(tenant, node, j))));
    out.push_back(IntRule::drop(patch_bh_port(node), *in_vlan));
  }
  return out;
}

void pin_path(ControllerState& cs, const TunnelId& t, const Path& path) {
  if (path.size() < 2 || path.front() != t.origin || path.back() != t.dest) {
    throw Error(ErrorCode::kInvalidArgument,
                "pinned path " + path_to_string(path) + " does not join " +
                    t.to_string());
  }
  cs.pinned.insert_or_assign(t, path);
}

std::vector<RuleChange> declare_tenant(ControllerState& cs, Fabric& fabric,
                                       TenantId tenant,
                                       const std::set<NodeId>& gateways,
                                       SimTime now) {
  if (gateways.empty()) {
    throw Error(ErrorCode::kNotAGateway,
                "tenant " + tenant_name(tenant) + " needs a gateway");
  }
  for (NodeId g : gateways) {
    if (!cs.view.is_wired(g)) {
      throw Error(ErrorCode::kNotAGateway,
                  node_name(g) + " has no wired interface");
    }
  }
  if (!cs.presence.count(tenant) &&
      static_cast<int>(cs.presence.size()) >= cs.limits.max_tenants) {
    throw Error(ErrorCode::kCapacityExceeded,
                "tenant cap of " + std::to_string(cs.limits.max_tenants) +
                    " reached");
  }
  Recorder rec(fabric, now);
  auto [it, _] = cs.presence.try_emplace(tenant);
  it->second.tenant = tenant;
  for (NodeId g : gateways) {
    if (it->second.gateways.count(g)) continue;
    join_bridge_node(cs, fabric, tenant, g, rec, now);
    it->second.gateways.insert(g);
    it->second.root_of[g] = g;
    rec.add_port(g, tenant, tun_if_port_name(tenant));
  }
  sync_drop_rules(cs, rec, fabric, tenant);
  return rec.take();
}

std::vector<RuleChange> provision_presence(ControllerState& cs,
                                           Fabric& fabric, TenantId tenant,
                                           NodeId node, SimTime now,
                                           std::optional<NodeId> root) {
  TenantPresence& p = presence_of(cs, tenant);
  if (!cs.view.has_node(node)) {
    throw Error(ErrorCode::kInvalidArgument,
                "no node " + node_name(node) + " in the topology");
  }
  if (root && !p.gateways.count(*root)) {
    throw Error(ErrorCode::kNotAGateway,
                node_name(*root) + " is not a gateway of tenant " +
                    tenant_name(tenant));
  }
  Recorder rec(fabric, now);
  SwamNode& dp = rec.node(node);
  std::string vap = vap_port_name(tenant, node);
  const TenantBridge* br = dp.find_bridge(tenant);
  bool has_vap = br && br->has_port(vap);
  if (!has_vap && dp.vap_count() >= cs.limits.vaps_per_radio) {
    throw Error(ErrorCode::kVapCapExceeded,
                node_name(node) + " already carries " +
                    std::to_string(cs.limits.vaps_per_radio) + " vaps");
  }
  join_bridge_node(cs, fabric, tenant, node, rec, now);
  rec.add_port(node, tenant, vap);
  cs.view.add_vap(node, tenant);
  p.nodes.insert(node);
  if (p.gateways.count(node)) {
    p.root_of[node] = node;
  } else if (root) {
    p.root_of[node] = *root;
  } else if (!p.root_of.count(node)) {
    p.root_of[node] = nearest_gateway(cs, p, node);
  }
  sync_drop_rules(cs, rec, fabric, tenant);
  return rec.take();
}

std::optional<Path> shortest_path(const Topology& topo, NodeId src, NodeId dst,
                                  const std::set<LinkKey>& avoid) {
  if (!topo.has_node(src) || !topo.has_node(dst)) return std::nullopt;
  if (src == dst) return Path{src};
  auto usable = [&](NodeId x, NodeId y) {
    return topo.is_up(x, y) && !avoid.count(LinkKey::of(x, y));
  };
  // Distances to dst, then a greedy walk picking the smallest id that gets
  // one hop closer; that yields the lexicographically smallest shortest path.
  std::map<NodeId, int> dist{{dst, 0}};
  std::deque<NodeId> queue{dst};
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : topo.neighbors(u, true)) {
      if (!usable(u, v) || dist.count(v)) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }
  if (!dist.count(src)) return std::nullopt;
  Path path{src};
  NodeId cur = src;
  while (cur != dst) {
    for (NodeId v : topo.neighbors(cur, true)) {
      auto d = dist.find(v);
      if (usable(cur, v) && d != dist.end() && d->second == dist[cur] - 1) {
        cur = v;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

Path compute_path(const Topology& topo, NodeId src, NodeId dst) {
  if (src == dst) {
    throw Error(ErrorCode::kInvalidArgument, "path endpoints must differ");
  }
  auto p = shortest_path(topo, src, dst, {});
  if (!p) {
    throw Error(ErrorCode::kDisconnected,
                node_name(src) + " cannot reach " + node_name(dst));
  }
  return *p;
}

std::optional<Path> compute_backup(const Topology& topo, const TunnelId& t,
                                   const Path& primary) {
  (void)t;
  if (primary.size() < 2) return std::nullopt;
  if (auto p = shortest_path(topo, primary.front(), primary.back(),
                             links_of(primary))) {
    return p;
  }
  return shortest_path(topo, primary.front(), primary.back(),
                       {LinkKey::of(primary[0], primary[1])});
}

std::vector<RuleChange> install_tunnel_path(ControllerState& cs,
                                            Fabric& fabric, const TunnelId& t,
                                            const Path& path, SimTime now) {
  auto it = cs.plan.find(t);
  if (it == cs.plan.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "tunnel " + t.to_string() + " is not allocated");
  }
  if (path.size() < 2 || path.front() != t.origin || path.back() != t.dest) {
    throw Error(ErrorCode::kInvalidArgument,
                path_to_string(path) + " does not join " + t.to_string());
  }
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    if (!cs.view.is_up(path[k], path[k + 1])) {
      throw Error(ErrorCode::kDisconnected,
                  "no working link " +
                      LinkKey::of(path[k], path[k + 1]).to_string() +
                      " for " + t.to_string());
    }
  }
  PlanEntry& e = it->second;
  Recorder rec(fabric, now);
  std::set<NodeId> keep(path.begin(), path.end() - 1);
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    SwamNode& n = rec.node(path[k]);
    rec.set_bh(path[k], BhRule{e.vlan, n.mux().vport_to(path[k + 1])});
  }
  if (!e.path.empty()) {
    for (std::size_t k = 0; k + 1 < e.path.size(); ++k) {
      if (!keep.count(e.path[k])) rec.remove_bh(e.path[k], e.vlan);
    }
  }
  e.path = path;
  e.suspended = false;
  return rec.take();
}

std::vector<RuleChange> apply_root(ControllerState& cs, Fabric& fabric,
                                   TenantId tenant, NodeId node, NodeId root,
                                   SimTime now) {
  TenantPresence& p = presence_of(cs, tenant);
  if (!p.gateways.count(root)) {
    throw Error(ErrorCode::kNotAGateway,
                node_name(root) + " is not a gateway of tenant " +
                    tenant_name(tenant));
  }
  if (!p.bridge_nodes().count(node)) {
    throw Error(ErrorCode::kInvalidArgument,
                "tenant " + tenant_name(tenant) + " has no presence on " +
                    node_name(node));
  }
  if (p.gateways.count(node) && root != node) {
    throw Error(ErrorCode::kInvalidArgument,
                "gateway " + node_name(node) + " is always its own root");
  }
  p.root_of[node] = root;
  Recorder rec(fabric, now);
  sync_drop_rules(cs, rec, fabric, tenant);
  return rec.take();
}

RootUpdate update_tenant_root(ControllerState& cs, Fabric& fabric,
                              TenantId tenant, NodeId node, NodeId new_root,
                              std::span<const MacAddress> attached,
                              SimTime now) {
  RootUpdate out;
  out.changes = apply_root(cs, fabric, tenant, node, new_root, now);
  for (const MacAddress& mac : attached) {
    out.spoofed_arps.push_back(on_client_attach(mac));
  }
  return out;
}

RerouteReport on_link_failure(ControllerState& cs, Fabric& fabric,
                              LinkKey link, SimTime now) {
  RerouteReport r;
  if (RadioLink* l = cs.view.link(link)) {
    l->state = LinkState::kDown;
  } else {
    throw Error(ErrorCode::kUnknownLink, "no link " + link.to_string());
  }
  auto append = [&](std::vector<RuleChange> c) {
    r.changes.insert(r.changes.end(), c.begin(), c.end());
  };
  for (auto& [t, e] : cs.plan) {
    if (e.suspended) continue;
    bool uses = links_of(e.path).count(link) != 0;
    if (!uses) {
      if (e.backup && links_of(*e.backup).count(link)) {
        e.backup = compute_backup(cs.view, t, e.path);
      }
      continue;
    }
    if (e.backup && path_alive(cs.view, *e.backup)) {
      append(install_tunnel_path(cs, fabric, t, *e.backup, now));
      e.active = PathRole::kBackup;
      r.to_backup.push_back(t);
    } else if (auto p = shortest_path(cs.view, t.origin, t.dest, {})) {
      append(install_tunnel_path(cs, fabric, t, *p, now));
      e.active = PathRole::kPrimary;
      r.recomputed.push_back(t);
    } else {
      Recorder rec(fabric, now);
      for (std::size_t k = 0; k + 1 < e.path.size(); ++k) {
        rec.remove_bh(e.path[k], e.vlan);
      }
      append(rec.take());
      e.path.clear();
      e.backup.reset();
      e.suspended = true;
      r.suspended.push_back(t);
      continue;
    }
    e.backup = compute_backup(cs.view, t, e.path);
  }
  return r;
}

RerouteReport on_link_recovery(ControllerState& cs, Fabric& fabric,
                               LinkKey link, SimTime now) {
  RerouteReport r;
  if (RadioLink* l = cs.view.link(link)) {
    l->state = LinkState::kUp;
  } else {
    throw Error(ErrorCode::kUnknownLink, "no link " + link.to_string());
  }
  for (auto& [t, e] : cs.plan) {
    if (e.suspended) {
      std::optional<Path> p;
      if (auto pin = cs.pinned.find(t);
          pin != cs.pinned.end() && path_alive(cs.view, pin->second)) {
        p = pin->second;
      } else {
        p = shortest_path(cs.view, t.origin, t.dest, {});
      }
      if (!p) continue;
      auto c = install_tunnel_path(cs, fabric, t, *p, now);
      r.changes.insert(r.changes.end(), c.begin(), c.end());
      e.active = PathRole::kPrimary;
      e.backup = compute_backup(cs.view, t, e.path);
      r.restored.push_back(t);
    } else if (!e.backup) {
      e.backup = compute_backup(cs.view, t, e.path);
    }
  }
  return r;
}

Frame on_client_attach(const MacAddress& mac) {
  Frame f;
  f.src = mac;
  f.dst = MacAddress::broadcast();
  f.kind = FrameKind::kArpRequest;
  return f;
}

}  // namespace swam
