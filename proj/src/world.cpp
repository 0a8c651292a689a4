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

#include <algorithm>
#include <sstream>

#include "swam/simkit.hpp"

namespace swam {

namespace {

constexpr NodeId kHomeNode{-1};

std::string home_name(TenantId t) { return "hn_" + tenant_name(t); }

}  // namespace

std::string home_port_name(NodeId gateway) {
  return "gw_" + node_name(gateway);
}

MacAddress default_home_mac(TenantId t) {
  return MacAddress::from_u64(0xfe00000000ULL + std::uint64_t(t.value));
}

World::World(WorldConfig config, const TopologySpec& topology)
    : config_(config), rng_(config.seed) {
  auto built = build_topology(topology);
  topo_ = std::move(built.first);
  llids_ = std::move(built.second);
  for (NodeId n : topo_.node_ids()) {
    SwamNode node(n, topo_.is_wired(n));
    node.set_mac_aging(config_.mac_aging);
    node.mux() = MuxMap(n, 0);
    for (const auto& [peer, tag] : llids_.of(n)) {
      node.mux().bind_egress(peer, tag);
      node.mux().bind_ingress(peer, *llids_.llid(peer, n));
    }
    fabric_.emplace(n, std::move(node));
  }
  cs_.view = topo_;
  cs_.allocator = VlanAllocator(config_.vlan_mode, config_.vlan_budget);
  cs_.limits = config_.limits;
  metrics_.horizon = config_.horizon;
  metrics_.throughput_bin = config_.throughput_bin;
}

// --- setup ------------------------------------------------------------------

void World::declare_tenant(TenantId t, const std::set<NodeId>& gateways,
                           std::optional<MacAddress> home_mac) {
  log_rules(swam::declare_tenant(cs_, fabric_, t, gateways, now_));
  auto [it, inserted] = homes_.try_emplace(t);
  HomeNetwork& hn = it->second;
  if (inserted) {
    hn.tenant = t;
    hn.host = home_mac.value_or(default_home_mac(t));
    hn.macs = MacTable(config_.mac_aging);
    hn.ports.push_back(PortRef{kHomeNode, BridgeId::tenant(t), kHostPort});
  }
  for (NodeId g : cs_.presence.at(t).gateways) {
    PortRef p{kHomeNode, BridgeId::tenant(t), home_port_name(g)};
    if (std::find(hn.ports.begin(), hn.ports.end(), p) == hn.ports.end()) {
      hn.ports.push_back(p);
    }
  }
  std::sort(hn.ports.begin(), hn.ports.end());
}

void World::pin_path(const TunnelId& t, const Path& path, bool symmetric) {
  swam::pin_path(cs_, t, path);
  if (symmetric) {
    Path back(path.rbegin(), path.rend());
    swam::pin_path(cs_, t.reversed(), back);
  }
}

void World::provision(TenantId t, NodeId node, std::optional<NodeId> root) {
  log_rules(provision_presence(cs_, fabric_, t, node, now_, root));
  topo_.add_vap(node, t);
}

void World::add_client(const std::string& name, const MacAddress& mac,
                       TenantId tenant) {
  if (clients_.count(mac)) {
    throw Error(ErrorCode::kInvalidArgument,
                "duplicate client MAC " + mac.to_string());
  }
  clients_.emplace(mac, ClientState{name, tenant, false, 0});
}

std::size_t World::add_flow(const FlowConfig& flow) {
  if (!clients_.count(flow.client)) {
    throw Error(ErrorCode::kInvalidArgument,
                "flow " + flow.name + " uses an unknown client");
  }
  if (flow.kind == FlowKind::kCbr && flow.rate_bps <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "flow " + flow.name + " needs a positive rate");
  }
  if (flow.kind == FlowKind::kPing && flow.interval <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "flow " + flow.name + " needs a positive interval");
  }
  FlowMetrics fm;
  fm.config = flow;
  if (fm.config.stop <= 0) fm.config.stop = config_.horizon;
  metrics_.flows.push_back(fm);
  flow_state_.push_back(FlowState{});
  std::size_t idx = metrics_.flows.size() - 1;
  if (flow.autostart) schedule_flow(flow.start, idx, true);
  return idx;
}

std::optional<MacAddress> World::client_mac(const std::string& name) const {
  for (const auto& [mac, c] : clients_) {
    if (c.name == name) return mac;
  }
  return std::nullopt;
}

std::string World::client_name(const MacAddress& mac) const {
  auto it = clients_.find(mac);
  return it == clients_.end() ? mac.to_string() : it->second.name;
}

bool World::admitted(const MacAddress& mac) const {
  auto it = clients_.find(mac);
  return it != clients_.end() && it->second.admitted;
}

// --- timeline ---------------------------------------------------------------

void World::schedule(SimTime at, EventKind kind, std::function<void()> fn) {
  queue_.push(at, kind, Action{std::move(fn)});
}

void World::schedule_link_state(SimTime at, LinkKey link, LinkState state) {
  schedule(at, EventKind::kScenarioAction, [this, link, state] {
    auto ev = set_link_state(topo_, link, state, now_,
                             config_.detection_delay);
    record(state == LinkState::kDown ? "link_down" : "link_up",
           link.to_string());
    if (!ev) return;
    LinkEvent e = *ev;
    schedule(e.time, EventKind::kLinkEvent, [this, e] { link_notified(e); });
  });
}

void World::link_notified(const LinkEvent& ev) {
  record("link_notify", ev.link.to_string() + " " +
                            std::string(to_string(ev.new_state)));
  schedule(now_ + config_.controller_latency, EventKind::kControlAction,
           [this, ev] {
             std::string before = dump_int_and_access();
             RerouteReport r =
                 ev.new_state == LinkState::kDown
                     ? on_link_failure(cs_, fabric_, ev.link, now_)
                     : on_link_recovery(cs_, fabric_, ev.link, now_);
             log_rules(r.changes);
             std::string after = dump_int_and_access();
             auto describe = [&](const char* what,
                                 const std::vector<TunnelId>& ts) {
               for (const TunnelId& t : ts) {
                 const PlanEntry& e = cs_.plan.at(t);
                 record("reroute", t.to_string() + " " + what + " " +
                                       path_to_string(e.path));
               }
             };
             describe("backup", r.to_backup);
             describe("recomputed", r.recomputed);
             describe("suspended", r.suspended);
             describe("restored", r.restored);
             record("reroute_check", before == after
                                         ? "int/access unchanged"
                                         : "int/access changed");
           });
}

void World::schedule_update_root(SimTime at, TenantId t, NodeId node,
                                 NodeId new_root) {
  schedule(at, EventKind::kScenarioAction, [this, t, node, new_root] {
    record("update_root", tenant_name(t) + "@" + node_name(node) + " -> " +
                              node_name(new_root));
    schedule(now_ + config_.controller_latency, EventKind::kControlAction,
             [this, t, node, new_root] {
               std::vector<MacAddress> attached = topo_.clients_at(node, t);
               RootUpdate u = update_tenant_root(cs_, fabric_, t, node,
                                                 new_root, attached, now_);
               log_rules(u.changes);
               record("root_rules", tenant_name(t) + "@" + node_name(node) +
                                        " root " + node_name(new_root));
               for (const Frame& arp : u.spoofed_arps) {
                 schedule(now_ + config_.controller_latency,
                          EventKind::kControlAction, [this, t, node, arp] {
                            record("spoofed_arp",
                                   client_name(arp.src) + " at " +
                                       node_name(node));
                            count_injected(arp);
                            schedule_frame(
                                now_, NodeArrival{node,
                                                  vap_port_name(t, node), arp,
                                                  std::nullopt});
                          });
               }
             });
  });
}

void World::schedule_attach(SimTime at, const MacAddress& mac, NodeId node) {
  schedule(at, EventKind::kAttach, [this, mac, node] { do_attach(mac, node); });
}

void World::schedule_detach(SimTime at, const MacAddress& mac) {
  schedule(at, EventKind::kAttach, [this, mac] { do_detach(mac); });
}

void World::schedule_handover(SimTime at, const MacAddress& mac, NodeId node,
                              SimTime gap) {
  schedule(at, EventKind::kAttach, [this, mac, node, gap] {
    record("handover", client_name(mac) + " -> " + node_name(node));
    do_detach(mac);
    if (gap <= 0) {
      do_attach(mac, node);
    } else {
      schedule(now_ + gap, EventKind::kAttach,
               [this, mac, node] { do_attach(mac, node); });
    }
  });
}

void World::schedule_flow(SimTime at, std::size_t flow, bool start) {
  schedule(at, EventKind::kScenarioAction, [this, flow, start] {
    FlowState& s = flow_state_.at(flow);
    const FlowConfig& cfg = metrics_.flows.at(flow).config;
    if (start == s.active) return;
    s.active = start;
    ++s.generation;
    record(start ? "flow_start" : "flow_stop", cfg.name);
    if (start) {
      s.sent = 0;
      s.origin = now_;
      std::uint64_t gen = s.generation;
      schedule(now_, EventKind::kFlowTick,
               [this, flow, gen] { flow_tick(flow, gen); });
    }
  });
}

void World::inject_at_vap(SimTime at, TenantId t, NodeId node,
                          const Frame& f) {
  schedule(at, EventKind::kScenarioAction, [this, t, node, f] {
    count_injected(f);
    schedule_frame(now_, NodeArrival{node, vap_port_name(t, node), f,
                                     std::nullopt});
  });
}

void World::do_attach(const MacAddress& mac, NodeId node) {
  auto it = clients_.find(mac);
  if (it == clients_.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "attach of unknown client " + mac.to_string());
  }
  ClientState& c = it->second;
  AttachOutcome o = attach_client(topo_, mac, c.tenant, node, config_.llc_xid);
  record("attach", c.name + " at " + node_name(node));
  if (!o.changed) return;
  c.admitted = false;
  std::uint64_t epoch = ++c.epoch;
  std::string vap = vap_port_name(c.tenant, node);
  if (o.llc_xid) {
    record("llc_xid", c.name + " at " + node_name(node));
    count_injected(*o.llc_xid);
    schedule_frame(now_ + config_.access_latency,
                   NodeArrival{node, vap, *o.llc_xid, std::nullopt});
  }
  schedule(now_ + config_.agent_delay, EventKind::kControlAction,
           [this, mac, node, epoch, vap] {
             ClientState& cl = clients_.at(mac);
             if (cl.epoch != epoch) return;
             cl.admitted = true;
             Frame arp = on_client_attach(mac);
             record("agent_arp", cl.name + " at " + node_name(node));
             count_injected(arp);
             schedule_frame(now_, NodeArrival{node, vap, arp, std::nullopt});
           });
}

void World::do_detach(const MacAddress& mac) {
  auto it = clients_.find(mac);
  if (it == clients_.end()) return;
  auto old = detach_client(topo_, mac);
  it->second.admitted = false;
  ++it->second.epoch;
  if (old) {
    record("detach", it->second.name + " from " + node_name(old->node));
  }
}

// --- engine -----------------------------------------------------------------

void World::run() { run_until(config_.horizon); }

void World::run_until(SimTime t) {
  while (!queue_.empty() && queue_.next_time() <= t &&
         !metrics_.budget_exceeded) {
    Event e = queue_.pop();
    now_ = e.time;
    handle(e);
    if (config_.copy_budget > 0 &&
        metrics_.totals.copies > config_.copy_budget) {
      metrics_.budget_exceeded = true;
      record("copy_budget_exceeded", std::to_string(metrics_.totals.copies));
    }
  }
  if (!metrics_.budget_exceeded) now_ = std::max(now_, t);
}

void World::handle(Event& e) {
  std::visit(
      [&](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Action>) {
          p.fn();
        } else {
          --metrics_.in_flight;
          if constexpr (std::is_same_v<T, NodeArrival>) on_node_arrival(p);
          if constexpr (std::is_same_v<T, HomeArrival>) on_home_arrival(p);
          if constexpr (std::is_same_v<T, ClientArrival>) on_client_arrival(p);
        }
      },
      e.payload);
}

void World::schedule_frame(SimTime at, EventPayload payload) {
  ++metrics_.in_flight;
  queue_.push(at, EventKind::kFrameArrival, std::move(payload));
}

void World::flow_tick(std::size_t flow, std::uint64_t generation) {
  FlowState& s = flow_state_.at(flow);
  if (!s.active || s.generation != generation) return;
  const FlowConfig& cfg = metrics_.flows.at(flow).config;
  if (now_ >= cfg.stop) return;

  Frame f;
  f.src = cfg.client;
  f.dst = homes_.at(cfg.tenant).host;
  f.kind = cfg.kind == FlowKind::kPing ? FrameKind::kProbe : FrameKind::kData;
  f.size_bytes = cfg.kind == FlowKind::kPing ? kPingBytes : cfg.packet_bytes;
  f.flow_id = flow;
  f.seq = s.sent;
  f.sent_at = now_;
  count_injected(f);
  auto att = topo_.attachment(cfg.client);
  if (!att || !admitted(cfg.client)) {
    count_drop(f, DropCause::kUnattached);
  } else {
    schedule_frame(now_ + config_.access_latency,
                   NodeArrival{att->node, vap_port_name(att->tenant, att->node),
                               f, std::nullopt});
  }
  ++s.sent;
  SimTime next = s.origin + flow_offset(cfg, s.sent);
  if (next < cfg.stop && next <= config_.horizon) {
    schedule(next, EventKind::kFlowTick,
             [this, flow, generation] { flow_tick(flow, generation); });
  }
}

void World::on_node_arrival(NodeArrival& a) {
  trace(node_name(a.node), a.iface, Direction::kIn, a.frame);
  SwamNode& node = fabric_.at(a.node);
  NodeResult r = node.process(a.frame, a.iface, now_, a.transmitter);
  std::int64_t outputs =
      static_cast<std::int64_t>(r.emissions.size() + r.drops.size());
  if (outputs == 0) {
    count_drop(a.frame, DropCause::kFiltered);
  } else {
    count_copies(a.frame, outputs - 1);
  }
  for (const BridgeLearn& l : r.learned) {
    MacWrite w;
    w.t = now_;
    w.bridge = node_name(a.node) + "/" + bridge_name(BridgeId::tenant(l.tenant));
    w.node = a.node;
    w.tenant = l.tenant;
    w.mac = l.change.mac;
    w.from = l.change.previous ? l.change.previous->name : "";
    w.to = l.change.current.name;
    if (config_.record_mac_events) {
      record("mac_learn", w.bridge + " " + client_name(w.mac) + " " +
                              (w.from.empty() ? "-" : w.from) + "->" + w.to);
    }
    metrics_.mac_writes.push_back(std::move(w));
  }
  for (const NodeDrop& d : r.drops) count_drop(d.frame, d.cause);
  for (const Emission& e : r.emissions) emit(a.node, e);
}

void World::emit(NodeId node, const Emission& e) {
  trace(node_name(node), e.iface, Direction::kOut, e.frame);
  if (e.iface == kRadioName) {
    TransmitResult tr = transmit(topo_, llids_, meter_, node, e.frame, now_,
                                 hop_jitter());
    metrics_.overheard += tr.overheard;
    if (tr.arrival) {
      metrics_.link_bits[*tr.link][now_ / config_.throughput_bin] +=
          std::int64_t{e.frame.size_bytes} * 8;
      schedule_frame(tr.arrival->at,
                     NodeArrival{tr.arrival->node, kRadioName,
                                 std::move(tr.arrival->frame), node});
    } else {
      count_drop(e.frame, *tr.drop);
    }
    return;
  }
  auto owner = fabric_.at(node).owner_of(e.iface);
  if (!owner) {
    count_drop(e.frame, DropCause::kMalformed);
    return;
  }
  if (port_role(e.iface) == PortRole::kTunIf) {
    schedule_frame(now_ + config_.hn_latency,
                   HomeArrival{*owner, node, e.frame});
  } else {
    schedule_frame(now_ + config_.access_latency,
                   ClientArrival{node, *owner, e.frame});
  }
}

void World::on_client_arrival(ClientArrival& a) {
  const Frame& f = a.frame;
  if (f.dst.is_broadcast()) {
    count_sunk(f);
    return;
  }
  auto att = topo_.attachment(f.dst);
  if (!att || att->node != a.node || att->tenant != a.tenant) {
    count_drop(f, DropCause::kUnattached);
    return;
  }
  if (f.echo_reply && f.flow_id && *f.flow_id < metrics_.flows.size()) {
    FlowMetrics& fm = metrics_.flows[*f.flow_id];
    if (fm.config.client == f.dst) {
      fm.rtt.push_back(RttSample{now_, now_ - f.sent_at, f.hn_departure, f.seq});
    }
  }
  count_delivered(f);
}

void World::on_home_arrival(HomeArrival& a) {
  HomeNetwork& hn = homes_.at(a.tenant);
  std::string port = home_port_name(a.gateway);
  trace(home_name(a.tenant), port, Direction::kIn, a.frame);
  home_forward(hn, a.frame, PortRef{kHomeNode, BridgeId::tenant(a.tenant), port});
}

void World::home_forward(HomeNetwork& hn, const Frame& f, const PortRef& in) {
  BridgeResult b = bridge_forward(hn.macs, f, in, hn.ports, now_);
  if (b.learned) {
    MacWrite w;
    w.t = now_;
    w.bridge = "hn/" + tenant_name(hn.tenant);
    w.home = true;
    w.tenant = hn.tenant;
    w.mac = b.learned->mac;
    w.from = b.learned->previous ? b.learned->previous->name : "";
    w.to = b.learned->current.name;
    if (config_.record_mac_events) {
      record("mac_learn", w.bridge + " " + client_name(w.mac) + " " +
                              (w.from.empty() ? "-" : w.from) + "->" + w.to);
    }
    metrics_.mac_writes.push_back(std::move(w));
  }
  if (b.out.empty()) {
    count_drop(f, DropCause::kFiltered);
    return;
  }
  count_copies(f, static_cast<std::int64_t>(b.out.size()) - 1);
  for (const PortRef& p : b.out) {
    if (p.name == kHostPort) {
      trace(home_name(hn.tenant), p.name, Direction::kOut, f);
      host_receive(hn, f);
      continue;
    }
    trace(home_name(hn.tenant), p.name, Direction::kOut, f);
    NodeId gw{std::stoi(p.name.substr(4))};
    schedule_frame(now_ + config_.hn_latency,
                   NodeArrival{gw, tun_if_port_name(hn.tenant), f,
                               std::nullopt});
  }
}

void World::host_receive(HomeNetwork& hn, const Frame& f) {
  if (f.dst != hn.host) {
    count_sunk(f);
    // ARP requests (including spoofed ones) are answered; the unicast reply
    // re-teaches every bridge on the way back where the home network is.
    if (f.kind == FrameKind::kArpRequest && !f.src.is_broadcast()) {
      Frame reply;
      reply.src = hn.host;
      reply.dst = f.src;
      reply.kind = FrameKind::kArpReply;
      reply.size_bytes = f.size_bytes;
      reply.hn_departure = now_;
      count_injected(reply);
      home_forward(hn, reply,
                   PortRef{kHomeNode, BridgeId::tenant(hn.tenant), kHostPort});
    }
    return;
  }
  if (f.flow_id && *f.flow_id < metrics_.flows.size() && !f.echo_reply &&
      (f.kind == FrameKind::kData || f.kind == FrameKind::kProbe)) {
    FlowMetrics& fm = metrics_.flows[*f.flow_id];
    fm.hn_arrivals.push_back(now_);
    fm.hn_bytes.push_back(f.size_bytes);
  }
  count_delivered(f);
  if (f.kind == FrameKind::kProbe && !f.echo_reply) {
    Frame reply;
    reply.src = hn.host;
    reply.dst = f.src;
    reply.kind = FrameKind::kProbe;
    reply.size_bytes = f.size_bytes;
    reply.flow_id = f.flow_id;
    reply.seq = f.seq;
    reply.sent_at = f.sent_at;
    reply.hn_departure = now_;
    reply.echo_reply = true;
    count_injected(reply);
    home_forward(hn, reply,
                 PortRef{kHomeNode, BridgeId::tenant(hn.tenant), kHostPort});
  }
}

// --- accounting -------------------------------------------------------------

Counters* World::flow_counters(const Frame& f) {
  if (!f.flow_id || *f.flow_id >= metrics_.flows.size()) return nullptr;
  return &metrics_.flows[*f.flow_id].counters;
}

void World::count_injected(const Frame& f) {
  ++metrics_.totals.injected;
  if (Counters* c = flow_counters(f)) ++c->injected;
}

void World::count_copies(const Frame& f, std::int64_t n) {
  metrics_.totals.copies += n;
  if (Counters* c = flow_counters(f)) c->copies += n;
}

void World::count_delivered(const Frame& f) {
  ++metrics_.totals.delivered;
  if (Counters* c = flow_counters(f)) ++c->delivered;
}

void World::count_sunk(const Frame& f) {
  ++metrics_.totals.sunk;
  if (Counters* c = flow_counters(f)) ++c->sunk;
}

void World::count_drop(const Frame& f, DropCause cause) {
  ++metrics_.totals.drops[static_cast<int>(cause)];
  if (Counters* c = flow_counters(f)) ++c->drops[static_cast<int>(cause)];
}

void World::record(std::string kind, std::string detail) {
  metrics_.events.push_back(EventRecord{now_, std::move(kind), std::move(detail)});
}

void World::log_rules(const std::vector<RuleChange>& changes) {
  metrics_.rule_log.insert(metrics_.rule_log.end(), changes.begin(),
                           changes.end());
}

void World::trace(const std::string& node, const std::string& iface,
                  Direction dir, const Frame& f) {
  if (tracer_) tracer_(TraceRecord{now_, node, iface, dir, &f});
}

SimTime World::hop_jitter() {
  if (config_.jitter <= 0) return 0;
  return std::uniform_int_distribution<SimTime>(0, config_.jitter)(rng_);
}

// --- dumps ------------------------------------------------------------------

std::string World::dump_rules() const {
  std::ostringstream os;
  for (const auto& [id, node] : fabric_) os << dump_node(node);
  for (const auto& [t, hn] : homes_) {
    os << "home " << tenant_name(t) << " host=" << hn.host.to_string()
       << "\n  ports=";
    for (std::size_t i = 0; i < hn.ports.size(); ++i) {
      os << (i ? "," : "") << hn.ports[i].name;
    }
    os << "\n";
    for (const auto& [mac, entry] : hn.macs.entries()) {
      os << "  mac " << mac.to_string() << " -> " << entry.port.name << "\n";
    }
  }
  return os.str();
}

std::string World::dump_int_and_access() const {
  std::string out;
  for (const auto& [id, node] : fabric_) {
    out += "node " + node_name(id) + "\n" + dump_access(node) +
           dump_int_rules(node);
  }
  return out;
}

}  // namespace swam
