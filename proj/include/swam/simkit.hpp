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

// Discrete-event engine, traffic sources and measurements. `World` owns the
// substrate, the node fabric, the controller and the tenants' home networks.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "swam/controller.hpp"
#include "swam/core_model.hpp"
#include "swam/datapath.hpp"
#include "swam/substrate.hpp"

namespace swam {

// --- events -----------------------------------------------------------------

enum class EventKind {
  kFrameArrival,
  kLinkEvent,
  kControlAction,
  kFlowTick,
  kAttach,
  kScenarioAction,
};

std::string_view to_string(EventKind k);

struct NodeArrival {
  NodeId node;
  std::string iface;
  Frame frame;
  std::optional<NodeId> transmitter;
};

struct HomeArrival {
  TenantId tenant;
  NodeId gateway;
  Frame frame;
};

struct ClientArrival {
  NodeId node;
  TenantId tenant;
  Frame frame;
};

struct Action {
  std::function<void()> fn;
};

using EventPayload =
    std::variant<NodeArrival, HomeArrival, ClientArrival, Action>;

struct Event {
  SimTime time = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kScenarioAction;
  EventPayload payload;
};

// Ordered by (time, insertion sequence).
class EventQueue {
 public:
  void push(SimTime t, EventKind kind, EventPayload payload);
  Event pop();
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  SimTime next_time() const { return heap_.top().time; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

// --- flows and metrics ------------------------------------------------------

enum class FlowKind { kCbr, kPing };

struct FlowConfig {
  std::string name;
  MacAddress client;
  TenantId tenant;
  FlowKind kind = FlowKind::kPing;
  std::int64_t rate_bps = 0;  // CBR
  int packet_bytes = 1250;    // CBR payload size; pings are 64 bytes
  SimTime interval = msec(5);  // PING
  SimTime start = 0;
  SimTime stop = 0;
  bool autostart = true;
};

inline constexpr int kPingBytes = 64;

// Send offset of the k-th packet relative to the flow start.
SimTime flow_offset(const FlowConfig& f, std::uint64_t k);
// Nominal spacing between packets.
SimTime nominal_interval(const FlowConfig& f);

struct Counters {
  std::int64_t injected = 0;
  std::int64_t copies = 0;
  std::int64_t delivered = 0;
  std::int64_t sunk = 0;
  std::array<std::int64_t, kDropCauseCount> drops{};

  std::int64_t total_drops() const;
};

struct RttSample {
  SimTime t = 0;  // reply receipt at the client
  SimTime rtt = 0;
  SimTime hn_departure = 0;
  std::uint64_t seq = 0;
};

struct FlowMetrics {
  FlowConfig config;
  std::vector<SimTime> hn_arrivals;  // requests / data at the home network
  std::vector<int> hn_bytes;
  std::vector<RttSample> rtt;
  Counters counters;
};

struct EventRecord {
  SimTime t = 0;
  std::string kind;
  std::string detail;
};

struct MacWrite {
  SimTime t = 0;
  std::string bridge;  // s4/br_A or hn/A
  bool home = false;
  std::optional<NodeId> node;
  TenantId tenant;
  MacAddress mac;
  std::string from;  // empty for a new entry
  std::string to;
};

struct MetricStore {
  SimTime horizon = 0;
  SimTime throughput_bin = sec(1);
  std::vector<FlowMetrics> flows;
  Counters totals;
  std::int64_t overheard = 0;
  std::int64_t in_flight = 0;
  bool budget_exceeded = false;
  std::vector<EventRecord> events;
  std::vector<RuleChange> rule_log;
  std::vector<MacWrite> mac_writes;
  std::map<LinkKey, std::map<std::int64_t, std::int64_t>> link_bits;

  std::optional<std::size_t> flow_index(const std::string& name) const;
  const FlowMetrics& flow(const std::string& name) const;
  // injected + copies == delivered + sunk + drops + in_flight
  bool conserved() const;
};

// Largest gap between consecutive deliveries (reply receipts for pings,
// home-network receipts for CBR) whose later delivery lies in
// [after, before), minus one nominal interval; never negative.
// Throws kNoSamples with fewer than two deliveries.
SimTime outage_duration(const MetricStore& m, const std::string& flow,
                        std::optional<SimTime> after = std::nullopt,
                        std::optional<SimTime> before = std::nullopt);

std::vector<std::pair<SimTime, SimTime>> rtt_series(const MetricStore& m,
                                                    const std::string& flow);

// bits/s per bin, measured where the home network receives the flow.
std::vector<std::pair<SimTime, double>> throughput_series(
    const MetricStore& m, const std::string& flow, SimTime bin);

// Home-network departure of the first reply received after `attach_time`,
// minus `attach_time`. Throws kNoSamples.
SimTime tunnel_update_time(const MetricStore& m, const std::string& flow,
                           SimTime attach_time);

// Writes flow_throughput.csv, rtt.csv, events.csv, drops.csv and
// rule_changes.log into `dir`.
void write_metrics(const MetricStore& m, const std::filesystem::path& dir);
std::string throughput_csv(const MetricStore& m);
std::string rtt_csv(const MetricStore& m);
std::string events_csv(const MetricStore& m);
std::string drops_csv(const MetricStore& m);
std::string rule_log_text(const MetricStore& m);

// --- world ------------------------------------------------------------------

struct WorldConfig {
  SimTime horizon = sec(10);
  std::uint64_t seed = 1;
  SimTime detection_delay = msec(50);
  SimTime controller_latency = msec(50);
  SimTime agent_delay = msec(20);
  SimTime access_latency = 0;
  SimTime hn_latency = 0;
  bool llc_xid = true;
  SimTime throughput_bin = sec(1);
  std::optional<SimTime> mac_aging;
  SimTime jitter = 0;  // uniform extra per-hop delay in [0, jitter]
  VlanMode vlan_mode = VlanMode::kSequential;
  int vlan_budget = kUsableVlanCount;
  ControllerLimits limits;
  std::int64_t copy_budget = 0;  // stop once exceeded; 0 disables
  bool record_mac_events = true;
};

struct HomeNetwork {
  TenantId tenant;
  MacAddress host;
  MacTable macs;
  std::vector<PortRef> ports;  // gw_s<k> per gateway, plus host
};

inline constexpr const char* kHostPort = "host";
std::string home_port_name(NodeId gateway);  // gw_s0
MacAddress default_home_mac(TenantId t);

struct TraceRecord {
  SimTime t = 0;
  std::string node;  // s1 or hn_A
  std::string iface;
  Direction dir = Direction::kIn;
  const Frame* frame = nullptr;
};

using Tracer = std::function<void(const TraceRecord&)>;

class World {
 public:
  World(WorldConfig config, const TopologySpec& topology);

  // Setup; everything before run() happens at the current time (0).
  void declare_tenant(TenantId t, const std::set<NodeId>& gateways,
                      std::optional<MacAddress> home_mac = std::nullopt);
  void pin_path(const TunnelId& t, const Path& path, bool symmetric);
  void provision(TenantId t, NodeId node,
                 std::optional<NodeId> root = std::nullopt);
  void add_client(const std::string& name, const MacAddress& mac,
                  TenantId tenant);
  std::size_t add_flow(const FlowConfig& flow);

  // Timeline actions.
  void schedule_link_state(SimTime at, LinkKey link, LinkState state);
  void schedule_update_root(SimTime at, TenantId t, NodeId node,
                            NodeId new_root);
  void schedule_attach(SimTime at, const MacAddress& mac, NodeId node);
  void schedule_detach(SimTime at, const MacAddress& mac);
  void schedule_handover(SimTime at, const MacAddress& mac, NodeId node,
                         SimTime gap);
  void schedule_flow(SimTime at, std::size_t flow, bool start);
  void schedule(SimTime at, EventKind kind, std::function<void()> fn);

  // Raw frame injection at a tenant vap, bypassing flows and admission.
  void inject_at_vap(SimTime at, TenantId t, NodeId node, const Frame& f);

  void run();
  void run_until(SimTime t);

  SimTime now() const { return now_; }
  const WorldConfig& config() const { return config_; }
  Fabric& fabric() { return fabric_; }
  const Fabric& fabric() const { return fabric_; }
  Topology& topology() { return topo_; }
  const Topology& topology() const { return topo_; }
  const LlidSpace& llids() const { return llids_; }
  ControllerState& controller() { return cs_; }
  const ControllerState& controller() const { return cs_; }
  MetricStore& metrics() { return metrics_; }
  const MetricStore& metrics() const { return metrics_; }
  const std::map<TenantId, HomeNetwork>& homes() const { return homes_; }
  std::optional<MacAddress> client_mac(const std::string& name) const;
  std::string client_name(const MacAddress& mac) const;
  bool admitted(const MacAddress& mac) const;

  void set_tracer(Tracer tracer) { tracer_ = std::move(tracer); }

  // Every node's bridges, rules, MUX map and the home-network tables.
  std::string dump_rules() const;
  // br_int rules and tenant-bridge ports/MACs only.
  std::string dump_int_and_access() const;

 private:
  struct ClientState {
    std::string name;
    TenantId tenant;
    bool admitted = false;
    std::uint64_t epoch = 0;  // bumps on every attach/detach
  };
  struct FlowState {
    std::uint64_t sent = 0;
    SimTime origin = 0;
    bool active = false;
    std::uint64_t generation = 0;
  };

  void handle(Event& e);
  void on_node_arrival(NodeArrival& a);
  void on_home_arrival(HomeArrival& a);
  void on_client_arrival(ClientArrival& a);
  void home_forward(HomeNetwork& hn, const Frame& f, const PortRef& in);
  void host_receive(HomeNetwork& hn, const Frame& f);
  void emit(NodeId node, const Emission& e);
  void flow_tick(std::size_t flow, std::uint64_t generation);
  void do_attach(const MacAddress& mac, NodeId node);
  void do_detach(const MacAddress& mac);
  void link_notified(const LinkEvent& ev);

  void count_injected(const Frame& f);
  void count_copies(const Frame& f, std::int64_t n);
  void count_delivered(const Frame& f);
  void count_sunk(const Frame& f);
  void count_drop(const Frame& f, DropCause cause);
  Counters* flow_counters(const Frame& f);
  void schedule_frame(SimTime at, EventPayload payload);
  void record(std::string kind, std::string detail);
  void log_rules(const std::vector<RuleChange>& changes);
  void trace(const std::string& node, const std::string& iface, Direction dir,
             const Frame& f);
  SimTime hop_jitter();

  WorldConfig config_;
  Topology topo_;
  LlidSpace llids_;
  CapacityMeter meter_;
  Fabric fabric_;
  ControllerState cs_;
  std::map<TenantId, HomeNetwork> homes_;
  std::map<MacAddress, ClientState> clients_;
  std::vector<FlowState> flow_state_;
  MetricStore metrics_;
  EventQueue queue_;
  SimTime now_ = 0;
  std::mt19937_64 rng_;
  Tracer tracer_;
};

// Runs the world to its horizon and returns the metrics.
const MetricStore& run(World& world);

}  // namespace swam
