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

// Simulated backhaul medium: nodes, p2mp radio links with latency and a
// windowed capacity budget, LLID assignment, failures and client attachment.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "swam/core_model.hpp"

namespace swam {

enum class LinkState { kUp, kDown };

std::string_view to_string(LinkState s);

// Undirected node pair, stored with a < b.
struct LinkKey {
  NodeId a;
  NodeId b;

  static LinkKey of(NodeId x, NodeId y);
  bool touches(NodeId n) const { return a == n || b == n; }
  NodeId other(NodeId n) const { return a == n ? b : a; }
  std::string to_string() const;  // s1-s3
  auto operator<=>(const LinkKey&) const = default;
};

struct RadioLink {
  LinkKey key;
  SimTime latency = msec(1);
  std::int64_t capacity_bps = 0;  // 0 means unlimited
  LinkState state = LinkState::kUp;
};

struct NodeSpec {
  NodeId id;
  bool wired = false;
  int line = 0;
};

struct LinkSpec {
  NodeId a;
  NodeId b;
  SimTime latency = msec(1);
  std::int64_t capacity_bps = 0;
  int line = 0;
};

struct TopologySpec {
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;
};

struct Attachment {
  NodeId node;
  TenantId tenant;
  auto operator<=>(const Attachment&) const = default;
};

class Topology {
 public:
  void add_node(NodeId id, bool wired);
  void add_link(const RadioLink& link);

  bool has_node(NodeId n) const { return wired_.count(n) != 0; }
  bool is_wired(NodeId n) const;
  std::vector<NodeId> node_ids() const;

  const RadioLink* link(LinkKey key) const;
  RadioLink* link(LinkKey key);
  const std::map<LinkKey, RadioLink>& links() const { return links_; }
  bool is_up(NodeId x, NodeId y) const;

  // Sorted by id. `up_only` skips DOWN links.
  std::vector<NodeId> neighbors(NodeId n, bool up_only = false) const;

  // vap registry, kept in sync with provisioning.
  void add_vap(NodeId n, TenantId t) { vaps_.insert({n, t}); }
  bool has_vap(NodeId n, TenantId t) const { return vaps_.count({n, t}) != 0; }

  const std::map<MacAddress, Attachment>& attachments() const {
    return attach_;
  }
  std::optional<Attachment> attachment(const MacAddress& mac) const;
  std::vector<MacAddress> clients_at(NodeId n, TenantId t) const;

 private:
  friend struct AttachOutcome attach_client(Topology&, const MacAddress&,
                                            TenantId, NodeId, bool);
  friend std::optional<Attachment> detach_client(Topology&, const MacAddress&);

  std::map<NodeId, bool> wired_;
  std::map<LinkKey, RadioLink> links_;
  std::set<std::pair<NodeId, TenantId>> vaps_;
  std::map<MacAddress, Attachment> attach_;
};

// Per node: neighbor -> LLID that node uses to address it.
class LlidSpace {
 public:
  // Neighbors of each node sorted by id receive 1, 2, 3, ...
  static LlidSpace assign(const Topology& topo);

  std::optional<VlanTag> llid(NodeId node, NodeId neighbor) const;
  const std::map<NodeId, VlanTag>& of(NodeId node) const;
  const std::map<NodeId, std::map<NodeId, VlanTag>>& all() const {
    return table_;
  }
  bool operator==(const LlidSpace&) const = default;

 private:
  std::map<NodeId, std::map<NodeId, VlanTag>> table_;
};

struct LinkEvent {
  SimTime time = 0;
  LinkKey link;
  LinkState new_state = LinkState::kDown;
};

// Throws kInvalidSpec (message carries the scenario line when known).
std::pair<Topology, LlidSpace> build_topology(const TopologySpec& spec);

// Fixed-window budget per undirected link: capacity * window bits, windows
// aligned to multiples of `window`.
class CapacityMeter {
 public:
  static constexpr SimTime kDefaultWindow = msec(100);

  explicit CapacityMeter(SimTime window = kDefaultWindow) : window_(window) {}

  // Charges `bits` when they fit in the current window.
  bool admit(const RadioLink& link, std::int64_t bits, SimTime now);
  SimTime window() const { return window_; }

 private:
  struct Usage {
    std::int64_t window_index = -1;
    std::int64_t used_bits = 0;
  };
  SimTime window_;
  std::map<LinkKey, Usage> usage_;
};

struct Arrival {
  SimTime at = 0;
  NodeId node;         // receiver
  NodeId transmitter;  // sender
  Frame frame;
};

struct TransmitResult {
  std::optional<Arrival> arrival;
  std::optional<DropCause> drop;
  std::optional<LinkKey> link;  // the addressed link, when one exists
  int overheard = 0;  // UP neighbors that saw the frame and discarded it
};

// Offers a radio frame to every UP neighbor of `from`. Only the neighbor
// whose LLID (as assigned by `from`) equals the outer tag accepts it.
TransmitResult transmit(const Topology& topo, const LlidSpace& llids,
                        CapacityMeter& meter, NodeId from, const Frame& f,
                        SimTime now, SimTime extra_delay = 0);

// Returns the controller notification (due at now + detection_delay), or
// nothing when the link already was in `state`. Throws kUnknownLink.
std::optional<LinkEvent> set_link_state(Topology& topo, LinkKey link,
                                        LinkState state, SimTime now,
                                        SimTime detection_delay);

struct AttachOutcome {
  std::optional<Attachment> previous;
  bool changed = false;
  std::optional<Frame> llc_xid;  // broadcast to inject at the new vap
};

// Break-before-make. Throws kNoSuchVap.
AttachOutcome attach_client(Topology& topo, const MacAddress& mac,
                            TenantId tenant, NodeId node, bool llc_xid);
std::optional<Attachment> detach_client(Topology& topo, const MacAddress& mac);

}  // namespace swam
