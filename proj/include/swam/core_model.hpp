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

// Identity types, frames, VLAN stacks, tunnel VLAN allocation and the
// tunnel-budget arithmetic shared by every other module.

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace swam {

enum class ErrorCode {
  kCapacityExceeded,
  kEncodingOverflow,
  kUnknownVlan,
  kInvalidVlan,
  kStackOverflow,
  kStackUnderflow,
  kMalformedFrame,
  kNoRoute,
  kUnknownVport,
  kUnknownOuterTag,
  kInvalidSpec,
  kUnknownLink,
  kNoSuchVap,
  kVapCapExceeded,
  kDisconnected,
  kNotAGateway,
  kNoSamples,
  kParseError,
  kValidationError,
  kInvalidArgument,
  kIoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Simulation time in integer microseconds.
using SimTime = std::int64_t;

constexpr SimTime usec(std::int64_t v) { return v; }
constexpr SimTime msec(std::int64_t v) { return v * 1000; }
constexpr SimTime sec(std::int64_t v) { return v * 1000 * 1000; }

class MacAddress {
 public:
  constexpr MacAddress() = default;
  constexpr explicit MacAddress(std::array<std::uint8_t, 6> octets)
      : octets_(octets) {}

  static constexpr MacAddress broadcast() {
    return MacAddress({0xff, 0xff, 0xff, 0xff, 0xff, 0xff});
  }
  // Locally administered unicast address carrying the low 40 bits of `v`.
  static MacAddress from_u64(std::uint64_t v);
  // Parses "aa:bb:cc:dd:ee:ff"; throws kParseError.
  static MacAddress parse(std::string_view text);

  bool is_broadcast() const { return *this == broadcast(); }
  const std::array<std::uint8_t, 6>& octets() const { return octets_; }
  std::string to_string() const;

  auto operator<=>(const MacAddress&) const = default;

 private:
  std::array<std::uint8_t, 6> octets_{};
};

inline constexpr int kMinVlanId = 1;
inline constexpr int kMaxVlanId = 4094;
inline constexpr int kUsableVlanCount = kMaxVlanId - kMinVlanId + 1;
// Raw 12-bit tag space, used by the tunnel-budget arithmetic.
inline constexpr int kVlanTagSpace = 4096;

class VlanTag {
 public:
  // Throws kInvalidVlan outside 1..4094.
  explicit VlanTag(int id);

  int id() const { return id_; }
  auto operator<=>(const VlanTag&) const = default;

 private:
  std::uint16_t id_;
};

struct TenantId {
  int value = 1;
  auto operator<=>(const TenantId&) const = default;
};

struct NodeId {
  int index = 0;
  auto operator<=>(const NodeId&) const = default;
};

// "A" for tenant 1, "B" for 2, ...; numeric beyond 26.
std::string tenant_name(TenantId t);
// "s0", "s1", ...
std::string node_name(NodeId n);

// A unidirectional backhaul tunnel between two access bridges of one tenant.
struct TunnelId {
  TenantId tenant;
  NodeId origin;
  NodeId dest;

  TunnelId(TenantId t, NodeId from, NodeId to);

  TunnelId reversed() const { return TunnelId(tenant, dest, origin); }
  std::string to_string() const;
  auto operator<=>(const TunnelId&) const = default;
};

enum class FrameKind { kData, kArpRequest, kArpReply, kLlcXid, kProbe };

std::string_view to_string(FrameKind kind);

// At most two tags; index 0 is the outermost.
class VlanStack {
 public:
  static constexpr int kMaxDepth = 2;

  int depth() const { return depth_; }
  bool empty() const { return depth_ == 0; }
  VlanTag outer() const;
  VlanTag at(int i) const;

  void push(VlanTag tag);
  VlanTag pop();

  std::string to_string() const;
  bool operator==(const VlanStack& other) const;

 private:
  std::array<std::uint16_t, kMaxDepth> tags_{};  // tags_[0] is outermost
  int depth_ = 0;
};

struct Frame {
  MacAddress src;
  MacAddress dst;
  VlanStack vlans;
  FrameKind kind = FrameKind::kData;
  int size_bytes = 64;
  std::optional<std::uint64_t> flow_id;

  // Measurement metadata carried end to end.
  std::uint64_t seq = 0;
  SimTime sent_at = 0;
  SimTime hn_departure = -1;  // set on probe replies leaving the home network
  bool echo_reply = false;

  bool operator==(const Frame&) const = default;
};

Frame push_vlan(Frame f, VlanTag tag);
std::pair<Frame, VlanTag> pop_vlan(Frame f);

enum class VlanMode {
  kDigits,  // tenant*100 + origin*10 + dest
  kSequential,   // lowest free id >= 100, then the low range
};

std::string_view to_string(VlanMode mode);

// Bijection between tunnels and the VLAN ids that carry them.
class VlanAllocator {
 public:
  explicit VlanAllocator(VlanMode mode = VlanMode::kSequential,
                         int budget = kUsableVlanCount);

  // Idempotent. Throws kCapacityExceeded or kEncodingOverflow.
  VlanTag encode(const TunnelId& tunnel);
  // Throws kUnknownVlan.
  TunnelId decode(VlanTag tag) const;

  std::optional<VlanTag> find(const TunnelId& tunnel) const;
  bool contains(VlanTag tag) const { return by_tag_.count(tag.id()) != 0; }

  VlanMode mode() const { return mode_; }
  int budget() const { return budget_; }
  int size() const { return static_cast<int>(by_tunnel_.size()); }
  int remaining() const { return budget_ - size(); }

  const std::map<TunnelId, VlanTag>& assignments() const { return by_tunnel_; }

 private:
  int next_sequential() const;

  VlanMode mode_;
  int budget_;
  std::map<TunnelId, VlanTag> by_tunnel_;
  std::map<int, TunnelId> by_tag_;
};

VlanTag encode_tunnel_vlan(VlanAllocator& alloc, const TunnelId& tunnel);
TunnelId decode_tunnel_vlan(const VlanAllocator& alloc, VlanTag tag);

// Unidirectional tunnels needed when T tenants are present on all N nodes.
constexpr std::int64_t tunnel_count(std::int64_t tenants, std::int64_t nodes) {
  return 2 * tenants * nodes * (nodes - 1);
}

// Largest N with tunnel_count(tenants, N) <= budget.
std::int64_t max_nodes(std::int64_t tenants, std::int64_t budget);

enum class Direction { kIn, kOut };

// Why a frame copy stopped travelling.
enum class DropCause {
  kNoRoute,
  kCapacity,
  kDeadLink,
  kUnknownOuterTag,
  kIntDropRule,
  kIntNoMatch,
  kFiltered,    // learning bridge had nowhere to send it
  kUnattached,  // client gone or not yet admitted on the vap
  kMalformed,
};

inline constexpr int kDropCauseCount = 9;

std::string_view to_string(DropCause cause);

// `t=<us> node=<id> if=<name> dir=<in|out> src=<mac> dst=<mac>
//  vlans=[outer,inner] kind=<kind>`
std::string format_trace_line(SimTime t, std::string_view node,
                              std::string_view iface, Direction dir,
                              const Frame& f);

}  // namespace swam
