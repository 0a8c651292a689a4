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

#include "swam/core_model.hpp"

#include <cstdio>
#include <sstream>

namespace swam {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCapacityExceeded: return "CapacityExceeded";
    case ErrorCode::kEncodingOverflow: return "EncodingOverflow";
    case ErrorCode::kUnknownVlan: return "UnknownVlan";
    case ErrorCode::kInvalidVlan: return "InvalidVlan";
    case ErrorCode::kStackOverflow: return "StackOverflow";
    case ErrorCode::kStackUnderflow: return "StackUnderflow";
    case ErrorCode::kMalformedFrame: return "MalformedFrame";
    case ErrorCode::kNoRoute: return "NoRoute";
    case ErrorCode::kUnknownVport: return "UnknownVport";
    case ErrorCode::kUnknownOuterTag: return "UnknownOuterTag";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kUnknownLink: return "UnknownLink";
    case ErrorCode::kNoSuchVap: return "NoSuchVap";
    case ErrorCode::kVapCapExceeded: return "VapCapExceeded";
    case ErrorCode::kDisconnected: return "Disconnected";
    case ErrorCode::kNotAGateway: return "NotAGateway";
    case ErrorCode::kNoSamples: return "NoSamples";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

MacAddress MacAddress::from_u64(std::uint64_t v) {
  std::array<std::uint8_t, 6> o{};
  o[0] = 0x02;
  for (int i = 5; i >= 1; --i) {
    o[i] = static_cast<std::uint8_t>(v & 0xff);
    v >>= 8;
  }
  return MacAddress(o);
}

MacAddress MacAddress::parse(std::string_view text) {
  std::array<std::uint8_t, 6> o{};
  auto fail = [&] {
    return Error(ErrorCode::kParseError,
                 "invalid MAC address '" + std::string(text) + "'");
  };
  if (text.size() != 17) throw fail();
  for (int i = 0; i < 6; ++i) {
    auto hex = [&](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      if (c >= 'A' && c <= 'F') return c - 'A' + 10;
      throw fail();
    };
    o[i] = static_cast<std::uint8_t>(hex(text[i * 3]) * 16 +
                                     hex(text[i * 3 + 1]));
    if (i < 5 && text[i * 3 + 2] != ':') throw fail();
  }
  return MacAddress(o);
}

std::string MacAddress::to_string() const {
  char buf[18];
  std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x", octets_[0],
                octets_[1], octets_[2], octets_[3], octets_[4], octets_[5]);
  return buf;
}

VlanTag::VlanTag(int id) : id_(static_cast<std::uint16_t>(id)) {
  if (id < kMinVlanId || id > kMaxVlanId) {
    throw Error(ErrorCode::kInvalidVlan,
                "VLAN id " + std::to_string(id) + " outside 1..4094");
  }
}

std::string tenant_name(TenantId t) {
  if (t.value >= 1 && t.value <= 26) {
    return std::string(1, static_cast<char>('A' + t.value - 1));
  }
  return "T" + std::to_string(t.value);
}

std::string node_name(NodeId n) { return "s" + std::to_string(n.index); }

TunnelId::TunnelId(TenantId t, NodeId from, NodeId to)
    : tenant(t), origin(from), dest(to) {
  if (from == to) {
    throw Error(ErrorCode::kInvalidArgument,
                "tunnel origin and destination must differ (" +
                    node_name(from) + ")");
  }
}

std::string TunnelId::to_string() const {
  return tenant_name(tenant) + ":" + std::to_string(origin.index) + "->" +
         std::to_string(dest.index);
}

std::string_view to_string(FrameKind kind) {
  switch (kind) {
    case FrameKind::kData: return "DATA";
    case FrameKind::kArpRequest: return "ARP_REQUEST";
    case FrameKind::kArpReply: return "ARP_REPLY";
    case FrameKind::kLlcXid: return "LLC_XID";
    case FrameKind::kProbe: return "PROBE";
  }
  return "?";
}

VlanTag VlanStack::outer() const { return at(0); }

VlanTag VlanStack::at(int i) const {
  if (i < 0 || i >= depth_) {
    throw Error(ErrorCode::kStackUnderflow,
                "VLAN stack index " + std::to_string(i) + " beyond depth " +
                    std::to_string(depth_));
  }
  return VlanTag(tags_[i]);
}

void VlanStack::push(VlanTag tag) {
  if (depth_ == kMaxDepth) {
    throw Error(ErrorCode::kStackOverflow, "VLAN stack already holds two tags");
  }
  if (depth_ == 1) tags_[1] = tags_[0];
  tags_[0] = static_cast<std::uint16_t>(tag.id());
  ++depth_;
}

VlanTag VlanStack::pop() {
  if (depth_ == 0) {
    throw Error(ErrorCode::kStackUnderflow, "pop on an untagged frame");
  }
  VlanTag top(tags_[0]);
  tags_[0] = tags_[1];
  tags_[1] = 0;
  --depth_;
  return top;
}

std::string VlanStack::to_string() const {
  std::string out = "[";
  for (int i = 0; i < depth_; ++i) {
    if (i) out += ",";
    out += std::to_string(tags_[i]);
  }
  return out + "]";
}

bool VlanStack::operator==(const VlanStack& other) const {
  if (depth_ != other.depth_) return false;
  for (int i = 0; i < depth_; ++i) {
    if (tags_[i] != other.tags_[i]) return false;
  }
  return true;
}

Frame push_vlan(Frame f, VlanTag tag) {
  f.vlans.push(tag);
  return f;
}

std::pair<Frame, VlanTag> pop_vlan(Frame f) {
  VlanTag tag = f.vlans.pop();
  return {std::move(f), tag};
}

std::string_view to_string(VlanMode mode) {
  return mode == VlanMode::kDigits ? "digits" : "sequential";
}

VlanAllocator::VlanAllocator(VlanMode mode, int budget)
    : mode_(mode), budget_(budget) {
  if (budget < 0 || budget > kUsableVlanCount) {
    throw Error(ErrorCode::kInvalidArgument,
                "VLAN budget must be within 0..4094");
  }
}

int VlanAllocator::next_sequential() const {
  for (int id = 100; id <= kMaxVlanId; ++id) {
    if (!by_tag_.count(id)) return id;
  }
  for (int id = kMinVlanId; id < 100; ++id) {
    if (!by_tag_.count(id)) return id;
  }
  return -1;
}

VlanTag VlanAllocator::encode(const TunnelId& tunnel) {
  if (auto it = by_tunnel_.find(tunnel); it != by_tunnel_.end()) {
    return it->second;
  }
  int id = -1;
  if (mode_ == VlanMode::kDigits) {
    if (tunnel.tenant.value < 1 || tunnel.tenant.value > 9 ||
        tunnel.origin.index < 0 || tunnel.origin.index > 9 ||
        tunnel.dest.index < 0 || tunnel.dest.index > 9) {
      throw Error(ErrorCode::kEncodingOverflow,
                  "tunnel " + tunnel.to_string() +
                      " does not fit the three-digit VLAN encoding");
    }
    id = tunnel.tenant.value * 100 + tunnel.origin.index * 10 +
         tunnel.dest.index;
  }
  if (size() >= budget_) {
    throw Error(ErrorCode::kCapacityExceeded,
                "VLAN budget of " + std::to_string(budget_) + " exhausted");
  }
  if (mode_ == VlanMode::kSequential) {
    id = next_sequential();
    if (id < 0) {
      throw Error(ErrorCode::kCapacityExceeded, "no free VLAN id remains");
    }
  }
  VlanTag tag(id);
  by_tunnel_.emplace(tunnel, tag);
  by_tag_.emplace(id, tunnel);
  return tag;
}

TunnelId VlanAllocator::decode(VlanTag tag) const {
  auto it = by_tag_.find(tag.id());
  if (it == by_tag_.end()) {
    throw Error(ErrorCode::kUnknownVlan,
                "VLAN " + std::to_string(tag.id()) + " is not allocated");
  }
  return it->second;
}

std::optional<VlanTag> VlanAllocator::find(const TunnelId& tunnel) const {
  auto it = by_tunnel_.find(tunnel);
  if (it == by_tunnel_.end()) return std::nullopt;
  return it->second;
}

VlanTag encode_tunnel_vlan(VlanAllocator& alloc, const TunnelId& tunnel) {
  return alloc.encode(tunnel);
}

TunnelId decode_tunnel_vlan(const VlanAllocator& alloc, VlanTag tag) {
  return alloc.decode(tag);
}

std::int64_t max_nodes(std::int64_t tenants, std::int64_t budget) {
  if (tenants < 1 || budget < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "max_nodes needs tenants >= 1 and budget >= 0");
  }
  std::int64_t n = 1;
  while (tunnel_count(tenants, n + 1) <= budget) ++n;
  return n;
}

std::string_view to_string(DropCause cause) {
  switch (cause) {
    case DropCause::kNoRoute: return "no-route";
    case DropCause::kCapacity: return "capacity";
    case DropCause::kDeadLink: return "dead-link";
    case DropCause::kUnknownOuterTag: return "unknown-outer-tag";
    case DropCause::kIntDropRule: return "int-drop-rule";
    case DropCause::kIntNoMatch: return "int-no-match";
    case DropCause::kFiltered: return "filtered";
    case DropCause::kUnattached: return "unattached";
    case DropCause::kMalformed: return "malformed";
  }
  return "?";
}

std::string format_trace_line(SimTime t, std::string_view node,
                              std::string_view iface, Direction dir,
                              const Frame& f) {
  std::ostringstream os;
  os << "t=" << t << " node=" << node << " if=" << iface
     << " dir=" << (dir == Direction::kIn ? "in" : "out")
     << " src=" << f.src.to_string() << " dst=" << f.dst.to_string()
     << " vlans=" << f.vlans.to_string() << " kind=" << to_string(f.kind);
  return os.str();
}

}  // namespace swam
