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

#include "swam/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "swam/presets.hpp"

namespace swam {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Exact decimal scaling: "0.5" * 1000000 -> 500000. Throws when the result
// is not an integer.
std::int64_t scaled_decimal(std::string_view number, std::int64_t scale,
                            std::string_view original) {
  auto fail = [&] {
    return Error(ErrorCode::kParseError,
                 "invalid quantity '" + std::string(original) + "'");
  };
  if (number.empty()) throw fail();
  std::size_t dot = number.find('.');
  std::string_view whole = number.substr(0, dot);
  std::string_view frac =
      dot == std::string_view::npos ? std::string_view{} : number.substr(dot + 1);
  if (whole.empty() && frac.empty()) throw fail();
  std::int64_t value = 0;
  for (char c : whole) {
    if (!std::isdigit(static_cast<unsigned char>(c))) throw fail();
    value = value * 10 + (c - '0');
  }
  value *= scale;
  std::int64_t denom = 1;
  std::int64_t part = 0;
  for (char c : frac) {
    if (!std::isdigit(static_cast<unsigned char>(c))) throw fail();
    part = part * 10 + (c - '0');
    denom *= 10;
    if (denom > 1000000000LL) throw fail();
  }
  if ((part * scale) % denom != 0) throw fail();
  return value + part * scale / denom;
}

std::pair<std::string_view, std::string_view> split_unit(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() &&
         (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) {
    ++i;
  }
  return {s.substr(0, i), s.substr(i)};
}

bool parse_bool(std::string_view v) {
  if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
  if (v == "off" || v == "false" || v == "no" || v == "0") return false;
  throw Error(ErrorCode::kParseError,
              "expected on/off, got '" + std::string(v) + "'");
}

std::int64_t parse_int(std::string_view v) {
  if (v.empty()) throw Error(ErrorCode::kParseError, "expected an integer");
  std::int64_t out = 0;
  for (char c : v) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw Error(ErrorCode::kParseError,
                  "expected an integer, got '" + std::string(v) + "'");
    }
    out = out * 10 + (c - '0');
  }
  return out;
}

std::vector<NodeId> parse_node_list(std::string_view v) {
  std::vector<NodeId> out;
  if (trim(v).empty()) return out;
  for (const std::string& tok : split_on(v, ',')) out.push_back(parse_node(tok));
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, std::string name)
      : text_(text), name_(std::move(name)) {
    s_.name = name_;
    s_.params.horizon = sec(10);
  }

  Scenario parse() {
    std::istringstream in{std::string(text_)};
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_;
      std::string_view l = raw;
      if (auto hash = l.find('#'); hash != std::string_view::npos) {
        l = l.substr(0, hash);
      }
      l = trim(l);
      if (l.empty()) continue;
      try {
        if (l.front() == '[') {
          if (l.back() != ']') fail("unterminated section header");
          section_ = std::string(trim(l.substr(1, l.size() - 2)));
          static const std::set<std::string> known = {
              "parameters", "topology", "tenants", "clients", "flows",
              "timeline"};
          if (!known.count(section_)) fail("unknown section [" + section_ + "]");
          continue;
        }
        if (section_.empty()) fail("content before the first section");
        if (section_ == "parameters") parameter(l);
        else if (section_ == "topology") topology(split_ws(l));
        else if (section_ == "tenants") tenants(split_ws(l));
        else if (section_ == "clients") client(split_ws(l));
        else if (section_ == "flows") flow(split_ws(l));
        else timeline(split_ws(l));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kParseError &&
            std::string_view(e.what()).rfind(name_ + ":", 0) == 0) {
          throw;
        }
        throw Error(ErrorCode::kParseError, where() + e.what());
      }
    }
    // Flows switched on by the timeline wait for it unless given a start.
    for (FlowSpec& f : s_.flows) {
      if (f.has_start) continue;
      bool started_later = std::any_of(
          s_.timeline.begin(), s_.timeline.end(), [&](const auto& a) {
            return a.kind == ActionKind::kFlowStart && a.name == f.config.name;
          });
      f.config.autostart = !started_later;
    }
    return s_;
  }

 private:
  std::string where() const {
    return name_ + ":" + std::to_string(line_) + ": ";
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::kParseError, where() + msg);
  }

  // key=value pairs after the positional words.
  std::map<std::string, std::string> options(
      const std::vector<std::string>& toks, std::size_t from,
      std::vector<std::string>* positional = nullptr) {
    std::map<std::string, std::string> out;
    for (std::size_t i = from; i < toks.size(); ++i) {
      auto eq = toks[i].find('=');
      if (eq == std::string::npos) {
        if (!positional) fail("unexpected word '" + toks[i] + "'");
        positional->push_back(toks[i]);
        continue;
      }
      std::string key = toks[i].substr(0, eq);
      if (out.count(key)) fail("repeated option " + key);
      out[key] = toks[i].substr(eq + 1);
    }
    return out;
  }

  void reject_unknown(const std::map<std::string, std::string>& opts,
                      std::initializer_list<std::string_view> allowed) {
    for (const auto& [k, v] : opts) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        fail("unknown option " + k);
      }
    }
  }

  void parameter(std::string_view l) {
    auto eq = l.find('=');
    if (eq == std::string_view::npos) fail("expected key = value");
    std::string key(trim(l.substr(0, eq)));
    std::string_view v = trim(l.substr(eq + 1));
    WorldConfig& p = s_.params;
    if (key == "horizon") p.horizon = parse_duration(v);
    else if (key == "seed") p.seed = static_cast<std::uint64_t>(parse_int(v));
    else if (key == "detection_delay") p.detection_delay = parse_duration(v);
    else if (key == "controller_latency") p.controller_latency = parse_duration(v);
    else if (key == "agent_delay") p.agent_delay = parse_duration(v);
    else if (key == "access_latency") p.access_latency = parse_duration(v);
    else if (key == "hn_latency") p.hn_latency = parse_duration(v);
    else if (key == "llc_xid") p.llc_xid = parse_bool(v);
    else if (key == "throughput_bin") p.throughput_bin = parse_duration(v);
    else if (key == "jitter") p.jitter = parse_duration(v);
    else if (key == "copy_budget") p.copy_budget = parse_int(v);
    else if (key == "vaps_per_radio") p.limits.vaps_per_radio = static_cast<int>(parse_int(v));
    else if (key == "max_tenants") p.limits.max_tenants = static_cast<int>(parse_int(v));
    else if (key == "vlan_budget") p.vlan_budget = static_cast<int>(parse_int(v));
    else if (key == "mac_aging") {
      if (v == "off") p.mac_aging.reset();
      else p.mac_aging = parse_duration(v);
    } else if (key == "vlan_mode") {
      if (v == "digits") p.vlan_mode = VlanMode::kDigits;
      else if (v == "sequential") p.vlan_mode = VlanMode::kSequential;
      else fail("vlan_mode must be digits or sequential");
    } else {
      fail("unknown parameter " + key);
    }
  }

  void topology(const std::vector<std::string>& t) {
    if (t[0] == "node") {
      if (t.size() < 2 || t.size() > 3) fail("usage: node s<k> [wired]");
      if (t.size() == 3 && t[2] != "wired") fail("unknown node flag " + t[2]);
      s_.topology.nodes.push_back(NodeSpec{parse_node(t[1]), t.size() == 3, line_});
    } else if (t[0] == "link_defaults") {
      auto o = options(t, 1);
      reject_unknown(o, {"latency", "capacity"});
      if (o.count("latency")) link_latency_ = parse_duration(o["latency"]);
      if (o.count("capacity")) link_capacity_ = parse_rate(o["capacity"]);
    } else if (t[0] == "link") {
      if (t.size() < 3) fail("usage: link s<a> s<b> [latency=] [capacity=]");
      auto o = options(t, 3);
      reject_unknown(o, {"latency", "capacity"});
      LinkSpec l{parse_node(t[1]), parse_node(t[2]), link_latency_,
                 link_capacity_, line_};
      if (o.count("latency")) l.latency = parse_duration(o["latency"]);
      if (o.count("capacity")) l.capacity_bps = parse_rate(o["capacity"]);
      s_.topology.links.push_back(l);
    } else {
      fail("unknown topology entry " + t[0]);
    }
  }

  void tenants(const std::vector<std::string>& t) {
    if (t[0] == "tenant") {
      if (t.size() < 2) fail("usage: tenant <A-Z> vaps=... gateways=...");
      TenantSpec spec;
      spec.id = parse_tenant(t[1]);
      spec.line = line_;
      auto o = options(t, 2);
      reject_unknown(o, {"id", "vaps", "gateways", "home"});
      if (o.count("id") && parse_int(o["id"]) != spec.id.value) {
        fail("tenant " + t[1] + " must have id " +
             std::to_string(spec.id.value));
      }
      if (o.count("vaps")) spec.vaps = parse_node_list(o["vaps"]);
      if (o.count("gateways")) spec.gateways = parse_node_list(o["gateways"]);
      if (o.count("home")) spec.home_mac = MacAddress::parse(o["home"]);
      s_.tenants.push_back(spec);
    } else if (t[0] == "root") {
      if (t.size() != 4) fail("usage: root <tenant> <node> <gateway>");
      s_.roots.push_back(RootSpec{parse_tenant(t[1]), parse_node(t[2]),
                                  parse_node(t[3]), line_});
    } else if (t[0] == "path") {
      if (t.size() < 4) fail("usage: path <tenant> <node> <node>... [symmetric]");
      PathSpec p;
      p.tenant = parse_tenant(t[1]);
      p.line = line_;
      for (std::size_t i = 2; i < t.size(); ++i) {
        if (t[i] == "symmetric" && i + 1 == t.size()) {
          p.symmetric = true;
        } else {
          p.path.push_back(parse_node(t[i]));
        }
      }
      if (p.path.size() < 2) fail("a path needs at least two nodes");
      s_.paths.push_back(p);
    } else {
      fail("unknown tenants entry " + t[0]);
    }
  }

  void client(const std::vector<std::string>& t) {
    if (t[0] != "client" || t.size() < 2) {
      fail("usage: client <name> mac=... tenant=... [node=...]");
    }
    auto o = options(t, 2);
    reject_unknown(o, {"mac", "tenant", "node"});
    if (!o.count("mac") || !o.count("tenant")) fail("client needs mac= and tenant=");
    ClientSpec c;
    c.name = t[1];
    c.mac = MacAddress::parse(o["mac"]);
    c.tenant = parse_tenant(o["tenant"]);
    if (o.count("node")) c.node = parse_node(o["node"]);
    c.line = line_;
    s_.clients.push_back(c);
  }

  void flow(const std::vector<std::string>& t) {
    if (t[0] != "flow" || t.size() < 3) {
      fail("usage: flow <name> client=... ping|cbr ...");
    }
    std::vector<std::string> words;
    auto o = options(t, 2, &words);
    if (words.size() != 1 || (words[0] != "ping" && words[0] != "cbr")) {
      fail("flow kind must be ping or cbr");
    }
    FlowSpec f;
    f.line = line_;
    f.config.name = t[1];
    f.config.kind = words[0] == "ping" ? FlowKind::kPing : FlowKind::kCbr;
    if (!o.count("client")) fail("flow needs client=");
    f.client = o["client"];
    if (f.config.kind == FlowKind::kPing) {
      reject_unknown(o, {"client", "interval", "start", "stop"});
      if (o.count("interval")) f.config.interval = parse_duration(o["interval"]);
    } else {
      reject_unknown(o, {"client", "rate", "size", "start", "stop"});
      if (!o.count("rate")) fail("cbr flow needs rate=");
      f.config.rate_bps = parse_rate(o["rate"]);
      if (o.count("size")) f.config.packet_bytes = static_cast<int>(parse_int(o["size"]));
    }
    if (o.count("start")) {
      f.config.start = parse_duration(o["start"]);
      f.has_start = true;
    }
    if (o.count("stop")) f.config.stop = parse_duration(o["stop"]);
    s_.flows.push_back(f);
  }

  void timeline(const std::vector<std::string>& t) {
    if (t[0] != "at" || t.size() < 3) fail("usage: at <time> <action> ...");
    TimelineAction a;
    a.at = parse_duration(t[1]);
    a.line = line_;
    const std::string& verb = t[2];
    auto need = [&](std::size_t n) {
      if (t.size() != n) fail("wrong number of arguments for " + verb);
    };
    if (verb == "link_down" || verb == "link_up") {
      need(5);
      a.kind = verb == "link_down" ? ActionKind::kLinkDown : ActionKind::kLinkUp;
      a.a = parse_node(t[3]);
      a.b = parse_node(t[4]);
    } else if (verb == "update_root") {
      need(6);
      a.kind = ActionKind::kUpdateRoot;
      a.tenant = parse_tenant(t[3]);
      a.a = parse_node(t[4]);
      a.b = parse_node(t[5]);
    } else if (verb == "handover") {
      if (t.size() < 5 || t.size() > 6) fail("usage: at <t> handover <client> <node> [gap=]");
      a.kind = ActionKind::kHandover;
      a.name = t[3];
      a.a = parse_node(t[4]);
      if (t.size() == 6) {
        auto o = options(t, 5);
        reject_unknown(o, {"gap"});
        a.gap = parse_duration(o["gap"]);
      }
    } else if (verb == "attach") {
      need(5);
      a.kind = ActionKind::kAttach;
      a.name = t[3];
      a.a = parse_node(t[4]);
    } else if (verb == "detach") {
      need(4);
      a.kind = ActionKind::kDetach;
      a.name = t[3];
    } else if (verb == "flow_start" || verb == "flow_stop") {
      need(4);
      a.kind = verb == "flow_start" ? ActionKind::kFlowStart : ActionKind::kFlowStop;
      a.name = t[3];
    } else {
      fail("unknown action " + verb);
    }
    s_.timeline.push_back(a);
  }

  std::string_view text_;
  std::string name_;
  Scenario s_;
  std::string section_;
  int line_ = 0;
  SimTime link_latency_ = msec(1);
  std::int64_t link_capacity_ = 0;
};

[[noreturn]] void invalid(const Scenario& s, int line, const std::string& msg) {
  throw Error(ErrorCode::kValidationError,
              s.name + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

SimTime parse_duration(std::string_view text) {
  auto [num, unit] = split_unit(trim(text));
  std::int64_t scale = 0;
  if (unit == "us") scale = 1;
  else if (unit == "ms") scale = 1000;
  else if (unit == "s") scale = 1000000;
  else {
    throw Error(ErrorCode::kParseError,
                "duration '" + std::string(text) + "' needs a unit us|ms|s");
  }
  return scaled_decimal(num, scale, text);
}

std::int64_t parse_rate(std::string_view text) {
  auto [num, unit] = split_unit(trim(text));
  std::int64_t scale = 0;
  if (unit == "bps") scale = 1;
  else if (unit == "kbps") scale = 1000;
  else if (unit == "Mbps") scale = 1000000;
  else if (unit == "Gbps") scale = 1000000000;
  else {
    throw Error(ErrorCode::kParseError,
                "rate '" + std::string(text) + "' needs a unit bps|kbps|Mbps|Gbps");
  }
  return scaled_decimal(num, scale, text);
}

NodeId parse_node(std::string_view text) {
  if (text.size() < 2 || text[0] != 's') {
    throw Error(ErrorCode::kParseError,
                "node names look like s0, s1, ...; got '" + std::string(text) + "'");
  }
  return NodeId{static_cast<int>(parse_int(text.substr(1)))};
}

TenantId parse_tenant(std::string_view text) {
  if (text.size() != 1 || text[0] < 'A' || text[0] > 'Z') {
    throw Error(ErrorCode::kParseError,
                "tenant names are single letters A-Z; got '" + std::string(text) + "'");
  }
  return TenantId{text[0] - 'A' + 1};
}

Scenario parse_scenario(std::string_view text, const std::string& name) {
  Scenario s = Parser(text, name).parse();
  validate_scenario(s);
  return s;
}

void validate_scenario(const Scenario& s) {
  if (s.params.horizon <= 0) invalid(s, 0, "horizon must be positive");
  if (s.params.throughput_bin <= 0) invalid(s, 0, "throughput_bin must be positive");

  std::map<NodeId, bool> wired;
  for (const NodeSpec& n : s.topology.nodes) {
    if (wired.count(n.id)) invalid(s, n.line, "duplicate node " + node_name(n.id));
    wired[n.id] = n.wired;
  }
  if (wired.size() < 2) invalid(s, 0, "topology needs at least two nodes");
  std::set<LinkKey> links;
  for (const LinkSpec& l : s.topology.links) {
    if (!wired.count(l.a) || !wired.count(l.b)) {
      invalid(s, l.line, "link references an unknown node");
    }
    if (l.a == l.b) invalid(s, l.line, "link from a node to itself");
    if (!links.insert(LinkKey::of(l.a, l.b)).second) {
      invalid(s, l.line, "duplicate link " + LinkKey::of(l.a, l.b).to_string());
    }
  }
  auto node_known = [&](NodeId n, int line) {
    if (!wired.count(n)) invalid(s, line, "unknown node " + node_name(n));
  };

  std::map<TenantId, const TenantSpec*> tenants;
  for (const TenantSpec& t : s.tenants) {
    if (tenants.count(t.id)) invalid(s, t.line, "tenant " + tenant_name(t.id) + " declared twice");
    tenants[t.id] = &t;
    if (t.gateways.empty()) {
      invalid(s, t.line, "tenant " + tenant_name(t.id) + " has no gateway");
    }
    for (NodeId n : t.vaps) node_known(n, t.line);
    for (NodeId g : t.gateways) {
      node_known(g, t.line);
      if (!wired[g]) invalid(s, t.line, "gateway " + node_name(g) + " is not wired");
    }
  }
  auto tenant_of = [&](TenantId id, int line) -> const TenantSpec& {
    auto it = tenants.find(id);
    if (it == tenants.end()) invalid(s, line, "unknown tenant " + tenant_name(id));
    return *it->second;
  };
  auto has_vap = [](const TenantSpec& t, NodeId n) {
    return std::find(t.vaps.begin(), t.vaps.end(), n) != t.vaps.end();
  };
  auto is_gateway = [](const TenantSpec& t, NodeId n) {
    return std::find(t.gateways.begin(), t.gateways.end(), n) != t.gateways.end();
  };

  for (const RootSpec& r : s.roots) {
    const TenantSpec& t = tenant_of(r.tenant, r.line);
    if (!has_vap(t, r.node)) invalid(s, r.line, node_name(r.node) + " has no vap for tenant " + tenant_name(r.tenant));
    if (!is_gateway(t, r.root)) invalid(s, r.line, node_name(r.root) + " is not a gateway of tenant " + tenant_name(r.tenant));
    if (is_gateway(t, r.node) && r.node != r.root) invalid(s, r.line, "a gateway is its own root");
  }
  for (const PathSpec& p : s.paths) {
    const TenantSpec& t = tenant_of(p.tenant, p.line);
    for (NodeId n : p.path) node_known(n, p.line);
    for (std::size_t k = 0; k + 1 < p.path.size(); ++k) {
      if (!links.count(LinkKey::of(p.path[k], p.path[k + 1]))) {
        invalid(s, p.line, "path hop " + node_name(p.path[k]) + "-" + node_name(p.path[k + 1]) + " is not a link");
      }
    }
    for (NodeId end : {p.path.front(), p.path.back()}) {
      if (!has_vap(t, end) && !is_gateway(t, end)) {
        invalid(s, p.line, "path end " + node_name(end) + " has no tenant bridge");
      }
    }
    if (p.path.front() == p.path.back()) invalid(s, p.line, "path must join two nodes");
  }

  std::map<std::string, const ClientSpec*> clients;
  std::set<MacAddress> macs;
  for (const ClientSpec& c : s.clients) {
    if (clients.count(c.name)) invalid(s, c.line, "duplicate client " + c.name);
    if (!macs.insert(c.mac).second) invalid(s, c.line, "duplicate MAC " + c.mac.to_string());
    if (c.mac.is_broadcast()) invalid(s, c.line, "client MAC cannot be broadcast");
    clients[c.name] = &c;
    const TenantSpec& t = tenant_of(c.tenant, c.line);
    if (c.node) {
      node_known(*c.node, c.line);
      if (!has_vap(t, *c.node)) invalid(s, c.line, "client " + c.name + " placed on " + node_name(*c.node) + ", which has no vap for tenant " + tenant_name(c.tenant));
    }
  }
  std::set<std::string> flows;
  for (const FlowSpec& f : s.flows) {
    if (!flows.insert(f.config.name).second) invalid(s, f.line, "duplicate flow " + f.config.name);
    if (!clients.count(f.client)) invalid(s, f.line, "unknown client " + f.client);
    if (f.config.kind == FlowKind::kCbr && f.config.rate_bps <= 0) invalid(s, f.line, "rate must be positive");
    if (f.config.kind == FlowKind::kPing && f.config.interval <= 0) invalid(s, f.line, "interval must be positive");
    if (f.config.kind == FlowKind::kCbr && f.config.packet_bytes <= 0) invalid(s, f.line, "size must be positive");
    if (f.config.stop > 0 && f.config.stop <= f.config.start) invalid(s, f.line, "stop must come after start");
    if (f.config.start > s.params.horizon) invalid(s, f.line, "flow starts after the horizon");
  }

  SimTime last = 0;
  for (const TimelineAction& a : s.timeline) {
    if (a.at > s.params.horizon) invalid(s, a.line, "action at " + std::to_string(a.at) + "us is beyond the horizon");
    if (a.at < last) invalid(s, a.line, "timeline must be in time order");
    last = a.at;
    switch (a.kind) {
      case ActionKind::kLinkDown:
      case ActionKind::kLinkUp:
        if (!links.count(LinkKey::of(a.a, a.b))) invalid(s, a.line, "unknown link " + LinkKey::of(a.a, a.b).to_string());
        break;
      case ActionKind::kUpdateRoot: {
        const TenantSpec& t = tenant_of(a.tenant, a.line);
        if (!has_vap(t, a.a)) invalid(s, a.line, node_name(a.a) + " has no vap for tenant " + tenant_name(a.tenant));
        if (!is_gateway(t, a.b)) invalid(s, a.line, node_name(a.b) + " is not a gateway of tenant " + tenant_name(a.tenant));
        if (is_gateway(t, a.a) && a.a != a.b) invalid(s, a.line, "a gateway is its own root");
        break;
      }
      case ActionKind::kHandover:
      case ActionKind::kAttach: {
        auto c = clients.find(a.name);
        if (c == clients.end()) invalid(s, a.line, "unknown client " + a.name);
        node_known(a.a, a.line);
        if (!has_vap(tenant_of(c->second->tenant, a.line), a.a)) {
          invalid(s, a.line, node_name(a.a) + " has no vap for the tenant of " + a.name);
        }
        break;
      }
      case ActionKind::kDetach:
        if (!clients.count(a.name)) invalid(s, a.line, "unknown client " + a.name);
        break;
      case ActionKind::kFlowStart:
      case ActionKind::kFlowStop:
        if (!flows.count(a.name)) invalid(s, a.line, "unknown flow " + a.name);
        break;
    }
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kParseError, "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.filename().string());
}

Scenario load_scenario_or_preset(const std::string& ref) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(ref, ec)) return load_scenario(ref);
  if (auto text = preset_text(ref)) return parse_scenario(*text, ref + ".scn");
  std::string names;
  for (const PresetFile& p : preset_files()) {
    names += names.empty() ? "" : ", ";
    names += p.name;
  }
  throw Error(ErrorCode::kParseError,
              "no scenario file or preset named '" + ref + "' (presets: " +
                  names + ")");
}

std::unique_ptr<World> build_world(const Scenario& s) {
  auto world = std::make_unique<World>(s.params, s.topology);
  auto at_line = [&](int line, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kValidationError) throw;
      invalid(s, line, e.what());
    }
  };
  // Pins must exist before tunnels between gateways are placed.
  for (const PathSpec& p : s.paths) {
    at_line(p.line, [&] {
      world->pin_path(TunnelId(p.tenant, p.path.front(), p.path.back()),
                      p.path, p.symmetric);
    });
  }
  for (const TenantSpec& t : s.tenants) {
    at_line(t.line, [&] {
      world->declare_tenant(t.id, {t.gateways.begin(), t.gateways.end()},
                            t.home_mac);
    });
  }
  for (const TenantSpec& t : s.tenants) {
    for (NodeId n : t.vaps) {
      std::optional<NodeId> root;
      for (const RootSpec& r : s.roots) {
        if (r.tenant == t.id && r.node == n) root = r.root;
      }
      at_line(t.line, [&] { world->provision(t.id, n, root); });
    }
  }
  for (const ClientSpec& c : s.clients) {
    at_line(c.line, [&] {
      world->add_client(c.name, c.mac, c.tenant);
      if (c.node) world->schedule_attach(0, c.mac, *c.node);
    });
  }
  std::map<std::string, std::size_t> flow_ids;
  for (const FlowSpec& f : s.flows) {
    at_line(f.line, [&] {
      FlowConfig cfg = f.config;
      for (const ClientSpec& c : s.clients) {
        if (c.name == f.client) {
          cfg.client = c.mac;
          cfg.tenant = c.tenant;
        }
      }
      flow_ids[cfg.name] = world->add_flow(cfg);
    });
  }
  for (const TimelineAction& a : s.timeline) {
    auto mac = [&] { return *world->client_mac(a.name); };
    switch (a.kind) {
      case ActionKind::kLinkDown:
        world->schedule_link_state(a.at, LinkKey::of(a.a, a.b), LinkState::kDown);
        break;
      case ActionKind::kLinkUp:
        world->schedule_link_state(a.at, LinkKey::of(a.a, a.b), LinkState::kUp);
        break;
      case ActionKind::kUpdateRoot:
        world->schedule_update_root(a.at, a.tenant, a.a, a.b);
        break;
      case ActionKind::kHandover:
        world->schedule_handover(a.at, mac(), a.a, a.gap);
        break;
      case ActionKind::kAttach:
        world->schedule_attach(a.at, mac(), a.a);
        break;
      case ActionKind::kDetach:
        world->schedule_detach(a.at, mac());
        break;
      case ActionKind::kFlowStart:
      case ActionKind::kFlowStop:
        world->schedule_flow(a.at, flow_ids.at(a.name),
                             a.kind == ActionKind::kFlowStart);
        break;
    }
  }
  return world;
}

}  // namespace swam
