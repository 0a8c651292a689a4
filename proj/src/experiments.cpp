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

#include "swam/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace swam {

namespace {

// Window after a disruptive event in which its effects are measured.
constexpr SimTime kEffectWindow = sec(2);

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + p.string());
  out << text;
}

std::string mbps(double bps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f Mbps", bps / 1e6);
  return buf;
}

// Link latency summed along the installed tunnel node -> root.
SimTime tunnel_latency(const World& w, TenantId t, NodeId from, NodeId to) {
  auto it = w.controller().plan.find(TunnelId(t, from, to));
  if (it == w.controller().plan.end()) return 0;
  SimTime total = 0;
  const Path& p = it->second.path;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    if (const RadioLink* l = w.topology().link(LinkKey::of(p[k], p[k + 1]))) {
      total += l->latency;
    }
  }
  return total;
}

std::optional<NodeId> root_of(const World& w, TenantId t, NodeId node) {
  auto p = w.controller().presence.find(t);
  if (p == w.controller().presence.end()) return std::nullopt;
  auto r = p->second.root_of.find(node);
  if (r == p->second.root_of.end()) return std::nullopt;
  return r->second;
}

std::vector<const FlowSpec*> flows_of(const Scenario& s, FlowKind kind,
                                      const std::string& client = {}) {
  std::vector<const FlowSpec*> out;
  for (const FlowSpec& f : s.flows) {
    if (f.config.kind == kind && (client.empty() || f.client == client)) {
      out.push_back(&f);
    }
  }
  return out;
}

const ClientSpec* client_spec(const Scenario& s, const std::string& name) {
  for (const ClientSpec& c : s.clients) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string outage_text(const MetricStore& m, const std::string& flow,
                        SimTime from) {
  try {
    return format_ms(outage_duration(m, flow, from, from + kEffectWindow));
  } catch (const Error&) {
    return "n/a (no deliveries)";
  }
}

void report_link_event(std::ostream& os, const Scenario& s, const World& w,
                       const TimelineAction& a) {
  const WorldConfig& c = w.config();
  const MetricStore& m = w.metrics();
  LinkKey link = LinkKey::of(a.a, a.b);
  os << "\n[" << format_ms(a.at) << "] link " << link.to_string() << " "
     << (a.kind == ActionKind::kLinkDown ? "down" : "up") << "\n";
  if (a.kind == ActionKind::kLinkDown) {
    os << "  expected outage  detection " << format_ms(c.detection_delay)
       << " + controller " << format_ms(c.controller_latency) << " = "
       << format_ms(c.detection_delay + c.controller_latency) << "\n";
  }
  for (const EventRecord& e : m.events) {
    if (e.t < a.at || e.t >= a.at + kEffectWindow) continue;
    if (e.kind == "reroute" || e.kind == "reroute_check") {
      os << "  " << e.kind << " at " << format_ms(e.t) << ": " << e.detail
         << "\n";
    }
  }
  for (const FlowSpec* f : flows_of(s, FlowKind::kPing)) {
    os << "  outage " << f->config.name << ": "
       << outage_text(m, f->config.name, a.at) << "\n";
  }
}

void report_update_root(std::ostream& os, const Scenario& s, const World& w,
                        const TimelineAction& a) {
  const WorldConfig& c = w.config();
  const MetricStore& m = w.metrics();
  os << "\n[" << format_ms(a.at) << "] update_root " << tenant_name(a.tenant)
     << "@" << node_name(a.a) << " -> " << node_name(a.b) << "\n";
  std::optional<SimTime> rules, arp;
  for (const EventRecord& e : m.events) {
    if (e.t < a.at) continue;
    if (e.kind == "root_rules" && !rules) rules = e.t;
    if (e.kind == "spoofed_arp" && !arp) arp = e.t;
  }
  if (rules) os << "  rules enabled at   " << format_ms(*rules) << "\n";
  if (arp) os << "  spoofed ARP sent at " << format_ms(*arp) << "\n";
  if (rules && arp) {
    os << "  ordering: rules " << (*rules < *arp ? "before" : "NOT before")
       << " spoofed ARP\n";
  }
  // Spoofed request up to the home network, then its reply back down.
  SimTime prop = 2 * (tunnel_latency(w, a.tenant, a.a, a.b) + c.hn_latency +
                      c.access_latency);
  os << "  expected outage  controller " << format_ms(c.controller_latency)
     << " + ARP round trip " << format_ms(prop) << " = "
     << format_ms(c.controller_latency + prop) << "\n";
  for (const ClientSpec& cl : s.clients) {
    if (cl.tenant != a.tenant) continue;
    for (const FlowSpec* f : flows_of(s, FlowKind::kPing, cl.name)) {
      const std::string& name = f->config.name;
      auto before = median_rtt(m, name, a.at - sec(1), a.at);
      auto after = median_rtt(m, name, a.at + kEffectWindow,
                              a.at + kEffectWindow + sec(1));
      os << "  " << name << " outage " << outage_text(m, name, a.at)
         << ", RTT " << (before ? format_ms(*before) : "n/a") << " -> "
         << (after ? format_ms(*after) : "n/a") << "\n";
    }
  }
}

void report_handover(std::ostream& os, const Scenario& s, const World& w,
                     const TimelineAction& a) {
  const WorldConfig& c = w.config();
  const MetricStore& m = w.metrics();
  const ClientSpec* cl = client_spec(s, a.name);
  SimTime attach = a.at + a.gap;
  os << "\n[" << format_ms(a.at) << "] handover " << a.name << " -> "
     << node_name(a.a) << " (attach at " << format_ms(attach) << ")\n";
  if (!cl) return;
  std::optional<NodeId> root = root_of(w, cl->tenant, a.a);
  SimTime prop = c.access_latency + c.hn_latency +
                 (root ? tunnel_latency(w, cl->tenant, a.a, *root) : 0);
  os << "  gateway " << (root ? node_name(*root) : "?") << "\n";
  os << "  expected tunnel update  agent " << format_ms(c.agent_delay)
     << " + flood propagation " << format_ms(prop) << " = "
     << format_ms(c.agent_delay + prop) << "\n";
  for (const FlowSpec* f : flows_of(s, FlowKind::kPing, a.name)) {
    os << "  tunnel update " << f->config.name << ": ";
    try {
      os << format_ms(tunnel_update_time(m, f->config.name, attach)) << "\n";
    } catch (const Error&) {
      os << "n/a (no reply)\n";
    }
  }
  std::vector<std::string> bridges;
  int writes = 0;
  for (const MacWrite& mw : m.mac_writes) {
    if (mw.mac != cl->mac || mw.t < a.at || mw.t >= a.at + sec(1)) continue;
    ++writes;
    if (std::find(bridges.begin(), bridges.end(), mw.bridge) == bridges.end()) {
      bridges.push_back(mw.bridge);
    }
  }
  os << "  MAC table writes: " << writes << " on";
  for (const std::string& b : bridges) os << " " << b;
  os << "\n";
}

}  // namespace

std::string format_ms(SimTime t) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f ms", static_cast<double>(t) / 1000.0);
  return buf;
}

std::optional<SimTime> median_rtt(const MetricStore& m, const std::string& flow,
                                  SimTime from, SimTime to) {
  std::vector<SimTime> v;
  for (const RttSample& r : m.flow(flow).rtt) {
    if (r.t >= from && r.t < to) v.push_back(r.rtt);
  }
  if (v.empty()) return std::nullopt;
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

double mean_throughput(const MetricStore& m, const std::string& flow,
                       SimTime from, SimTime to) {
  if (to <= from) return 0.0;
  const FlowMetrics& f = m.flow(flow);
  std::int64_t bits = 0;
  for (std::size_t i = 0; i < f.hn_arrivals.size(); ++i) {
    if (f.hn_arrivals[i] >= from && f.hn_arrivals[i] < to) {
      bits += std::int64_t{f.hn_bytes[i]} * 8;
    }
  }
  return static_cast<double>(bits) * 1e6 / static_cast<double>(to - from);
}

std::string build_report(const Scenario& s, const World& w) {
  const WorldConfig& c = w.config();
  const MetricStore& m = w.metrics();
  std::ostringstream os;
  os << "scenario " << s.name << "\n"
     << "horizon " << format_ms(c.horizon) << ", seed " << c.seed << "\n"
     << "configured delays: detection " << format_ms(c.detection_delay)
     << ", controller " << format_ms(c.controller_latency) << ", agent "
     << format_ms(c.agent_delay) << ", access " << format_ms(c.access_latency)
     << ", home network " << format_ms(c.hn_latency) << "\n"
     << "llc_xid " << (c.llc_xid ? "on" : "off") << "\n";

  SimTime first_event = c.horizon;
  for (const TimelineAction& a : s.timeline) {
    switch (a.kind) {
      case ActionKind::kLinkDown:
      case ActionKind::kLinkUp:
        report_link_event(os, s, w, a);
        break;
      case ActionKind::kUpdateRoot:
        report_update_root(os, s, w, a);
        break;
      case ActionKind::kHandover:
        report_handover(os, s, w, a);
        break;
      default:
        continue;
    }
    first_event = std::min(first_event, a.at);
  }

  if (!s.flows.empty()) os << "\nflows\n";
  for (const FlowSpec& f : s.flows) {
    const FlowMetrics& fm = m.flow(f.config.name);
    os << "  " << f.config.name << " ("
       << (f.config.kind == FlowKind::kPing ? "ping" : "cbr")
       << "): injected " << fm.counters.injected << ", delivered "
       << fm.counters.delivered << ", drops " << fm.counters.total_drops();
    if (f.config.kind == FlowKind::kPing) {
      auto rtt = median_rtt(m, f.config.name, 0, c.horizon + 1);
      os << ", median RTT " << (rtt ? format_ms(*rtt) : "n/a");
    } else {
      SimTime start = f.config.start;
      SimTime stop = fm.config.stop;
      // Skip the first bin after each boundary so transients do not bias.
      SimTime settle = c.throughput_bin;
      os << ", throughput before "
         << mbps(mean_throughput(m, f.config.name, start + settle,
                                 std::min(first_event, stop)));
      if (first_event < stop) {
        os << ", after "
           << mbps(mean_throughput(m, f.config.name, first_event + settle,
                                   stop));
      }
    }
    os << "\n";
  }

  os << "\ndrops\n";
  for (int i = 0; i < kDropCauseCount; ++i) {
    if (m.totals.drops[i] == 0) continue;
    os << "  " << to_string(static_cast<DropCause>(i)) << " "
       << m.totals.drops[i] << "\n";
  }
  os << "  total " << m.totals.total_drops() << "\n";
  os << "\nframe accounting: injected " << m.totals.injected << ", copies "
     << m.totals.copies << ", delivered " << m.totals.delivered << ", sunk "
     << m.totals.sunk << ", in flight " << m.in_flight << " ("
     << (m.conserved() ? "balanced" : "UNBALANCED") << ")\n";
  if (m.budget_exceeded) os << "copy budget exceeded; run stopped early\n";
  return os.str();
}

ExperimentResult simulate(const Scenario& s, const RunOptions& opts) {
  Scenario copy = s;
  if (opts.seed) copy.params.seed = *opts.seed;
  ExperimentResult r;
  r.world = build_world(copy);
  r.world->run();
  r.report = build_report(copy, *r.world);
  return r;
}

ExperimentResult run_experiment(const Scenario& s,
                                const std::filesystem::path& out,
                                const RunOptions& opts) {
  std::filesystem::create_directories(out);
  Scenario copy = s;
  if (opts.seed) copy.params.seed = *opts.seed;
  ExperimentResult r;
  r.world = build_world(copy);
  std::ofstream trace;
  if (opts.trace) {
    trace.open(out / "trace.log", std::ios::binary);
    if (!trace) throw Error(ErrorCode::kIoError, "cannot write trace.log");
    r.world->set_tracer([&trace](const TraceRecord& t) {
      trace << format_trace_line(t.t, t.node, t.iface, t.dir, *t.frame) << "\n";
    });
  }
  r.world->run();
  r.world->set_tracer(nullptr);
  r.report = build_report(copy, *r.world);
  write_metrics(r.world->metrics(), out);
  write_file(out / "report.txt", r.report);
  for (const char* f : {"flow_throughput.csv", "rtt.csv", "events.csv",
                        "drops.csv", "rule_changes.log", "report.txt"}) {
    r.files.push_back(out / f);
  }
  if (opts.trace) r.files.push_back(out / "trace.log");
  return r;
}

std::string dump_rules(const Scenario& s, SimTime at) {
  if (at > s.params.horizon) {
    throw Error(ErrorCode::kValidationError,
                "dump time is beyond the scenario horizon");
  }
  std::unique_ptr<World> w = build_world(s);
  w->run_until(at);
  return w->dump_rules();
}

}  // namespace swam
