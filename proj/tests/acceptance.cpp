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

// Acceptance checks 1-10. One line per criterion:
//   [PASS] <n> <title>: <measurements> (<seconds> s)
// Exit status is nonzero when any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "support/corpus.hpp"
#include "swam/experiments.hpp"
#include "swam/presets.hpp"

namespace {

using namespace swam;

// Tolerances.
constexpr SimTime kExp1Tolerance = msec(5);       // one 5 ms ping interval
constexpr SimTime kExp2Tolerance = msec(5);       // one 5 ms ping interval
constexpr SimTime kExp3Tolerance = msec(1);       // one 1 ms ping interval
constexpr double kCongestionTolerance = 0.05;     // of link capacity
constexpr int kCorpusSize = 1000;
constexpr std::uint64_t kCorpusSeed = 20260001;
constexpr std::int64_t kLoopCopyBudget = 10000;
// Runtime limits, seconds.
constexpr double kLimitArithmetic = 1.0;
constexpr double kLimitGolden = 1.0;
constexpr double kLimitCorpus = 30.0;
constexpr double kLimitExperiment = 10.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Checker {
 public:
  void require(bool ok, const std::string& what) {
    out_.pass = out_.pass && ok;
    if (!out_.detail.empty()) out_.detail += "; ";
    out_.detail += (ok ? "" : "FAILED ") + what;
  }
  Outcome take() { return std::move(out_); }

 private:
  Outcome out_;
};

std::string ms(SimTime t) { return format_ms(t); }

Scenario preset(const std::string& name) {
  return parse_scenario(*preset_text(name), name + ".scn");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SimTime first_event(const MetricStore& m, const std::string& kind,
                    SimTime after = 0) {
  for (const EventRecord& e : m.events) {
    if (e.kind == kind && e.t >= after) return e.t;
  }
  return -1;
}

// --- 1 ---------------------------------------------------------------------

Outcome scalability() {
  Checker c;
  std::int64_t n10 = max_nodes(10, kVlanTagSpace);
  std::int64_t n5 = max_nodes(5, kVlanTagSpace);
  c.require(n10 == 14, "max_nodes(10,4096)=" + std::to_string(n10));
  c.require(n5 == 20, "max_nodes(5,4096)=" + std::to_string(n5));
  int mismatches = 0;
  for (int t = 1; t <= 12; ++t) {
    for (int n = 2; n <= 25; ++n) {
      // Every (tenant, origin, dest, direction) with origin != dest.
      std::int64_t brute = 0;
      for (int k = 0; k < t; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int dir = 0; dir < 2; ++dir)
              if (i != j) ++brute;
      if (brute != tunnel_count(t, n)) ++mismatches;
    }
  }
  c.require(mismatches == 0, "tunnel_count vs enumeration mismatches=" +
                                 std::to_string(mismatches) + " over T<=12,N<=25");
  return c.take();
}

// --- 2 ---------------------------------------------------------------------

Outcome golden() {
  Checker c;
  std::string dump = dump_rules(preset("star"), 0);
  std::string expected = read_file(SWAM_SOURCE_DIR "/tests/golden/star_rules.txt");
  c.require(!expected.empty() && dump == expected,
            "dump equals tests/golden/star_rules.txt (" +
                std::to_string(dump.size()) + " bytes)");
  std::string s0 = dump.substr(0, dump.find("node s1"));
  for (const char* rule : {"prio=10 in=p_A_0_2 push=102 out=patch_bh",
                           "prio=10 in=p_A_0_3 push=103 out=patch_bh",
                           "prio=10 in=patch_bh vlan=120 pop out=p_A_0_2",
                           "prio=10 in=patch_bh vlan=130 pop out=p_A_0_3"}) {
    c.require(s0.find(rule) != std::string::npos,
              std::string("s0 has '") + rule + "'");
  }
  return c.take();
}

// --- 3, 4 ------------------------------------------------------------------

testing::CorpusStats& corpus() {
  static testing::CorpusStats stats =
      testing::run_traffic_corpus(kCorpusSize, kCorpusSeed);
  return stats;
}

Outcome tag_discipline() {
  Checker c;
  const auto& st = corpus();
  c.require(st.scenarios == kCorpusSize,
            std::to_string(st.scenarios) + " scenarios, " +
                std::to_string(st.frames_injected) + " frames injected");
  c.require(st.radio_emissions > 0 && st.access_emissions > 0,
            std::to_string(st.radio_emissions) + " radio and " +
                std::to_string(st.access_emissions) + " vap/tun_if emissions");
  c.require(st.tag_violations == 0,
            "violations=" + std::to_string(st.tag_violations));
  c.require(st.unbalanced_runs == 0,
            "runs with unbalanced frame accounting=" +
                std::to_string(st.unbalanced_runs));
  for (const std::string& e : st.examples) std::cerr << "  " << e << "\n";
  return c.take();
}

Outcome isolation() {
  Checker c;
  const auto& st = corpus();
  c.require(st.scenarios == kCorpusSize,
            "same corpus, " + std::to_string(st.scenarios) + " scenarios");
  c.require(st.isolation_violations == 0,
            "cross-tenant emissions=" + std::to_string(st.isolation_violations));
  return c.take();
}

// --- 5 ---------------------------------------------------------------------

Outcome loop_freedom() {
  Checker c;
  testing::LoopStats st = testing::run_broadcast_corpus(kCorpusSize, kCorpusSeed);
  c.require(st.wrong_counts == 0,
            std::to_string(st.broadcasts) + " broadcasts, " +
                std::to_string(st.endpoint_checks) +
                " endpoint checks, wrong delivery counts=" +
                std::to_string(st.wrong_counts));
  for (const std::string& e : st.examples) std::cerr << "  " << e << "\n";
  auto w = testing::run_loop_negative_control(kLoopCopyBudget);
  c.require(w->metrics().budget_exceeded,
            "negative control without drop rules: copies=" +
                std::to_string(w->metrics().totals.copies) + " > " +
                std::to_string(kLoopCopyBudget));
  return c.take();
}

// --- 6 ---------------------------------------------------------------------

Outcome experiment1() {
  Checker c;
  Scenario s = preset("exp1");
  SimTime down = s.timeline.at(0).at;
  auto w = build_world(s);
  w->run_until(down - 1);
  std::string before = w->dump_int_and_access();
  w->run();
  std::string after = w->dump_int_and_access();
  const MetricStore& m = w->metrics();
  SimTime expected = s.params.detection_delay + s.params.controller_latency;
  SimTime outage = outage_duration(m, "ping_B1", down, down + sec(2));
  c.require(std::llabs(outage - expected) <= kExp1Tolerance,
            "STA_B1 outage " + ms(outage) + " vs detection+controller " +
                ms(expected) + " +/- " + ms(kExp1Tolerance));
  bool rerouted = false;
  for (const EventRecord& e : m.events) {
    if (e.kind == "reroute" && e.detail == "B:1->4 backup [s1,s2,s4]") rerouted = true;
  }
  c.require(rerouted, "B:1->4 rerouted to [s1,s2,s4]");
  c.require(before == after, "int/access dumps identical before/after");

  // Same property with delays configured to sum to 246 ms.
  Scenario slow = s;
  slow.params.detection_delay = msec(146);
  slow.params.controller_latency = msec(100);
  auto w2 = build_world(slow);
  w2->run();
  SimTime outage2 = outage_duration(w2->metrics(), "ping_B1", down, down + sec(2));
  c.require(std::llabs(outage2 - msec(246)) <= kExp1Tolerance,
            "with 146+100 ms configured: outage " + ms(outage2) + " vs 246.000 ms +/- " +
                ms(kExp1Tolerance));
  return c.take();
}

// --- 7 ---------------------------------------------------------------------

Outcome experiment2() {
  Checker c;
  Scenario s = preset("exp2");
  const TimelineAction* upd = nullptr;
  for (const TimelineAction& a : s.timeline) {
    if (a.kind == ActionKind::kUpdateRoot) upd = &a;
  }
  if (!upd) {
    c.require(false, "exp2 has no update_root action");
    return c.take();
  }
  ExperimentResult r = simulate(s);
  const MetricStore& m = r.world->metrics();
  auto before = median_rtt(m, "ping_B1", upd->at - sec(5), upd->at);
  auto after = median_rtt(m, "ping_B1", upd->at + sec(2), upd->at + sec(5));
  c.require(before && *before == msec(4),
            "RTT before " + (before ? ms(*before) : std::string("n/a")));
  c.require(after && *after == msec(2),
            "RTT after " + (after ? ms(*after) : std::string("n/a")));
  // ARP propagation: the spoofed request to the home network and its reply.
  const Path& path =
      r.world->controller().plan.at(TunnelId(upd->tenant, upd->a, upd->b)).path;
  SimTime one_way = s.params.access_latency + s.params.hn_latency;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    one_way += r.world->topology().link(LinkKey::of(path[k], path[k + 1]))->latency;
  }
  SimTime expected = s.params.controller_latency + 2 * one_way;
  SimTime outage = outage_duration(m, "ping_B1", upd->at, upd->at + sec(2));
  c.require(std::llabs(outage - expected) <= kExp2Tolerance,
            "outage " + ms(outage) + " vs controller+ARP round trip " +
                ms(expected) + " +/- " + ms(kExp2Tolerance));
  SimTime arp = first_event(m, "spoofed_arp", upd->at);
  SimTime last_rule = -1;
  bool drop_seen = false;
  for (const RuleChange& rc : m.rule_log) {
    if (rc.time < upd->at || (arp >= 0 && rc.time > arp)) continue;
    last_rule = std::max(last_rule, rc.time);
    drop_seen = drop_seen || rc.is_drop_rule();
  }
  c.require(arp >= 0 && drop_seen && last_rule < arp,
            "root rules at " + ms(last_rule) + " before spoofed ARP at " + ms(arp));
  return c.take();
}

// --- 8 ---------------------------------------------------------------------

struct HandoverView {
  std::set<std::string> gateway_bridges;  // gateway tenant bridges and HN
  int writes = 0;
  SimTime update = -1;
  SimTime expected = 0;
};

Outcome experiment3() {
  Checker c;
  Scenario s = preset("exp3");
  ExperimentResult r = simulate(s);
  const World& w = *r.world;
  const MetricStore& m = w.metrics();
  std::map<std::string, HandoverView> views;
  for (const TimelineAction& a : s.timeline) {
    if (a.kind != ActionKind::kHandover) continue;
    HandoverView v;
    MacAddress mac = *w.client_mac(a.name);
    TenantId t{};
    for (const ClientSpec& cs : s.clients) {
      if (cs.name == a.name) t = cs.tenant;
    }
    const TenantPresence& p = w.controller().presence.at(t);
    for (const MacWrite& mw : m.mac_writes) {
      if (mw.mac != mac || mw.t < a.at || mw.t >= a.at + sec(1)) continue;
      ++v.writes;
      if (mw.home || (mw.node && p.gateways.count(*mw.node))) {
        v.gateway_bridges.insert(mw.bridge);
      }
    }
    NodeId root = p.root_of.at(a.a);
    SimTime flood = 0;
    const Path& path = w.controller().plan.at(TunnelId(t, a.a, root)).path;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      flood += w.topology().link(LinkKey::of(path[k], path[k + 1]))->latency;
    }
    v.expected = s.params.agent_delay + s.params.access_latency + flood +
                 s.params.hn_latency;
    std::string flow = a.name == "STA_A1" ? "ping_A1" : "ping_B1";
    v.update = tunnel_update_time(m, flow, a.at + a.gap);
    views[a.name] = v;
  }
  auto names = [](const std::set<std::string>& s) {
    std::string out;
    for (const auto& b : s) out += (out.empty() ? "" : ",") + b;
    return "{" + out + "}";
  };
  const HandoverView& a1 = views["STA_A1"];
  const HandoverView& b1 = views["STA_B1"];
  c.require(a1.gateway_bridges == std::set<std::string>{"s4/br_A"},
            "STA_A1 gateway/home bridges written " + names(a1.gateway_bridges));
  c.require(b1.gateway_bridges.count("s4/br_B") && b1.gateway_bridges.count("hn/B"),
            "STA_B1 gateway/home bridges written " + names(b1.gateway_bridges));
  for (const auto& [name, v] : views) {
    c.require(std::llabs(v.update - v.expected) <= kExp3Tolerance,
              name + " tunnel update " + ms(v.update) +
                  " vs agent+flood " + ms(v.expected));
  }
  c.require(a1.writes < b1.writes, "MAC writes STA_A1 " +
                                       std::to_string(a1.writes) + " < STA_B1 " +
                                       std::to_string(b1.writes));
  return c.take();
}

// --- 9 ---------------------------------------------------------------------

Outcome congestion() {
  Checker c;
  Scenario s = preset("exp1-load");
  SimTime down = s.timeline.at(0).at;
  std::int64_t capacity = 0;
  for (const LinkSpec& l : s.topology.links) {
    if (LinkKey::of(l.a, l.b) == LinkKey::of(NodeId{1}, NodeId{2})) capacity = l.capacity_bps;
  }
  ExperimentResult r = simulate(s);
  const MetricStore& m = r.world->metrics();
  // Skip the reaction time and one settling bin after the break.
  SimTime from = down + sec(1);
  SimTime to = s.params.horizon;
  double a1 = mean_throughput(m, "cbr_A1", from, to);
  double b1 = mean_throughput(m, "cbr_B1", from, to);
  char buf[160];
  std::snprintf(buf, sizeof buf, "cbr_A1 %.2f Mbps, cbr_B1 %.2f Mbps < 32",
                a1 / 1e6, b1 / 1e6);
  c.require(a1 < 32e6 && b1 < 32e6, buf);
  double sum = a1 + b1;
  std::snprintf(buf, sizeof buf, "sum %.2f Mbps vs capacity %.2f Mbps +/- %.0f%%",
                sum / 1e6, static_cast<double>(capacity) / 1e6,
                kCongestionTolerance * 100);
  c.require(capacity > 0 && std::fabs(sum - static_cast<double>(capacity)) <=
                                kCongestionTolerance * static_cast<double>(capacity),
            buf);
  return c.take();
}

// --- 10 --------------------------------------------------------------------

std::string csv_bundle(const Scenario& s) {
  ExperimentResult r = simulate(s);
  const MetricStore& m = r.world->metrics();
  return throughput_csv(m) + rtt_csv(m) + events_csv(m) + drops_csv(m) +
         rule_log_text(m);
}

Outcome determinism() {
  Checker c;
  int compared = 0;
  for (const PresetFile& p : preset_files()) {
    Scenario s = preset(p.name);
    bool same = csv_bundle(s) == csv_bundle(s);
    c.require(same, std::string(p.name) + (same ? " identical" : " differs"));
    ++compared;
  }
  Scenario jit = preset("exp1");
  jit.params.jitter = usec(300);
  jit.params.seed = 7;
  bool same = csv_bundle(jit) == csv_bundle(jit);
  c.require(same, std::string("exp1 with jitter, seed 7 ") +
                      (same ? "identical" : "differs"));
  Scenario other = jit;
  other.params.seed = 8;
  c.require(csv_bundle(other) != csv_bundle(jit),
            "seed 8 differs from seed 7 (jitter is seeded)");
  return c.take();
}

struct Criterion {
  int id;
  const char* title;
  double limit_s;  // 0 = no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "scalability arithmetic", kLimitArithmetic, scalability},
      {2, "star golden dump", kLimitGolden, golden},
      {3, "tag discipline", kLimitCorpus, tag_discipline},
      {4, "tenant isolation", 0, isolation},
      {5, "loop freedom", 0, loop_freedom},
      {6, "experiment 1 link break", kLimitExperiment, experiment1},
      {7, "experiment 2 gateway relocation", 0, experiment2},
      {8, "experiment 3 mobility", kLimitExperiment, experiment3},
      {9, "congestion", 0, congestion},
      {10, "determinism", 0, determinism},
  };
  int failed = 0;
  for (const Criterion& cr : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    if (cr.limit_s > 0 && secs > cr.limit_s) {
      o.pass = false;
      o.detail += "; FAILED runtime limit " + std::to_string(cr.limit_s) + " s";
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2f", secs);
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << cr.id << " " << cr.title
              << ": " << o.detail << " (" << timing << " s)" << std::endl;
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
