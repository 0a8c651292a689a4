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

#include "swam/simkit.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace swam {

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::kFrameArrival: return "frame";
    case EventKind::kLinkEvent: return "link";
    case EventKind::kControlAction: return "control";
    case EventKind::kFlowTick: return "flow";
    case EventKind::kAttach: return "attach";
    case EventKind::kScenarioAction: return "scenario";
  }
  return "?";
}

void EventQueue::push(SimTime t, EventKind kind, EventPayload payload) {
  heap_.push(Event{t, next_seq_++, kind, std::move(payload)});
}

Event EventQueue::pop() {
  // priority_queue::top is const; the payload is moved out via const_cast,
  // which is safe because the element is popped right after.
  Event e = std::move(const_cast<Event&>(heap_.top()));
  heap_.pop();
  return e;
}

SimTime flow_offset(const FlowConfig& f, std::uint64_t k) {
  if (f.kind == FlowKind::kPing) {
    return static_cast<SimTime>(k) * f.interval;
  }
  std::int64_t bits = std::int64_t{f.packet_bytes} * 8;
  return static_cast<SimTime>(k) * bits * 1000000 / f.rate_bps;
}

SimTime nominal_interval(const FlowConfig& f) {
  if (f.kind == FlowKind::kPing) return f.interval;
  return std::int64_t{f.packet_bytes} * 8 * 1000000 / f.rate_bps;
}

std::int64_t Counters::total_drops() const {
  std::int64_t n = 0;
  for (std::int64_t d : drops) n += d;
  return n;
}

std::optional<std::size_t> MetricStore::flow_index(
    const std::string& name) const {
  for (std::size_t i = 0; i < flows.size(); ++i) {
    if (flows[i].config.name == name) return i;
  }
  return std::nullopt;
}

const FlowMetrics& MetricStore::flow(const std::string& name) const {
  auto i = flow_index(name);
  if (!i) throw Error(ErrorCode::kInvalidArgument, "no flow named " + name);
  return flows[*i];
}

bool MetricStore::conserved() const {
  return totals.injected + totals.copies ==
         totals.delivered + totals.sunk + totals.total_drops() + in_flight;
}

namespace {

std::vector<SimTime> deliveries(const FlowMetrics& f) {
  if (f.config.kind == FlowKind::kCbr) return f.hn_arrivals;
  std::vector<SimTime> out;
  out.reserve(f.rtt.size());
  for (const RttSample& s : f.rtt) out.push_back(s.t);
  return out;
}

}  // namespace

SimTime outage_duration(const MetricStore& m, const std::string& flow,
                        std::optional<SimTime> after,
                        std::optional<SimTime> before) {
  const FlowMetrics& f = m.flow(flow);
  std::vector<SimTime> times = deliveries(f);
  if (times.size() < 2) {
    throw Error(ErrorCode::kNoSamples,
                "flow " + flow + " has fewer than two deliveries");
  }
  SimTime worst = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (after && times[i] < *after) continue;
    if (before && times[i] >= *before) break;
    worst = std::max(worst, times[i] - times[i - 1]);
  }
  return std::max<SimTime>(0, worst - nominal_interval(f.config));
}

std::vector<std::pair<SimTime, SimTime>> rtt_series(const MetricStore& m,
                                                    const std::string& flow) {
  std::vector<std::pair<SimTime, SimTime>> out;
  for (const RttSample& s : m.flow(flow).rtt) out.emplace_back(s.t, s.rtt);
  return out;
}

std::vector<std::pair<SimTime, double>> throughput_series(
    const MetricStore& m, const std::string& flow, SimTime bin) {
  if (bin <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "throughput bin must be > 0");
  }
  const FlowMetrics& f = m.flow(flow);
  SimTime end = std::min(f.config.stop, m.horizon);
  std::int64_t first = f.config.start / bin;
  std::int64_t last = end > 0 ? (end - 1) / bin : 0;
  std::map<std::int64_t, std::int64_t> bits;
  for (std::int64_t b = first; b <= last; ++b) bits[b] = 0;
  for (std::size_t i = 0; i < f.hn_arrivals.size(); ++i) {
    bits[f.hn_arrivals[i] / bin] += std::int64_t{f.hn_bytes[i]} * 8;
  }
  std::vector<std::pair<SimTime, double>> out;
  for (const auto& [b, n] : bits) {
    out.emplace_back(b * bin, static_cast<double>(n) * 1e6 /
                                  static_cast<double>(bin));
  }
  return out;
}

SimTime tunnel_update_time(const MetricStore& m, const std::string& flow,
                           SimTime attach_time) {
  for (const RttSample& s : m.flow(flow).rtt) {
    if (s.t >= attach_time && s.hn_departure >= attach_time) {
      return s.hn_departure - attach_time;
    }
  }
  throw Error(ErrorCode::kNoSamples,
              "flow " + flow + " got no reply after the attach");
}

std::string throughput_csv(const MetricStore& m) {
  std::ostringstream os;
  os << "flow,bin_start_us,bps\n";
  SimTime bin = m.throughput_bin;
  for (const FlowMetrics& f : m.flows) {
    std::map<std::int64_t, std::int64_t> bits;
    SimTime end = std::min(f.config.stop, m.horizon);
    for (std::int64_t b = f.config.start / bin; end > 0 && b <= (end - 1) / bin;
         ++b) {
      bits[b] = 0;
    }
    for (std::size_t i = 0; i < f.hn_arrivals.size(); ++i) {
      bits[f.hn_arrivals[i] / bin] += std::int64_t{f.hn_bytes[i]} * 8;
    }
    for (const auto& [b, n] : bits) {
      os << f.config.name << "," << b * bin << "," << n * 1000000 / bin
         << "\n";
    }
  }
  return os.str();
}

std::string rtt_csv(const MetricStore& m) {
  std::ostringstream os;
  os << "flow,t_us,rtt_us\n";
  for (const FlowMetrics& f : m.flows) {
    for (const RttSample& s : f.rtt) {
      os << f.config.name << "," << s.t << "," << s.rtt << "\n";
    }
  }
  return os.str();
}

std::string events_csv(const MetricStore& m) {
  std::ostringstream os;
  os << "t_us,kind,detail\n";
  for (const EventRecord& e : m.events) {
    os << e.t << "," << e.kind << "," << e.detail << "\n";
  }
  return os.str();
}

std::string drops_csv(const MetricStore& m) {
  std::ostringstream os;
  os << "cause,count\n";
  for (int i = 0; i < kDropCauseCount; ++i) {
    os << to_string(static_cast<DropCause>(i)) << "," << m.totals.drops[i]
       << "\n";
  }
  return os.str();
}

std::string rule_log_text(const MetricStore& m) {
  std::string out;
  for (const RuleChange& c : m.rule_log) out += c.to_string() + "\n";
  return out;
}

void write_metrics(const MetricStore& m, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) {
      throw Error(ErrorCode::kInvalidArgument,
                  "cannot write " + (dir / name).string());
    }
    out << body;
  };
  write("flow_throughput.csv", throughput_csv(m));
  write("rtt.csv", rtt_csv(m));
  write("events.csv", events_csv(m));
  write("drops.csv", drops_csv(m));
  write("rule_changes.log", rule_log_text(m));
}

const MetricStore& run(World& world) {
  world.run();
  return world.metrics();
}

}  // namespace swam
