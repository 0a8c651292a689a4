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

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "swam/scenario.hpp"

namespace swam {

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the scenario's seed
  bool trace = false;                 // also write trace.log
};

struct ExperimentResult {
  std::unique_ptr<World> world;
  std::string report;
  std::vector<std::filesystem::path> files;
};

// Runs the scenario to its horizon and writes the CSVs, rule_changes.log,
// report.txt (and trace.log) into `out`, creating it if needed.
ExperimentResult run_experiment(const Scenario& s,
                                const std::filesystem::path& out,
                                const RunOptions& opts = {});

// Runs without touching the filesystem; `report` is still filled in.
ExperimentResult simulate(const Scenario& s, const RunOptions& opts = {});

std::string build_report(const Scenario& s, const World& w);

// Every bridge's rules and MAC tables at time `at`.
std::string dump_rules(const Scenario& s, SimTime at);

// Median RTT of samples received in [from, to); nullopt if none.
std::optional<SimTime> median_rtt(const MetricStore& m, const std::string& flow,
                                  SimTime from, SimTime to);
// Mean delivered bits/s over [from, to).
double mean_throughput(const MetricStore& m, const std::string& flow,
                       SimTime from, SimTime to);

std::string format_ms(SimTime t);  // "100.000 ms"

}  // namespace swam
