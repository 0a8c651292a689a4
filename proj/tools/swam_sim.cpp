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

// swam-sim: run scenarios, dump forwarding state, validate scenario files.

#include <exception>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "swam/experiments.hpp"
#include "swam/presets.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitRuntime = 3;

int run_command(const std::string& ref, const std::string& out,
                std::optional<std::uint64_t> seed, bool trace, int repeat) {
  swam::Scenario s = swam::load_scenario_or_preset(ref);
  if (repeat <= 1) {
    swam::ExperimentResult r = swam::run_experiment(s, out, {seed, trace});
    std::cout << r.report;
    std::cout << "outputs written to " << out << "\n";
    return kExitOk;
  }
  // Isolated runs, one thread each; repetition i uses seed base + i.
  std::uint64_t base = seed.value_or(s.params.seed);
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(repeat));
  for (int i = 0; i < repeat; ++i) {
    workers.emplace_back([&, i] {
      try {
        auto dir = std::filesystem::path(out) / ("rep_" + std::to_string(i));
        swam::run_experiment(s, dir, {base + static_cast<std::uint64_t>(i), trace});
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    });
  }
  for (std::thread& t : workers) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::cout << repeat << " runs written to " << out << "/rep_<i>\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-tenant wireless access/backhaul simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  bool trace = false;
  int repeat = 1;
  std::string at = "0s";

  std::string preset_names;
  for (const swam::PresetFile& p : swam::preset_files()) {
    preset_names += preset_names.empty() ? "" : ", ";
    preset_names += p.name;
  }

  CLI::App* run = app.add_subcommand("run", "Run a scenario file or preset (" +
                                                preset_names + ")");
  run->add_option("scenario", scenario, "Scenario file or preset name")->required();
  run->add_option("--out", out, "Output directory")->capture_default_str();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_flag("--trace", trace, "Write trace.log with every interface event");
  run->add_option("--repeat", repeat, "Independent runs, seeds seed..seed+N-1")
      ->check(CLI::PositiveNumber);

  CLI::App* dump = app.add_subcommand("dump-rules",
                                      "Print all bridges' rules and MAC tables");
  dump->add_option("scenario", scenario, "Scenario file or preset name")->required();
  dump->add_option("--at", at, "Simulation time, e.g. 0s or 60.1s")->required();

  CLI::App* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("scenario", scenario, "Scenario file or preset name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*run) return run_command(scenario, out, seed, trace, repeat);
    if (*dump) {
      swam::Scenario s = swam::load_scenario_or_preset(scenario);
      std::cout << swam::dump_rules(s, swam::parse_duration(at));
      return kExitOk;
    }
    swam::Scenario s = swam::load_scenario_or_preset(scenario);
    // Provisioning problems (vap caps, VLAN budget) only show up when built.
    swam::build_world(s);
    std::cout << s.name << ": ok (" << s.topology.nodes.size() << " nodes, "
              << s.tenants.size() << " tenants, " << s.clients.size()
              << " clients, " << s.flows.size() << " flows, "
              << s.timeline.size() << " timeline actions)\n";
    return kExitOk;
  } catch (const swam::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    bool invalid = e.code() == swam::ErrorCode::kParseError ||
                   e.code() == swam::ErrorCode::kValidationError;
    return invalid ? kExitInvalid : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
