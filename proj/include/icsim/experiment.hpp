/* Copyright (c) 2026 The icsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <algorithm>
#include <filesystem>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icsim/config_io.hpp"
#include "icsim/configs.hpp"
#include "icsim/metrics.hpp"
#include "icsim/sim.hpp"

// ---------------------------------------------------------------------------
// Batch resilience experiments.
//
// For every catalog scenario the suite replays the attack twice — once from
// the plant's highest and once from its lowest vulnerable operating point of
// the scenario's focus tank — against a paired normal run from the same
// start.  Vulnerable states are discovered from one long normal run; each
// replay is rebased to t = 0.  Per replay the suite reports the impact ratio
// of every sensor over the attack window and the time to critical state of
// every configured process.  Everything is deterministic: entries are
// ordered scenario-name-major with "high" before "low", so repeated runs
// serialize to byte-identical reports.
// ---------------------------------------------------------------------------

namespace icsim {

struct ExperimentSuiteSpec {
    double dt_s = 1.0;
    double horizon_s = 7200.0;        // attacked/normal replay length
    double normal_horizon_s = 14400.0; // vulnerable-state discovery run length
    InitialConditions initial;         // nominal start for the discovery run
    /// Which tank's vulnerable operating points seed each scenario's replays.
    std::map<std::string, ComponentId> scenario_tanks;
    /// Per-process critical-state definitions evaluated on the attacked run.
    std::map<std::string, CriticalStateSpec> process_specs;
};

/// The reference experiment setup: every catalog scenario mapped to the tank
/// it stresses first, and one sustained-outage spec per process: a process is
/// critical once its stage flow stays below 0.01 m^3/hr for 1300 s.  The
/// sustain threshold must clear the longest pause normal duty cycling can
/// produce — the transfer line pauses for a tank's whole drain leg, and one
/// feeding stage's off-leg can land inside it, compounding to ~1120 s — while
/// staying short enough that the slowest stage's outage plus the sustain
/// window still fits the replay horizon.
inline ExperimentSuiteSpec default_suite_spec()
{
    ExperimentSuiteSpec spec;
    spec.initial.sensor_values = swat_initial_sensor_values();
    spec.initial.actuator_states = swat_initial_actuator_states();
    spec.scenario_tanks = {
        {"attack7", "T-301"},
        {"attack30", "T-101"},
        {"e1-close-mv101-cmd", "T-101"},
        {"e1-spoof-lit101-high", "T-101"},
        {"e2a-p1-cmd", "T-301"},
        {"e2a-spoof-lit101-lowlow", "T-301"},
        {"e2a-spoof-lit301-high", "T-301"},
        {"e2b-p3-cmd", "T-401"},
        {"e2b-spoof-lit301-lowlow", "T-401"},
        {"e2b-spoof-lit401-high", "T-401"},
    };
    const std::map<std::string, ComponentId> process_flows = {{"P1", "FIT-201"},
                                                              {"P2", "FIT-201"},
                                                              {"P3", "FIT-301"},
                                                              {"P4", "FIT-401"},
                                                              {"P5", "FIT-502"}};
    for (const auto& [process, sensor] : process_flows) {
        CriticalStateSpec cs = CriticalStateSpec::zero_flow(sensor, 0.01, 1300.0);
        cs.scope_label = process;
        spec.process_specs[process] = cs;
    }
    return spec;
}

struct ExperimentEntry {
    std::string scenario;
    std::string start; // "high" or "low"
    ComponentId tank;  // whose vulnerable state seeded the replay
    ResilienceReport report;
};

struct ExperimentSuiteReport {
    double dt_s = 1.0;
    double horizon_s = 0.0;
    std::vector<ExperimentEntry> entries;
    std::vector<std::string> notes; // skipped metrics and similar conditions
};

namespace detail {

inline constexpr const char* kSuiteReportFormat = "icsim-suite-report/1";

/// The attack window of a scenario, clamped to the replayed horizon.  An
/// empty scenario (a pure normal run) windows the whole horizon.
inline std::pair<double, double> attack_window(const AttackScenario& scenario, double horizon_s)
{
    if (scenario.primitives.empty()) {
        return {0.0, horizon_s};
    }
    double start = scenario.primitives.front().start_s;
    double end = scenario.primitives.front().end_s;
    for (const AttackPrimitive& p : scenario.primitives) {
        start = std::min(start, p.start_s);
        end = std::max(end, p.end_s);
    }
    return {std::max(start, 0.0), std::min(end, horizon_s)};
}

} // namespace detail

inline ExperimentSuiteReport run_experiment_suite(const PlantIndex& ix,
                                                  const NamedScenarioCatalog& catalog,
                                                  const ExperimentSuiteSpec& spec)
{
    ExperimentSuiteReport suite;
    suite.dt_s = spec.dt_s;
    suite.horizon_s = spec.horizon_s;
    if (catalog.entries.empty()) {
        return suite;
    }

    std::vector<std::string> unmapped;
    for (const auto& [name, scenario] : catalog.entries) {
        if (!spec.scenario_tanks.count(name)) {
            unmapped.push_back(name);
        }
        (void)scenario;
    }
    if (!unmapped.empty()) {
        std::string msg = "run_experiment_suite: no focus tank configured for:";
        for (const std::string& name : unmapped) {
            msg += " " + name;
        }
        throw ContractViolation(msg);
    }
    for (const auto& [process, cs] : spec.process_specs) {
        for (const CriticalPredicate& p : cs.predicates) {
            detail::validate_predicate(ix, p);
        }
        (void)process;
    }

    // One discovery run, then one {high, low} pair per distinct focus tank.
    const DualState nominal = initial_state_from(ix, spec.initial);
    const SimulationTrace normal_long =
        run(ix, nominal, {}, spec.dt_s, spec.normal_horizon_s);
    std::map<ComponentId, std::pair<VulnerableState, VulnerableState>> states;
    for (const auto& [name, tank] : spec.scenario_tanks) {
        if (catalog.entries.count(name) && !states.count(tank)) {
            states[tank] = find_vulnerable_states(ix, normal_long, tank);
        }
    }

    // Replay pairs are independent once the discovery snapshots exist, so
    // they run concurrently; everything they touch is immutable from here on.
    // Assembly below is sequential in catalog order, keeping reports
    // byte-stable regardless of scheduling.
    struct Job {
        const std::string* name;
        const AttackScenario* scenario;
        const ComponentId* tank;
        const VulnerableState* start;
    };
    struct JobResult {
        ExperimentEntry entry;
        std::vector<std::string> notes;
    };
    std::vector<Job> jobs;
    for (const auto& [name, scenario] : catalog.entries) {
        const ComponentId& tank = spec.scenario_tanks.at(name);
        const auto& [high, low] = states.at(tank);
        jobs.push_back({&name, &scenario, &tank, &high});
        jobs.push_back({&name, &scenario, &tank, &low});
    }

    const auto run_job = [&ix, &spec](const Job& job) {
        DualState start = job.start->snapshot;
        start.time = 0.0;

        const SimulationTrace attacked =
            run(ix, start, *job.scenario, spec.dt_s, spec.horizon_s);
        const SimulationTrace normal = run(ix, start, {}, spec.dt_s, spec.horizon_s);
        const auto [window_start, window_end] =
            detail::attack_window(*job.scenario, spec.horizon_s);

        JobResult result;
        ExperimentEntry& entry = result.entry;
        entry.scenario = *job.name;
        entry.start = job.start->kind == ExtremumKind::High ? "high" : "low";
        entry.tank = *job.tank;
        entry.report.window_start_s = window_start;
        entry.report.window_end_s = window_end;

        for (const Sensor& sensor : ix.model->sensors) {
            const OperatingCurve base = operating_curve(ix, normal, sensor.id);
            const OperatingCurve degraded = operating_curve(ix, attacked, sensor.id);
            try {
                entry.report.impact_ratios[sensor.id] =
                    impact_ratio(base, degraded, window_start, window_end);
            }
            catch (const DegenerateDenominator&) {
                result.notes.push_back(entry.scenario + "/" + entry.start + ": metric "
                                       + sensor.id
                                       + " skipped, normal-operation area is zero");
            }
        }
        for (const auto& [process, cs] : spec.process_specs) {
            entry.report.ttcs_s[process] =
                time_to_critical_state(ix, attacked, cs, window_start);
        }
        return result;
    };

    std::vector<std::future<JobResult>> futures;
    futures.reserve(jobs.size());
    for (const Job& job : jobs) {
        futures.push_back(std::async(std::launch::async, run_job, job));
    }
    for (std::future<JobResult>& future : futures) {
        JobResult result = future.get();
        for (std::string& note : result.notes) {
            suite.notes.push_back(std::move(note));
        }
        suite.entries.push_back(std::move(result.entry));
    }
    return suite;
}

// ---------------------------------------------------------------------------
// Report serialization: one JSON document plus two flat CSVs.
// ---------------------------------------------------------------------------

inline nlohmann::json resilience_report_to_json(const ResilienceReport& report)
{
    nlohmann::json j;
    j["window_start_s"] = report.window_start_s;
    j["window_end_s"] = report.window_end_s;
    j["impact_ratios"] = report.impact_ratios;
    j["ttcs_s"] = nlohmann::json::object();
    for (const auto& [process, ttcs] : report.ttcs_s) {
        if (ttcs) {
            j["ttcs_s"][process] = *ttcs;
        }
        else {
            j["ttcs_s"][process] = nullptr;
        }
    }
    return j;
}

inline nlohmann::json suite_report_to_json(const ExperimentSuiteReport& suite)
{
    nlohmann::json j;
    j["format"] = detail::kSuiteReportFormat;
    j["dt_s"] = suite.dt_s;
    j["horizon_s"] = suite.horizon_s;
    j["entries"] = nlohmann::json::array();
    for (const ExperimentEntry& entry : suite.entries) {
        nlohmann::json je = resilience_report_to_json(entry.report);
        je["scenario"] = entry.scenario;
        je["start"] = entry.start;
        je["tank"] = entry.tank;
        j["entries"].push_back(std::move(je));
    }
    j["notes"] = suite.notes;
    return j;
}

inline void save_suite_report(const ExperimentSuiteReport& suite,
                              const std::filesystem::path& path)
{
    detail::write_text_file(path, detail::dump_json(suite_report_to_json(suite)));
}

inline std::string suite_impact_csv(const ExperimentSuiteReport& suite)
{
    std::string csv = "scenario,start,metric,impact_ratio\n";
    for (const ExperimentEntry& entry : suite.entries) {
        for (const auto& [metric, ratio] : entry.report.impact_ratios) {
            csv += entry.scenario + "," + entry.start + "," + metric + ","
                   + detail::format_double(ratio) + "\n";
        }
    }
    return csv;
}

inline std::string suite_ttcs_csv(const ExperimentSuiteReport& suite)
{
    std::string csv = "scenario,start,process,ttcs_s\n";
    for (const ExperimentEntry& entry : suite.entries) {
        for (const auto& [process, ttcs] : entry.report.ttcs_s) {
            csv += entry.scenario + "," + entry.start + "," + process + ","
                   + (ttcs ? detail::format_double(*ttcs) : std::string("not_reached")) + "\n";
        }
    }
    return csv;
}

inline void save_suite_csvs(const ExperimentSuiteReport& suite,
                            const std::filesystem::path& out_dir)
{
    detail::write_text_file(out_dir / "impact_ratios.csv", suite_impact_csv(suite));
    detail::write_text_file(out_dir / "ttcs.csv", suite_ttcs_csv(suite));
}

} // namespace icsim
