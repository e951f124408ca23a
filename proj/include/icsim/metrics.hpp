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
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "icsim/errors.hpp"
#include "icsim/plant.hpp"
#include "icsim/sim.hpp"
#include "icsim/threat.hpp"

namespace icsim {

// ---------------------------------------------------------------------------
// Resilience metrics: impact ratio between operating curves, time to
// critical state, vulnerable-state extraction, and worst-case TTCS search.
// ---------------------------------------------------------------------------

/// A sensor's reading over time on a uniform grid (the true physical values).
struct OperatingCurve {
    ComponentId metric;
    std::vector<double> times_s;
    std::vector<double> values;
};

/// Extracts the physical-realm reading of one sensor from a trace.
inline OperatingCurve operating_curve(const PlantIndex& ix, const SimulationTrace& trace,
                                      const ComponentId& sensor)
{
    const size_t pos = ix.require_sensor(sensor);
    OperatingCurve curve;
    curve.metric = sensor;
    curve.times_s.reserve(trace.samples.size());
    curve.values.reserve(trace.samples.size());
    for (const DualState& s : trace.samples) {
        curve.times_s.push_back(s.time);
        curve.values.push_back(s.physical_sensors[pos]);
    }
    return curve;
}

namespace detail {

constexpr double kGridTolerance = 1e-9;

inline size_t grid_index_of(const std::vector<double>& times, double t, const char* what)
{
    for (size_t i = 0; i < times.size(); ++i) {
        if (std::abs(times[i] - t) <= kGridTolerance) {
            return i;
        }
    }
    throw ContractViolation(std::string(what) + " does not lie on the curve grid");
}

inline void require_common_uniform_grid(const OperatingCurve& a, const OperatingCurve& b)
{
    if (a.times_s.size() < 2 || b.times_s.size() < 2) {
        throw ContractViolation("operating curves need at least two samples");
    }
    if (a.times_s.size() != b.times_s.size()) {
        throw ContractViolation("operating curves have different lengths");
    }
    const double dt = a.times_s[1] - a.times_s[0];
    if (!(dt > 0.0)) {
        throw ContractViolation("operating curve times must be strictly increasing");
    }
    for (size_t i = 0; i < a.times_s.size(); ++i) {
        if (std::abs(a.times_s[i] - b.times_s[i]) > kGridTolerance) {
            throw ContractViolation("operating curves are not on a common grid");
        }
        if (i > 0 && std::abs((a.times_s[i] - a.times_s[i - 1]) - dt) > kGridTolerance) {
            throw ContractViolation("operating curve grid is not uniform");
        }
    }
}

inline double trapezoid(const std::vector<double>& times, const std::vector<double>& values,
                        size_t i0, size_t i1)
{
    double area = 0.0;
    for (size_t i = i0; i < i1; ++i) {
        area += 0.5 * (values[i] + values[i + 1]) * (times[i + 1] - times[i]);
    }
    return area;
}

} // namespace detail

/// Relative change in cumulative delivered quantity over the analysis
/// window: (integral of degraded minus integral of normal) divided by the
/// integral of normal.  Negative means performance loss.
inline double impact_ratio(const OperatingCurve& normal, const OperatingCurve& degraded,
                           double t_start, double t_end)
{
    if (normal.metric != degraded.metric) {
        throw ContractViolation("impact_ratio: curves measure different metrics (\"" +
                                normal.metric + "\" vs \"" + degraded.metric + "\")");
    }
    detail::require_common_uniform_grid(normal, degraded);
    if (!(t_start < t_end)) {
        throw ContractViolation("impact_ratio: window must satisfy t_start < t_end");
    }
    const size_t i0 = detail::grid_index_of(normal.times_s, t_start, "window start");
    const size_t i1 = detail::grid_index_of(normal.times_s, t_end, "window end");
    const double area_normal = detail::trapezoid(normal.times_s, normal.values, i0, i1);
    const double area_degraded = detail::trapezoid(degraded.times_s, degraded.values, i0, i1);
    if (area_normal <= 1e-12) {
        throw DegenerateDenominator(
            "impact_ratio: normal curve has no area over the analysis window");
    }
    return (area_degraded - area_normal) / area_normal;
}

// ---------------------------------------------------------------------------
// Critical states
// ---------------------------------------------------------------------------

enum class CriticalPredicateKind { TankOverflow, TankUnderflow, ZeroFlow };

struct CriticalPredicate {
    CriticalPredicateKind kind = CriticalPredicateKind::TankOverflow;
    ComponentId component; // tank id, or flow sensor id for ZeroFlow
    double zero_epsilon_m3ph = 0.01;
    double sustain_s = 10.0;
};

/// Disjunction of critical-state predicates, optionally labeled with the
/// process it describes (label is reporting metadata, not behavior).
struct CriticalStateSpec {
    std::vector<CriticalPredicate> predicates;
    std::string scope_label = "global";

    static CriticalStateSpec tank_overflow(const ComponentId& tank)
    {
        return {{{CriticalPredicateKind::TankOverflow, tank, 0.0, 0.0}}, "global"};
    }
    static CriticalStateSpec tank_underflow(const ComponentId& tank)
    {
        return {{{CriticalPredicateKind::TankUnderflow, tank, 0.0, 0.0}}, "global"};
    }
    static CriticalStateSpec zero_flow(const ComponentId& sensor, double epsilon_m3ph = 0.01,
                                       double sustain_s = 10.0)
    {
        return {{{CriticalPredicateKind::ZeroFlow, sensor, epsilon_m3ph, sustain_s}}, "global"};
    }
};

namespace detail {

inline void validate_predicate(const PlantIndex& ix, const CriticalPredicate& p)
{
    switch (p.kind) {
    case CriticalPredicateKind::TankOverflow:
    case CriticalPredicateKind::TankUnderflow:
        ix.require_tank(p.component);
        break;
    case CriticalPredicateKind::ZeroFlow: {
        const size_t pos = ix.require_sensor(p.component);
        if (ix.model->sensors[pos].kind != SensorKind::Flow) {
            throw ContractViolation("zero_flow predicate needs a flow sensor, got \"" +
                                    p.component + "\"");
        }
        if (p.zero_epsilon_m3ph < 0.0 || p.sustain_s < 0.0) {
            throw ContractViolation("zero_flow epsilon and sustain must be nonnegative");
        }
        break;
    }
    }
}

/// Absolute trace time at which the predicate first holds at/after t_attack.
inline std::optional<double> predicate_first_time(const PlantIndex& ix,
                                                  const SimulationTrace& trace,
                                                  const CriticalPredicate& p, double t_attack)
{
    if (p.kind == CriticalPredicateKind::TankOverflow ||
        p.kind == CriticalPredicateKind::TankUnderflow) {
        const EventKind want = p.kind == CriticalPredicateKind::TankOverflow
                                   ? EventKind::Overflow
                                   : EventKind::Underflow;
        for (const SafetyEvent& ev : trace.events) {
            if (ev.kind == want && ev.component == p.component &&
                ev.time >= t_attack - kGridTolerance) {
                return ev.time;
            }
        }
        return std::nullopt;
    }

    // Zero flow: the first sample from which the reading stays below epsilon
    // for the whole sustain window; the window must fit inside the trace.
    const size_t pos = ix.sensor_pos.at(p.component);
    const size_t n = trace.samples.size();
    if (n == 0) {
        return std::nullopt;
    }
    const double t_last = trace.samples.back().time;
    std::vector<size_t> below_run(n + 1, 0);
    for (size_t i = n; i-- > 0;) {
        const bool below = std::abs(trace.samples[i].physical_sensors[pos]) < p.zero_epsilon_m3ph;
        below_run[i] = below ? below_run[i + 1] + 1 : 0;
    }
    const size_t window_samples =
        static_cast<size_t>(std::floor(p.sustain_s / trace.dt + kGridTolerance)) + 1;
    for (size_t i = 0; i < n; ++i) {
        const double t_i = trace.samples[i].time;
        if (t_i < t_attack - kGridTolerance) {
            continue;
        }
        if (t_i + p.sustain_s > t_last + kGridTolerance) {
            break; // remaining windows run off the end of the trace
        }
        if (below_run[i] >= window_samples) {
            return t_i;
        }
    }
    return std::nullopt;
}

} // namespace detail

/// Seconds from attack commencement until any predicate first holds;
/// "not reached" is encoded as nullopt.
inline std::optional<double> time_to_critical_state(const PlantIndex& ix,
                                                    const SimulationTrace& trace,
                                                    const CriticalStateSpec& spec,
                                                    double t_attack)
{
    if (trace.samples.empty()) {
        throw ContractViolation("time_to_critical_state: empty trace");
    }
    const double t_first = trace.samples.front().time;
    const double t_last = trace.samples.back().time;
    if (t_attack < t_first - detail::kGridTolerance ||
        t_attack > t_last + detail::kGridTolerance) {
        throw ContractViolation("time_to_critical_state: t_attack outside the trace horizon");
    }
    for (const CriticalPredicate& p : spec.predicates) {
        detail::validate_predicate(ix, p);
    }
    std::optional<double> first;
    for (const CriticalPredicate& p : spec.predicates) {
        const auto t = detail::predicate_first_time(ix, trace, p, t_attack);
        if (t && (!first || *t < *first)) {
            first = t;
        }
    }
    if (!first) {
        return std::nullopt;
    }
    return std::max(0.0, *first - t_attack);
}

// ---------------------------------------------------------------------------
// Vulnerable states
// ---------------------------------------------------------------------------

enum class ExtremumKind { High, Low };

/// A normal-operation extremum of a tank level — the operating point closest
/// to a critical state — captured as a full state snapshot usable as an
/// attack-start state.
struct VulnerableState {
    ExtremumKind kind = ExtremumKind::High;
    ComponentId tank;
    DualState snapshot;
};

/// Finds the highest and lowest operating points of a tank within the
/// steady-state region of a normal trace (the warm-up through the second
/// direction change is discarded).  Each snapshot is taken at the first
/// instant its extremum is attained.
inline std::pair<VulnerableState, VulnerableState>
find_vulnerable_states(const PlantIndex& ix, const SimulationTrace& trace,
                       const ComponentId& tank)
{
    const size_t pos = ix.require_tank(tank);
    const size_t n = trace.samples.size();
    if (n < 2) {
        throw InsufficientTrace("trace too short to contain a control cycle");
    }
    // Direction changes of the level series, ignoring flat stretches.
    int prev_sign = 0;
    std::vector<size_t> turns; // sample index where a new direction begins
    for (size_t i = 0; i + 1 < n; ++i) {
        const double d =
            trace.samples[i + 1].tank_levels[pos] - trace.samples[i].tank_levels[pos];
        const int sign = d > 0.0 ? 1 : d < 0.0 ? -1 : 0;
        if (sign == 0) {
            continue;
        }
        if (prev_sign != 0 && sign != prev_sign) {
            turns.push_back(i);
        }
        prev_sign = sign;
    }
    if (turns.size() < 3) {
        throw InsufficientTrace("no full control cycle after warm-up for tank \"" + tank +
                                "\" (" + std::to_string(turns.size()) +
                                " direction changes, need at least 3)");
    }
    const size_t begin = turns[1]; // steady region: second direction change onward
    size_t imax = begin, imin = begin;
    for (size_t i = begin; i < n; ++i) {
        const double v = trace.samples[i].tank_levels[pos];
        if (v > trace.samples[imax].tank_levels[pos]) {
            imax = i;
        }
        if (v < trace.samples[imin].tank_levels[pos]) {
            imin = i;
        }
    }
    VulnerableState high{ExtremumKind::High, tank, trace.samples[imax]};
    VulnerableState low{ExtremumKind::Low, tank, trace.samples[imin]};
    return {high, low};
}

// ---------------------------------------------------------------------------
// Worst-case TTCS search
// ---------------------------------------------------------------------------

struct CandidateOutcome {
    std::string scenario_name;
    std::optional<double> ttcs_s;
};

/// Minimum TTCS over the canonical attack family, with the witnessing
/// scenario and the full table of evaluated candidates.
struct WorstCaseResult {
    std::string scenario_name;     // empty if the family is empty
    std::optional<double> ttcs_s;  // nullopt: no candidate reached critical
    AttackScenario scenario;
    std::vector<CandidateOutcome> evaluated; // sorted by scenario name
};

/// Canonical attack family for a capability: every capable sensor spoofed at
/// each of its named thresholds, every capable actuator forced into each
/// state, each sustained for the whole horizon.  Sorted by scenario name.
inline std::vector<AttackScenario> enumerate_attack_family(const PlantModel& model,
                                                           const ThreatCapability& capability,
                                                           double horizon_s)
{
    const std::set<ComponentId> sensors(capability.sensors.begin(), capability.sensors.end());
    const std::set<ComponentId> actuators(capability.actuators.begin(),
                                          capability.actuators.end());
    std::vector<AttackScenario> family;
    for (const Sensor& s : model.sensors) {
        if (!sensors.count(s.id)) {
            continue;
        }
        const std::string prefix = s.id + ".";
        for (const auto& [name, value] : model.thresholds) {
            if (name.rfind(prefix, 0) != 0) {
                continue;
            }
            const std::string short_name = name.substr(prefix.size());
            family.push_back({"spoof:" + s.id + ":" + short_name,
                              {sensor_spoof(s.id, value, 0.0, horizon_s)}});
        }
    }
    for (const FlowElement& e : model.flow_elements) {
        if (!actuators.count(e.id)) {
            continue;
        }
        for (bool enable : {false, true}) {
            const std::string label = state_label(e.kind, enable);
            family.push_back({"force:" + e.id + ":" + label,
                              {command_spoof(e.id, label, 0.0, horizon_s)}});
        }
    }
    std::sort(family.begin(), family.end(),
              [](const AttackScenario& a, const AttackScenario& b) { return a.name < b.name; });
    return family;
}

/// Shortest time from the given vulnerable start state to a critical state
/// over the canonical attack family; ties broken by lexicographically
/// smallest scenario name.  The start snapshot is rebased to t = 0 and every
/// candidate attack runs over [0, horizon).
inline WorstCaseResult worst_case_ttcs(const PlantIndex& ix, const VulnerableState& start,
                                       const ThreatCapability& capability,
                                       const CriticalStateSpec& spec, double horizon_s,
                                       double dt = 1.0)
{
    if (capability.sensors.empty() && capability.actuators.empty()) {
        throw ContractViolation("worst_case_ttcs: capability must be nonempty");
    }
    detail::require_sensors_exist(ix, capability.sensors, "capability");
    detail::require_actuators_exist(ix, capability.actuators, "capability");
    for (const CriticalPredicate& p : spec.predicates) {
        detail::validate_predicate(ix, p);
    }
    if (!(dt > 0.0) || horizon_s < dt) {
        throw ContractViolation("worst_case_ttcs: need dt > 0 and horizon >= dt");
    }

    DualState initial = start.snapshot;
    initial.time = 0.0;

    WorstCaseResult result;
    for (const AttackScenario& candidate :
         enumerate_attack_family(*ix.model, capability, horizon_s)) {
        const SimulationTrace trace = run(ix, initial, candidate, dt, horizon_s);
        const std::optional<double> ttcs = time_to_critical_state(ix, trace, spec, 0.0);
        result.evaluated.push_back({candidate.name, ttcs});
        // Strictly better TTCS wins; equal TTCS keeps the earlier
        // (lexicographically smaller) name.
        const bool better =
            ttcs.has_value() && (!result.ttcs_s.has_value() || *ttcs < *result.ttcs_s);
        if (result.scenario_name.empty() || better) {
            result.scenario_name = candidate.name;
            result.scenario = candidate;
            result.ttcs_s = ttcs;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Report container
// ---------------------------------------------------------------------------

/// Per-metric impact ratios and per-process TTCS over one analysis window.
struct ResilienceReport {
    std::map<std::string, double> impact_ratios;               // metric -> ratio
    std::map<std::string, std::optional<double>> ttcs_s;       // process -> seconds
    double window_start_s = 0.0;
    double window_end_s = 0.0;
};

} // namespace icsim
