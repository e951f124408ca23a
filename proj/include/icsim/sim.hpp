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

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icsim/errors.hpp"
#include "icsim/plant.hpp"

namespace icsim {

// ---------------------------------------------------------------------------
// Dual cyber/physical state.
//
// The controller perceives the cyber realm; actuators act on the physical
// realm.  Attacks drive a wedge between the two: sensor spoofs overwrite
// cyber readings, command spoofs overwrite what the controller ordered.
// Absent attacks the realms coincide at every sample.
//
// Values are stored as dense vectors aligned with the model's declaration
// order (tanks, sensors, flow elements); string ids appear only at the API
// boundary.  Use the accessors or `state_values` for id-keyed access.
// ---------------------------------------------------------------------------

struct DualState {
    std::vector<double> tank_levels;            // mm, per tank
    std::vector<double> physical_sensors;       // per sensor, mm or m^3/hr
    std::vector<double> cyber_sensors;          // what the controller perceives
    std::vector<unsigned char> actuator_states; // 1 = on/open, per flow element
    std::vector<unsigned char> commanded_states;
    double time = 0.0;                          // seconds

    bool operator==(const DualState&) const = default;
};

enum class AttackKind { SensorSpoof, ActuatorCommandSpoof };

/// One timed attack primitive.  A sensor spoof pins a cyber reading to a
/// constant; a command spoof pins an actuator's commanded state.  Active on
/// the half-open window [start_s, end_s).
struct AttackPrimitive {
    AttackKind kind = AttackKind::SensorSpoof;
    ComponentId target;
    double spoof_value = 0.0;  // sensor spoofs only
    std::string forced_state;  // command spoofs only ("on"/"off"/"open"/"closed")
    double start_s = 0.0;
    double end_s = 0.0;

    bool operator==(const AttackPrimitive&) const = default;
};

struct AttackScenario {
    std::string name;
    std::vector<AttackPrimitive> primitives;

    bool operator==(const AttackScenario&) const = default;
};

inline AttackPrimitive sensor_spoof(const ComponentId& sensor, double value, double start_s,
                                    double end_s)
{
    AttackPrimitive p;
    p.kind = AttackKind::SensorSpoof;
    p.target = sensor;
    p.spoof_value = value;
    p.start_s = start_s;
    p.end_s = end_s;
    return p;
}

inline AttackPrimitive command_spoof(const ComponentId& actuator, const std::string& forced_state,
                                     double start_s, double end_s)
{
    AttackPrimitive p;
    p.kind = AttackKind::ActuatorCommandSpoof;
    p.target = actuator;
    p.forced_state = forced_state;
    p.start_s = start_s;
    p.end_s = end_s;
    return p;
}

enum class EventKind { Overflow, Underflow, DryRun };

inline const char* event_kind_label(EventKind k)
{
    switch (k) {
    case EventKind::Overflow: return "overflow";
    case EventKind::Underflow: return "underflow";
    default: return "dry_run";
    }
}

struct SafetyEvent {
    double time = 0.0;
    EventKind kind = EventKind::Overflow;
    ComponentId component;

    bool operator==(const SafetyEvent&) const = default;
};

struct SimulationTrace {
    double dt = 1.0;
    std::vector<DualState> samples; // samples[i].time = t0 + i*dt
    std::vector<SafetyEvent> events;
};

// ---------------------------------------------------------------------------
// Scenario validation.
// ---------------------------------------------------------------------------

inline std::vector<std::string> validate_scenario(const PlantModel& model,
                                                  const AttackScenario& scenario)
{
    std::vector<std::string> issues;
    auto flag = [&issues](const std::string& msg) { issues.push_back(msg); };

    std::map<ComponentId, const Sensor*> sensors;
    for (const Sensor& s : model.sensors) {
        sensors[s.id] = &s;
    }
    std::map<ComponentId, const FlowElement*> elements;
    for (const FlowElement& e : model.flow_elements) {
        elements[e.id] = &e;
    }
    std::map<ComponentId, const Tank*> tanks;
    for (const Tank& t : model.tanks) {
        tanks[t.id] = &t;
    }

    // Per-target windows, for the overlap check.
    std::map<ComponentId, std::vector<std::pair<double, double>>> windows;

    for (size_t i = 0; i < scenario.primitives.size(); ++i) {
        const AttackPrimitive& p = scenario.primitives[i];
        const std::string where = "primitive " + std::to_string(i) + " (" + p.target + ")";
        if (!(p.start_s < p.end_s)) {
            flag(where + ": window requires start < end");
        }
        if (p.kind == AttackKind::SensorSpoof) {
            auto it = sensors.find(p.target);
            if (it == sensors.end()) {
                flag(where + ": sensor spoof targets unknown sensor");
                continue;
            }
            if (it->second->kind == SensorKind::Level) {
                const Tank* tank = tanks.count(it->second->attachment)
                                       ? tanks[it->second->attachment]
                                       : nullptr;
                if (tank
                    && (p.spoof_value < 0.0 || p.spoof_value > tank->physical_height_mm)) {
                    flag(where + ": spoof value outside [0, tank height]");
                }
            }
            else if (p.spoof_value < 0.0) {
                flag(where + ": flow spoof value must be >= 0");
            }
        }
        else {
            auto it = elements.find(p.target);
            if (it == elements.end()) {
                flag(where + ": command spoof targets unknown actuator");
                continue;
            }
            if (p.forced_state != enabled_label(it->second->kind)
                && p.forced_state != disabled_label(it->second->kind)) {
                flag(where + ": forced state \"" + p.forced_state + "\" invalid for actuator");
            }
        }
        windows[p.target].push_back({p.start_s, p.end_s});
    }

    for (auto& [target, spans] : windows) {
        std::sort(spans.begin(), spans.end());
        for (size_t i = 1; i < spans.size(); ++i) {
            if (spans[i].first < spans[i - 1].second) {
                flag("target " + target + ": overlapping attack windows");
            }
        }
    }
    return issues;
}

// ---------------------------------------------------------------------------
// Engine.
// ---------------------------------------------------------------------------

namespace detail {

struct CompiledPrimitive {
    bool is_sensor = true;
    size_t index = 0;          // sensor or element index
    double value = 0.0;        // spoof value
    unsigned char enable = 0;  // forced actuator state
    double start = 0.0;
    double end = 0.0;

    bool active_at(double t) const { return start <= t && t < end; }
};

inline std::vector<CompiledPrimitive> compile_scenario(const PlantIndex& ix,
                                                       const AttackScenario& scenario)
{
    const std::vector<std::string> issues = validate_scenario(*ix.model, scenario);
    if (!issues.empty()) {
        std::string msg = "scenario \"" + scenario.name + "\" invalid:";
        for (const std::string& issue : issues) {
            msg += "\n  - " + issue;
        }
        throw ContractViolation(msg);
    }
    std::vector<CompiledPrimitive> out;
    out.reserve(scenario.primitives.size());
    for (const AttackPrimitive& p : scenario.primitives) {
        CompiledPrimitive c;
        c.start = p.start_s;
        c.end = p.end_s;
        if (p.kind == AttackKind::SensorSpoof) {
            c.is_sensor = true;
            c.index = ix.require_sensor(p.target);
            c.value = p.spoof_value;
        }
        else {
            c.is_sensor = false;
            c.index = ix.require_element(p.target);
            const FlowElementKind kind = ix.model->flow_elements[c.index].kind;
            c.enable = parse_state_label(kind, p.forced_state, p.target) ? 1 : 0;
        }
        out.push_back(c);
    }
    return out;
}

/// Refreshes the cyber realm from the physical realm, then overlays the
/// sensor spoofs active at time t.
inline void refresh_cyber(const std::vector<CompiledPrimitive>& primitives, DualState& state,
                          double t)
{
    state.cyber_sensors = state.physical_sensors;
    for (const CompiledPrimitive& p : primitives) {
        if (p.is_sensor && p.active_at(t)) {
            state.cyber_sensors[p.index] = p.value;
        }
    }
}

/// One simulation step; appends this step's safety events (timestamped at the
/// post-step instant) to `events`.  `flows` is scratch storage sized to the
/// path count.
inline void step_impl(const PlantIndex& ix, const std::vector<CompiledPrimitive>& primitives,
                      DualState& state, double dt, std::vector<SafetyEvent>& events,
                      std::vector<double>& flows)
{
    const PlantModel& model = *ix.model;
    const double t = state.time;

    // (1) Controller reads the cyber realm as of time t.
    refresh_cyber(primitives, state, t);

    // (2) Threshold logic against cyber values, declaration order, last
    // writer wins.  Actuators nobody commands this tick latch their previous
    // commanded state.
    for (const PlantIndex::CompiledStatement& cs : ix.statements) {
        bool fires = true;
        for (const PlantIndex::CompiledAtom& atom : cs.condition) {
            const double v = state.cyber_sensors[atom.sensor];
            const bool ok = atom.comparator == Comparator::GreaterEqual ? v >= atom.threshold
                                                                        : v <= atom.threshold;
            if (!ok) {
                fires = false;
                break;
            }
        }
        if (fires) {
            for (const PlantIndex::CompiledAction& action : cs.actions) {
                state.commanded_states[action.actuator] = action.enable ? 1 : 0;
            }
        }
    }

    // (3) Command spoofs override whatever the controller decided.
    for (const CompiledPrimitive& p : primitives) {
        if (!p.is_sensor && p.active_at(t)) {
            state.commanded_states[p.index] = p.enable;
        }
    }

    // (4) Instantaneous actuation.
    state.actuator_states = state.commanded_states;

    // (5) Resolve flows from pre-step levels, then integrate tank levels.
    const double t_next = t + dt;
    for (size_t i = 0; i < ix.paths.size(); ++i) {
        const PlantIndex::CompiledPath& cp = ix.paths[i];
        std::optional<double> source_level;
        if (cp.source_tank >= 0) {
            source_level = state.tank_levels[static_cast<size_t>(cp.source_tank)];
        }
        const ResolvedFlow rf = detail::resolve_flow(model, model.flow_paths[i], cp.elements,
                                                     state.actuator_states, source_level);
        flows[i] = rf.delivered_m3ph;
        if (rf.dry_run_pump) {
            events.push_back({t_next, EventKind::DryRun, *rf.dry_run_pump});
        }
    }
    for (size_t i = 0; i < ix.paths.size(); ++i) {
        const PlantIndex::CompiledPath& cp = ix.paths[i];
        if (cp.source_tank >= 0) {
            const size_t ti = static_cast<size_t>(cp.source_tank);
            state.tank_levels[ti] -= flows[i] * dt / (3.6 * model.tanks[ti].cross_section_area_m2);
        }
        if (cp.sink_tank >= 0) {
            const size_t ti = static_cast<size_t>(cp.sink_tank);
            state.tank_levels[ti] += flows[i] * dt / (3.6 * model.tanks[ti].cross_section_area_m2);
        }
    }
    for (size_t i = 0; i < model.tanks.size(); ++i) {
        double& level = state.tank_levels[i];
        if (level < 0.0) {
            level = 0.0;
        }
        const double cap = model.tanks[i].physical_height_mm;
        if (level > cap) {
            level = cap;
        }
    }

    // (6) Physical sensing is noise-free and instantaneous: levels read the
    // post-step tank state, flow sensors read this step's delivered flow.
    for (size_t i = 0; i < model.sensors.size(); ++i) {
        state.physical_sensors[i] = model.sensors[i].kind == SensorKind::Level
                                        ? state.tank_levels[ix.sensor_target[i]]
                                        : flows[ix.sensor_target[i]];
    }
    // The emitted sample shows the perceived state as of t+dt, so spoof
    // windows appear (and revert) on exact sample boundaries.
    refresh_cyber(primitives, state, t_next);

    // (7) Safety events for this step.
    for (size_t i = 0; i < model.tanks.size(); ++i) {
        const Tank& tank = model.tanks[i];
        if (state.tank_levels[i] >= tank.overflow_level_mm) {
            events.push_back({t_next, EventKind::Overflow, tank.id});
        }
        else if (state.tank_levels[i] <= tank.underflow_level_mm) {
            events.push_back({t_next, EventKind::Underflow, tank.id});
        }
    }

    // (8)
    state.time = t_next;
}

} // namespace detail

/// Single-step convenience wrapper (compiles the scenario each call; use run()
/// for whole trajectories).
inline std::pair<DualState, std::vector<SafetyEvent>> step(const PlantIndex& ix, DualState state,
                                                           const AttackScenario& scenario,
                                                           double dt)
{
    if (!(dt > 0.0)) {
        throw ContractViolation("step: dt must be positive");
    }
    const auto primitives = detail::compile_scenario(ix, scenario);
    std::vector<SafetyEvent> events;
    std::vector<double> flows(ix.paths.size(), 0.0);
    detail::step_impl(ix, primitives, state, dt, events, flows);
    return {std::move(state), std::move(events)};
}

/// Builds a consistent dual state from explicit sensor values and actuator
/// states.  Every level sensor and every actuator must be covered; flow
/// sensors left out are derived by resolving path flows against the given
/// actuator states and levels.  Cyber mirrors physical; commanded mirrors
/// actual.
inline DualState initial_state_from(const PlantIndex& ix,
                                    const std::map<ComponentId, double>& sensor_values,
                                    const std::map<ComponentId, std::string>& actuator_states)
{
    const PlantModel& model = *ix.model;
    std::vector<std::string> missing;
    for (const Sensor& s : model.sensors) {
        if (s.kind == SensorKind::Level && !sensor_values.count(s.id)) {
            missing.push_back(s.id);
        }
    }
    for (const FlowElement& e : model.flow_elements) {
        if (!actuator_states.count(e.id)) {
            missing.push_back(e.id);
        }
    }
    if (!missing.empty()) {
        std::string msg = "initial_state_from: missing required components:";
        for (const std::string& id : missing) {
            msg += " " + id;
        }
        throw ContractViolation(msg);
    }
    for (const auto& [id, value] : sensor_values) {
        if (!ix.sensor_pos.count(id)) {
            throw ContractViolation("initial_state_from: unknown sensor \"" + id + "\"");
        }
        (void)value;
    }

    DualState state;
    state.time = 0.0;
    state.actuator_states.resize(model.flow_elements.size());
    for (size_t i = 0; i < model.flow_elements.size(); ++i) {
        const FlowElement& e = model.flow_elements[i];
        state.actuator_states[i] =
            parse_state_label(e.kind, actuator_states.at(e.id), e.id) ? 1 : 0;
    }
    state.commanded_states = state.actuator_states;

    // Tank levels: first declared level sensor wins; unsensed tanks fall back
    // to their configured initial level.
    state.tank_levels.resize(model.tanks.size());
    for (size_t i = 0; i < model.tanks.size(); ++i) {
        state.tank_levels[i] = model.tanks[i].initial_level_mm;
    }
    for (size_t i = model.sensors.size(); i-- > 0;) {
        const Sensor& s = model.sensors[i];
        if (s.kind == SensorKind::Level) {
            double level = sensor_values.at(s.id);
            const Tank& tank = model.tanks[ix.sensor_target[i]];
            level = std::min(std::max(level, 0.0), tank.physical_height_mm);
            state.tank_levels[ix.sensor_target[i]] = level;
        }
    }

    // Resolve flows once so flow sensors start consistent.
    std::vector<double> flows(ix.paths.size(), 0.0);
    for (size_t i = 0; i < ix.paths.size(); ++i) {
        const PlantIndex::CompiledPath& cp = ix.paths[i];
        std::optional<double> source_level;
        if (cp.source_tank >= 0) {
            source_level = state.tank_levels[static_cast<size_t>(cp.source_tank)];
        }
        flows[i] = detail::resolve_flow(model, model.flow_paths[i], cp.elements,
                                        state.actuator_states, source_level)
                       .delivered_m3ph;
    }
    state.physical_sensors.resize(model.sensors.size());
    for (size_t i = 0; i < model.sensors.size(); ++i) {
        const Sensor& s = model.sensors[i];
        if (s.kind == SensorKind::Level) {
            state.physical_sensors[i] = state.tank_levels[ix.sensor_target[i]];
        }
        else {
            auto given = sensor_values.find(s.id);
            state.physical_sensors[i] =
                given != sensor_values.end() ? given->second : flows[ix.sensor_target[i]];
        }
    }
    state.cyber_sensors = state.physical_sensors;
    return state;
}

/// Default quiescent state built from the model's own initial levels, all
/// actuators disabled.
inline DualState default_initial_state(const PlantIndex& ix)
{
    std::map<ComponentId, double> sensors;
    std::map<ComponentId, std::string> actuators;
    const PlantModel& model = *ix.model;
    for (const Sensor& s : model.sensors) {
        if (s.kind == SensorKind::Level) {
            sensors[s.id] = model.tanks.at(ix.sensor_target.at(ix.sensor_pos.at(s.id))).initial_level_mm;
        }
    }
    for (const FlowElement& e : model.flow_elements) {
        actuators[e.id] = disabled_label(e.kind);
    }
    return initial_state_from(ix, sensors, actuators);
}

/// Runs the scenario for `horizon` seconds at fixed dt and returns the full
/// trace: floor(horizon/dt)+1 uniformly spaced samples including the initial
/// one, plus all safety events.  Deterministic: identical inputs produce
/// bit-identical traces.
inline SimulationTrace run(const PlantIndex& ix, const DualState& initial,
                           const AttackScenario& scenario, double dt, double horizon)
{
    if (!(dt > 0.0) || horizon < dt) {
        throw ContractViolation("run: requires dt > 0 and horizon >= dt");
    }
    const auto primitives = detail::compile_scenario(ix, scenario);
    const size_t n_steps = static_cast<size_t>(std::floor(horizon / dt + 1e-9));

    SimulationTrace trace;
    trace.dt = dt;
    trace.samples.reserve(n_steps + 1);

    DualState state = initial;
    const double t0 = state.time;
    detail::refresh_cyber(primitives, state, t0);
    // The initial sample participates in safety accounting too, so a run that
    // starts inside a violation reports it at t0.
    for (size_t i = 0; i < ix.model->tanks.size(); ++i) {
        const Tank& tank = ix.model->tanks[i];
        if (state.tank_levels[i] >= tank.overflow_level_mm) {
            trace.events.push_back({t0, EventKind::Overflow, tank.id});
        }
        else if (state.tank_levels[i] <= tank.underflow_level_mm) {
            trace.events.push_back({t0, EventKind::Underflow, tank.id});
        }
    }
    trace.samples.push_back(state);

    std::vector<double> flows(ix.paths.size(), 0.0);
    for (size_t i = 1; i <= n_steps; ++i) {
        detail::step_impl(ix, primitives, state, dt, trace.events, flows);
        state.time = t0 + static_cast<double>(i) * dt; // pin to the exact grid
        trace.samples.push_back(state);
    }
    return trace;
}

inline SimulationTrace run(const PlantModel& model, const DualState& initial,
                           const AttackScenario& scenario, double dt, double horizon)
{
    return run(PlantIndex::build(model), initial, scenario, dt, horizon);
}

/// Id-keyed view of one sample, for I/O and reporting.
struct StateValues {
    std::map<ComponentId, double> physical_sensors;
    std::map<ComponentId, double> cyber_sensors;
    std::map<ComponentId, std::string> actuator_states;
    std::map<ComponentId, std::string> commanded_states;
    std::map<ComponentId, double> tank_levels;
    double time = 0.0;
};

inline StateValues state_values(const PlantIndex& ix, const DualState& state)
{
    const PlantModel& model = *ix.model;
    StateValues out;
    out.time = state.time;
    for (size_t i = 0; i < model.sensors.size(); ++i) {
        out.physical_sensors[model.sensors[i].id] = state.physical_sensors[i];
        out.cyber_sensors[model.sensors[i].id] = state.cyber_sensors[i];
    }
    for (size_t i = 0; i < model.flow_elements.size(); ++i) {
        const FlowElement& e = model.flow_elements[i];
        out.actuator_states[e.id] = state_label(e.kind, state.actuator_states[i] != 0);
        out.commanded_states[e.id] = state_label(e.kind, state.commanded_states[i] != 0);
    }
    for (size_t i = 0; i < model.tanks.size(); ++i) {
        out.tank_levels[model.tanks[i].id] = state.tank_levels[i];
    }
    return out;
}

} // namespace icsim
