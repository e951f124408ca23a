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
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "icsim/errors.hpp"

namespace icsim {

// ---------------------------------------------------------------------------
// Core model types.
//
// The plant is described as immutable value types: storage tanks, flow
// elements (pumps and motorized valves), sensors, flow paths connecting an
// upstream endpoint to a downstream endpoint through an ordered chain of
// elements, and threshold-triggered control statements.  Units are fixed
// throughout: levels in mm, flows in m^3/hr, areas in m^2, time in seconds.
// ---------------------------------------------------------------------------

using ComponentId = std::string;

/// Endpoint keyword used by FlowPath::source / FlowPath::sink for flows that
/// enter from or leave to outside the modeled system boundary.
inline constexpr const char* kExternal = "external";

inline bool is_external(const ComponentId& endpoint)
{
    return endpoint == kExternal;
}

struct Tank {
    ComponentId id;
    double cross_section_area_m2 = 0.0;
    double physical_height_mm = 0.0;
    double overflow_level_mm = 0.0;  // safety threshold, crossing emits an event
    double underflow_level_mm = 0.0; // safety threshold, 0 means "tank emptied"
    double initial_level_mm = 0.0;

    bool operator==(const Tank&) const = default;
};

enum class FlowElementKind { Pump, Valve };

/// State labels are fixed by element kind: pumps are "on"/"off", valves are
/// "open"/"closed".  Internally a state is just a boolean "enabled".
inline const char* enabled_label(FlowElementKind kind)
{
    return kind == FlowElementKind::Pump ? "on" : "open";
}

inline const char* disabled_label(FlowElementKind kind)
{
    return kind == FlowElementKind::Pump ? "off" : "closed";
}

inline const char* state_label(FlowElementKind kind, bool enabled)
{
    return enabled ? enabled_label(kind) : disabled_label(kind);
}

/// Parses "on"/"off"/"open"/"closed" for the given element kind.
inline bool parse_state_label(FlowElementKind kind, const std::string& label, const ComponentId& id)
{
    if (label == enabled_label(kind)) {
        return true;
    }
    if (label == disabled_label(kind)) {
        return false;
    }
    throw ContractViolation("invalid state label \"" + label + "\" for " + id + " (expected "
                            + enabled_label(kind) + "/" + disabled_label(kind) + ")");
}

struct FlowElement {
    ComponentId id;
    FlowElementKind kind = FlowElementKind::Valve;
    double design_flow_rate_m3ph = 0.0;

    bool operator==(const FlowElement&) const = default;
};

enum class SensorKind { Level, Flow };

struct Sensor {
    ComponentId id;
    SensorKind kind = SensorKind::Level;
    /// Tank id for level sensors, flow-path id for flow sensors.
    ComponentId attachment;

    bool operator==(const Sensor&) const = default;
};

struct FlowPath {
    ComponentId id;
    ComponentId source; // tank id or kExternal (external supply)
    ComponentId sink;   // tank id or kExternal (external discharge)
    std::vector<ComponentId> elements; // ordered upstream -> downstream, nonempty
    /// Fraction of the path's design rate actually delivered downstream;
    /// models permeate splits (reverse-osmosis product vs reject).  1.0 for
    /// ordinary paths.
    double yield_fraction = 1.0;

    bool operator==(const FlowPath&) const = default;
};

enum class Comparator { GreaterEqual, LessEqual };

inline const char* comparator_label(Comparator c)
{
    return c == Comparator::GreaterEqual ? ">=" : "<=";
}

struct ConditionAtom {
    ComponentId sensor;
    Comparator comparator = Comparator::GreaterEqual;
    double threshold = 0.0; // in the sensor's unit (mm or m^3/hr)

    bool operator==(const ConditionAtom&) const = default;
};

struct ControlAction {
    ComponentId actuator;
    std::string target_state; // a valid state label for the actuator's kind

    bool operator==(const ControlAction&) const = default;
};

/// "if all atoms hold, command all actions" — conjunction over the condition,
/// actions applied in order.
struct ControlStatement {
    std::string id;
    std::vector<ConditionAtom> condition; // nonempty
    std::vector<ControlAction> actions;   // nonempty

    bool operator==(const ControlStatement&) const = default;
};

struct PlantModel {
    std::string name;
    std::vector<Tank> tanks;
    std::vector<FlowElement> flow_elements;
    std::vector<Sensor> sensors;
    std::vector<FlowPath> flow_paths;
    std::vector<ControlStatement> control_statements; // declaration order is the evaluation order
    /// Named levels ("LIT-301.HH" -> 1200.0) so attack catalogs and configs
    /// can reference symbolic thresholds instead of magic numbers.
    std::map<std::string, double> thresholds;

    bool operator==(const PlantModel&) const = default;
};

// ---------------------------------------------------------------------------
// Validation.  Violations are returned as data (one human-readable string per
// problem, each naming the offending component) rather than thrown, so a
// caller can report all of them at once.
// ---------------------------------------------------------------------------

inline std::vector<std::string> validate_plant(const PlantModel& model)
{
    std::vector<std::string> issues;
    auto flag = [&issues](const std::string& msg) { issues.push_back(msg); };

    std::set<ComponentId> ids;
    auto claim_id = [&](const ComponentId& id, const char* what) {
        if (id.empty()) {
            flag(std::string(what) + " with empty id");
            return;
        }
        if (is_external(id)) {
            flag(std::string(what) + " \"" + id + "\": reserved endpoint keyword used as id");
            return;
        }
        if (!ids.insert(id).second) {
            flag(std::string(what) + " \"" + id + "\": duplicate id");
        }
    };

    std::set<ComponentId> tank_ids, element_ids, sensor_ids, path_ids;
    for (const Tank& t : model.tanks) {
        claim_id(t.id, "tank");
        tank_ids.insert(t.id);
        if (t.cross_section_area_m2 <= 0.0) {
            flag("tank \"" + t.id + "\": cross_section_area must be positive");
        }
        if (!(0.0 <= t.underflow_level_mm && t.underflow_level_mm < t.overflow_level_mm
              && t.overflow_level_mm <= t.physical_height_mm)) {
            flag("tank \"" + t.id + "\": requires 0 <= underflow < overflow <= physical_height");
        }
        if (t.initial_level_mm < 0.0 || t.initial_level_mm > t.physical_height_mm) {
            flag("tank \"" + t.id + "\": initial_level outside [0, physical_height]");
        }
    }
    for (const FlowElement& e : model.flow_elements) {
        claim_id(e.id, "flow element");
        element_ids.insert(e.id);
        if (e.design_flow_rate_m3ph <= 0.0) {
            flag("flow element \"" + e.id + "\": design_flow_rate must be positive");
        }
    }
    for (const FlowPath& p : model.flow_paths) {
        claim_id(p.id, "flow path");
        path_ids.insert(p.id);
    }
    for (const Sensor& s : model.sensors) {
        claim_id(s.id, "sensor");
        sensor_ids.insert(s.id);
    }
    for (const ControlStatement& cs : model.control_statements) {
        claim_id(cs.id, "control statement");
    }

    for (const Sensor& s : model.sensors) {
        if (s.kind == SensorKind::Level) {
            if (!tank_ids.count(s.attachment)) {
                flag("sensor \"" + s.id + "\": level sensor attached to unknown tank \""
                     + s.attachment + "\"");
            }
        }
        else if (!path_ids.count(s.attachment)) {
            flag("sensor \"" + s.id + "\": flow sensor attached to unknown path \""
                 + s.attachment + "\"");
        }
    }

    std::map<ComponentId, ComponentId> element_owner; // element -> first path using it
    for (const FlowPath& p : model.flow_paths) {
        if (p.elements.empty()) {
            flag("flow path \"" + p.id + "\": element chain is empty");
        }
        if (!(p.yield_fraction > 0.0 && p.yield_fraction <= 1.0)) {
            flag("flow path \"" + p.id + "\": yield_fraction outside (0, 1]");
        }
        for (const ComponentId& endpoint : {p.source, p.sink}) {
            if (!is_external(endpoint) && !tank_ids.count(endpoint)) {
                flag("flow path \"" + p.id + "\": endpoint \"" + endpoint
                     + "\" is neither a tank nor \"external\"");
            }
        }
        if (!is_external(p.source) && p.source == p.sink) {
            flag("flow path \"" + p.id + "\": source and sink are the same tank");
        }
        std::set<ComponentId> seen_on_path;
        for (const ComponentId& el : p.elements) {
            if (!element_ids.count(el)) {
                flag("flow path \"" + p.id + "\": unknown flow element \"" + el + "\"");
                continue;
            }
            if (!seen_on_path.insert(el).second) {
                flag("flow path \"" + p.id + "\": element \"" + el + "\" listed twice");
            }
            auto [it, fresh] = element_owner.emplace(el, p.id);
            if (!fresh && it->second != p.id) {
                flag("flow element \"" + el + "\": appears on two paths (\"" + it->second
                     + "\" and \"" + p.id + "\")");
            }
        }
    }

    std::map<ComponentId, FlowElementKind> element_kind;
    for (const FlowElement& e : model.flow_elements) {
        element_kind[e.id] = e.kind;
    }
    for (const ControlStatement& cs : model.control_statements) {
        if (cs.condition.empty()) {
            flag("control statement \"" + cs.id + "\": condition is empty");
        }
        if (cs.actions.empty()) {
            flag("control statement \"" + cs.id + "\": action list is empty");
        }
        for (const ConditionAtom& atom : cs.condition) {
            if (!sensor_ids.count(atom.sensor)) {
                flag("control statement \"" + cs.id + "\": condition references unknown sensor \""
                     + atom.sensor + "\"");
            }
        }
        for (const ControlAction& action : cs.actions) {
            auto kind = element_kind.find(action.actuator);
            if (kind == element_kind.end()) {
                flag("control statement \"" + cs.id + "\": action targets unknown actuator \""
                     + action.actuator + "\"");
                continue;
            }
            if (action.target_state != enabled_label(kind->second)
                && action.target_state != disabled_label(kind->second)) {
                flag("control statement \"" + cs.id + "\": state \"" + action.target_state
                     + "\" is not valid for actuator \"" + action.actuator + "\"");
            }
        }
    }

    return issues;
}

// ---------------------------------------------------------------------------
// Flow resolution.
// ---------------------------------------------------------------------------

/// Result of resolving one path for one step: the delivered flow, plus the
/// pump that is running dry (enabled with an empty source tank), if any.
struct ResolvedFlow {
    double delivered_m3ph = 0.0;
    std::optional<ComponentId> dry_run_pump;
};

namespace detail {

/// Core flow rule, shared by the public helper and the engine: a path flows
/// at min(design rates) * yield iff every element is enabled and the source
/// has water.  An enabled pump with an empty tank behind it runs dry whether
/// or not the rest of the path lets water through.
inline ResolvedFlow resolve_flow(const PlantModel& model, const FlowPath& path,
                                 const std::vector<size_t>& element_indices,
                                 const std::vector<unsigned char>& enabled,
                                 std::optional<double> source_level_mm)
{
    const bool source_has_water = !source_level_mm.has_value() || *source_level_mm > 0.0;
    ResolvedFlow out;
    bool all_enabled = true;
    double min_rate = std::numeric_limits<double>::infinity();
    for (size_t idx : element_indices) {
        const FlowElement& el = model.flow_elements[idx];
        min_rate = std::min(min_rate, el.design_flow_rate_m3ph);
        if (!enabled[idx]) {
            all_enabled = false;
            continue;
        }
        if (el.kind == FlowElementKind::Pump && !source_has_water && !out.dry_run_pump) {
            out.dry_run_pump = el.id;
        }
    }
    if (all_enabled && source_has_water && !element_indices.empty()) {
        out.delivered_m3ph = min_rate * path.yield_fraction;
    }
    return out;
}

} // namespace detail

/// Resolves the delivered flow of one path against a map of actuator states.
/// `source_level_mm` is the source tank's current level, or nullopt when the
/// path draws from the external supply (which always has water).  Pure: no
/// state is read or written beyond the arguments.
inline ResolvedFlow resolve_path_flow(const PlantModel& model, const FlowPath& path,
                                      const std::map<ComponentId, std::string>& actuator_states,
                                      std::optional<double> source_level_mm)
{
    std::vector<size_t> indices;
    std::vector<unsigned char> enabled(model.flow_elements.size(), 0);
    for (const ComponentId& el_id : path.elements) {
        auto it = std::find_if(model.flow_elements.begin(), model.flow_elements.end(),
                               [&](const FlowElement& e) { return e.id == el_id; });
        if (it == model.flow_elements.end()) {
            throw ContractViolation("resolve_path_flow: path \"" + path.id
                                    + "\" references unknown flow element \"" + el_id + "\"");
        }
        auto state = actuator_states.find(el_id);
        if (state == actuator_states.end()) {
            throw ContractViolation("resolve_path_flow: no state provided for element \"" + el_id
                                    + "\" on path \"" + path.id + "\"");
        }
        const size_t idx = static_cast<size_t>(it - model.flow_elements.begin());
        enabled[idx] = parse_state_label(it->kind, state->second, el_id) ? 1 : 0;
        indices.push_back(idx);
    }
    return detail::resolve_flow(model, path, indices, enabled, source_level_mm);
}

// ---------------------------------------------------------------------------
// Compiled index.  PlantModel is a plain aggregate that is cheap to build and
// serialize; the index resolves every id to a dense position once so the
// simulation loop never touches a string map.  Building the index also
// enforces that the model validates.
// ---------------------------------------------------------------------------

struct PlantIndex {
    struct CompiledAtom {
        size_t sensor = 0;
        Comparator comparator = Comparator::GreaterEqual;
        double threshold = 0.0;
    };
    struct CompiledAction {
        size_t actuator = 0;
        bool enable = false;
    };
    struct CompiledStatement {
        std::vector<CompiledAtom> condition;
        std::vector<CompiledAction> actions;
    };
    struct CompiledPath {
        std::vector<size_t> elements;
        int source_tank = -1; // -1 = external supply
        int sink_tank = -1;   // -1 = external discharge
    };

    const PlantModel* model = nullptr;
    std::unordered_map<ComponentId, size_t> tank_pos, element_pos, sensor_pos, path_pos;
    std::vector<CompiledPath> paths;
    std::vector<CompiledStatement> statements;
    /// For each sensor: tank index (level) or path index (flow).
    std::vector<size_t> sensor_target;

    static PlantIndex build(const PlantModel& model)
    {
        const std::vector<std::string> issues = validate_plant(model);
        if (!issues.empty()) {
            std::ostringstream msg;
            msg << "plant \"" << model.name << "\" failed validation:";
            for (const std::string& issue : issues) {
                msg << "\n  - " << issue;
            }
            throw ContractViolation(msg.str());
        }

        PlantIndex ix;
        ix.model = &model;
        for (size_t i = 0; i < model.tanks.size(); ++i) {
            ix.tank_pos[model.tanks[i].id] = i;
        }
        for (size_t i = 0; i < model.flow_elements.size(); ++i) {
            ix.element_pos[model.flow_elements[i].id] = i;
        }
        for (size_t i = 0; i < model.sensors.size(); ++i) {
            ix.sensor_pos[model.sensors[i].id] = i;
        }
        for (size_t i = 0; i < model.flow_paths.size(); ++i) {
            ix.path_pos[model.flow_paths[i].id] = i;
        }

        ix.paths.resize(model.flow_paths.size());
        for (size_t i = 0; i < model.flow_paths.size(); ++i) {
            const FlowPath& p = model.flow_paths[i];
            CompiledPath& cp = ix.paths[i];
            for (const ComponentId& el : p.elements) {
                cp.elements.push_back(ix.element_pos.at(el));
            }
            cp.source_tank = is_external(p.source) ? -1 : static_cast<int>(ix.tank_pos.at(p.source));
            cp.sink_tank = is_external(p.sink) ? -1 : static_cast<int>(ix.tank_pos.at(p.sink));
        }

        ix.sensor_target.resize(model.sensors.size());
        for (size_t i = 0; i < model.sensors.size(); ++i) {
            const Sensor& s = model.sensors[i];
            ix.sensor_target[i] = s.kind == SensorKind::Level ? ix.tank_pos.at(s.attachment)
                                                              : ix.path_pos.at(s.attachment);
        }

        ix.statements.resize(model.control_statements.size());
        for (size_t i = 0; i < model.control_statements.size(); ++i) {
            const ControlStatement& cs = model.control_statements[i];
            CompiledStatement& ccs = ix.statements[i];
            for (const ConditionAtom& atom : cs.condition) {
                ccs.condition.push_back({ix.sensor_pos.at(atom.sensor), atom.comparator, atom.threshold});
            }
            for (const ControlAction& action : cs.actions) {
                const size_t el = ix.element_pos.at(action.actuator);
                const FlowElementKind kind = model.flow_elements[el].kind;
                ccs.actions.push_back({el, parse_state_label(kind, action.target_state, action.actuator)});
            }
        }
        return ix;
    }

    size_t require_sensor(const ComponentId& id) const
    {
        auto it = sensor_pos.find(id);
        if (it == sensor_pos.end()) {
            throw ContractViolation("unknown sensor \"" + id + "\"");
        }
        return it->second;
    }

    size_t require_element(const ComponentId& id) const
    {
        auto it = element_pos.find(id);
        if (it == element_pos.end()) {
            throw ContractViolation("unknown actuator \"" + id + "\"");
        }
        return it->second;
    }

    size_t require_tank(const ComponentId& id) const
    {
        auto it = tank_pos.find(id);
        if (it == tank_pos.end()) {
            throw ContractViolation("unknown tank \"" + id + "\"");
        }
        return it->second;
    }
};

/// Resolves a threshold that may be symbolic ("LIT-101.H") or numeric.
inline double resolve_threshold(const PlantModel& model, const std::string& name)
{
    auto it = model.thresholds.find(name);
    if (it == model.thresholds.end()) {
        throw ContractViolation("unknown named threshold \"" + name + "\"");
    }
    return it->second;
}

} // namespace icsim
