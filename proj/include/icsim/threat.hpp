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
#include <set>
#include <string>
#include <vector>

#include "icsim/errors.hpp"
#include "icsim/plant.hpp"

namespace icsim {

// ---------------------------------------------------------------------------
// Threat-model-guided model reduction: from what the attacker wants to move
// (intent) and what they can touch (capability), derive the subset of
// sensors, actuators, and control statements that must be modeled.
// ---------------------------------------------------------------------------

/// The sensors whose readings define the attacker's goal metric.
struct ThreatIntent {
    std::vector<ComponentId> metric_sensors;

    bool operator==(const ThreatIntent&) const = default;
};

/// What the attacker can manipulate: spoofable sensors and command-spoofable
/// actuators.
struct ThreatCapability {
    std::vector<ComponentId> sensors;
    std::vector<ComponentId> actuators;

    bool operator==(const ThreatCapability&) const = default;
};

/// Output sets, each in the model's declaration order.
struct ModelSlice {
    std::vector<ComponentId> sensors;
    std::vector<ComponentId> actuators;
    std::vector<std::string> control_statements;

    bool operator==(const ModelSlice&) const = default;
};

/// Directed bipartite dependency graph over sensors and actuators:
///   sensor -> actuator when a control statement turns that reading into that
///   command, and actuator -> sensor when the actuator physically moves what
///   the sensor measures (it sits on the measured path, or on a path feeding
///   or draining the measured tank).
struct DependencyGraph {
    std::vector<std::vector<size_t>> sensor_to_actuators; // control edges
    std::vector<std::vector<size_t>> actuator_to_sensors; // physical edges

    /// Flat (from, to) id pairs, deterministic order, for reporting/tests.
    std::vector<std::pair<ComponentId, ComponentId>> edges(const PlantModel& model) const
    {
        std::vector<std::pair<ComponentId, ComponentId>> out;
        for (size_t s = 0; s < sensor_to_actuators.size(); ++s) {
            for (size_t a : sensor_to_actuators[s]) {
                out.push_back({model.sensors[s].id, model.flow_elements[a].id});
            }
        }
        for (size_t a = 0; a < actuator_to_sensors.size(); ++a) {
            for (size_t s : actuator_to_sensors[a]) {
                out.push_back({model.flow_elements[a].id, model.sensors[s].id});
            }
        }
        return out;
    }
};

inline DependencyGraph dependency_graph(const PlantIndex& ix)
{
    const PlantModel& model = *ix.model;
    std::vector<std::set<size_t>> s2a(model.sensors.size());
    std::vector<std::set<size_t>> a2s(model.flow_elements.size());

    for (const PlantIndex::CompiledStatement& cs : ix.statements) {
        for (const PlantIndex::CompiledAtom& atom : cs.condition) {
            for (const PlantIndex::CompiledAction& action : cs.actions) {
                s2a[atom.sensor].insert(action.actuator);
            }
        }
    }
    for (size_t p = 0; p < ix.paths.size(); ++p) {
        const PlantIndex::CompiledPath& cp = ix.paths[p];
        for (size_t s = 0; s < model.sensors.size(); ++s) {
            const Sensor& sensor = model.sensors[s];
            bool measures_path = false;
            if (sensor.kind == SensorKind::Flow) {
                measures_path = ix.sensor_target[s] == p;
            }
            else {
                const int tank = static_cast<int>(ix.sensor_target[s]);
                measures_path = cp.source_tank == tank || cp.sink_tank == tank;
            }
            if (measures_path) {
                for (size_t a : cp.elements) {
                    a2s[a].insert(s);
                }
            }
        }
    }

    DependencyGraph g;
    g.sensor_to_actuators.resize(model.sensors.size());
    g.actuator_to_sensors.resize(model.flow_elements.size());
    for (size_t s = 0; s < s2a.size(); ++s) {
        g.sensor_to_actuators[s].assign(s2a[s].begin(), s2a[s].end());
    }
    for (size_t a = 0; a < a2s.size(); ++a) {
        g.actuator_to_sensors[a].assign(a2s[a].begin(), a2s[a].end());
    }
    return g;
}

inline DependencyGraph dependency_graph(const PlantModel& model)
{
    return dependency_graph(PlantIndex::build(model));
}

namespace detail {

inline void require_sensors_exist(const PlantIndex& ix, const std::vector<ComponentId>& ids,
                                  const char* what)
{
    for (const ComponentId& id : ids) {
        if (!ix.sensor_pos.count(id)) {
            throw ContractViolation(std::string(what) + ": unknown sensor \"" + id + "\"");
        }
    }
}

inline void require_actuators_exist(const PlantIndex& ix, const std::vector<ComponentId>& ids,
                                    const char* what)
{
    for (const ComponentId& id : ids) {
        if (!ix.element_pos.count(id)) {
            throw ContractViolation(std::string(what) + ": unknown actuator \"" + id + "\"");
        }
    }
}

/// Statement indices of the relevance closure, ascending (= declaration
/// order).
inline std::vector<size_t> relevant_statement_indices(const PlantIndex& ix,
                                                      const DependencyGraph& graph,
                                                      const ThreatIntent& intent)
{
    const PlantModel& model = *ix.model;
    if (intent.metric_sensors.empty()) {
        throw ContractViolation("intent: metric_sensors must be nonempty");
    }
    require_sensors_exist(ix, intent.metric_sensors, "intent");

    std::set<size_t> metric;
    for (const ComponentId& id : intent.metric_sensors) {
        metric.insert(ix.sensor_pos.at(id));
    }
    // Actuators that physically move any metric sensor's measurement.
    std::set<size_t> metric_movers;
    for (size_t a = 0; a < graph.actuator_to_sensors.size(); ++a) {
        for (size_t s : graph.actuator_to_sensors[a]) {
            if (metric.count(s)) {
                metric_movers.insert(a);
            }
        }
    }

    const size_t n = ix.statements.size();
    std::vector<bool> in_set(n, false);
    // Sensor/actuator ids known to couple to the set so far.  Beyond each
    // member statement's own components, its actuators pull in the sensors
    // they physically move and its condition sensors pull in the actuators
    // that physically move them, so chains coupled only through the process
    // (not through shared tags) are still picked up.
    std::set<size_t> coupled_sensors, coupled_actuators;

    auto absorb = [&](size_t st) {
        in_set[st] = true;
        for (const PlantIndex::CompiledAtom& atom : ix.statements[st].condition) {
            coupled_sensors.insert(atom.sensor);
            for (size_t a = 0; a < graph.actuator_to_sensors.size(); ++a) {
                for (size_t s : graph.actuator_to_sensors[a]) {
                    if (s == atom.sensor) {
                        coupled_actuators.insert(a);
                    }
                }
            }
        }
        for (const PlantIndex::CompiledAction& action : ix.statements[st].actions) {
            coupled_actuators.insert(action.actuator);
            for (size_t s : graph.actuator_to_sensors[action.actuator]) {
                coupled_sensors.insert(s);
            }
        }
    };

    for (size_t st = 0; st < n; ++st) {
        bool seed = false;
        for (const PlantIndex::CompiledAtom& atom : ix.statements[st].condition) {
            seed = seed || metric.count(atom.sensor) > 0;
        }
        for (const PlantIndex::CompiledAction& action : ix.statements[st].actions) {
            seed = seed || metric_movers.count(action.actuator) > 0;
        }
        if (seed) {
            absorb(st);
        }
    }

    bool grew = true;
    while (grew) {
        grew = false;
        for (size_t st = 0; st < n; ++st) {
            if (in_set[st]) {
                continue;
            }
            bool touches = false;
            for (const PlantIndex::CompiledAtom& atom : ix.statements[st].condition) {
                touches = touches || coupled_sensors.count(atom.sensor) > 0;
            }
            for (const PlantIndex::CompiledAction& action : ix.statements[st].actions) {
                touches = touches || coupled_actuators.count(action.actuator) > 0;
            }
            if (touches) {
                absorb(st);
                grew = true;
            }
        }
    }

    std::vector<size_t> out;
    for (size_t st = 0; st < n; ++st) {
        if (in_set[st]) {
            out.push_back(st);
        }
    }
    (void)model;
    return out;
}

} // namespace detail

/// Control statements that can influence the metric sensors, directly or
/// through shared components and physical coupling; declaration order.
inline std::vector<std::string> relevant_statements(const PlantModel& model,
                                                    const ThreatIntent& intent)
{
    const PlantIndex ix = PlantIndex::build(model);
    const DependencyGraph graph = dependency_graph(ix);
    std::vector<std::string> out;
    for (size_t st : detail::relevant_statement_indices(ix, graph, intent)) {
        out.push_back(model.control_statements[st].id);
    }
    return out;
}

/// Reduces the plant to the attacker-relevant subset.  A component makes the
/// slice when it is (a) referenced by the relevance closure for the intent
/// and (b) attacker-controlled or influenced by an attacker-controlled
/// component along the dependency graph.
inline ModelSlice slice(const PlantModel& model, const ThreatIntent& intent,
                        const ThreatCapability& capability)
{
    const PlantIndex ix = PlantIndex::build(model);
    const DependencyGraph graph = dependency_graph(ix);

    if (capability.sensors.empty() && capability.actuators.empty()) {
        throw ContractViolation("capability: at least one of sensors/actuators must be nonempty");
    }
    detail::require_sensors_exist(ix, capability.sensors, "capability");
    detail::require_actuators_exist(ix, capability.actuators, "capability");

    const std::vector<size_t> relevant = detail::relevant_statement_indices(ix, graph, intent);

    std::set<size_t> rel_sensors, rel_actuators;
    for (size_t st : relevant) {
        for (const PlantIndex::CompiledAtom& atom : ix.statements[st].condition) {
            rel_sensors.insert(atom.sensor);
            for (size_t a = 0; a < graph.actuator_to_sensors.size(); ++a) {
                for (size_t s : graph.actuator_to_sensors[a]) {
                    if (s == atom.sensor) {
                        rel_actuators.insert(a);
                    }
                }
            }
        }
        for (const PlantIndex::CompiledAction& action : ix.statements[st].actions) {
            rel_actuators.insert(action.actuator);
            for (size_t s : graph.actuator_to_sensors[action.actuator]) {
                rel_sensors.insert(s);
            }
        }
    }

    // Forward reachability from the capability over control + physical edges.
    std::set<size_t> reach_sensors, reach_actuators;
    std::vector<size_t> queue_s, queue_a;
    for (const ComponentId& id : capability.sensors) {
        if (reach_sensors.insert(ix.sensor_pos.at(id)).second) {
            queue_s.push_back(ix.sensor_pos.at(id));
        }
    }
    for (const ComponentId& id : capability.actuators) {
        if (reach_actuators.insert(ix.element_pos.at(id)).second) {
            queue_a.push_back(ix.element_pos.at(id));
        }
    }
    while (!queue_s.empty() || !queue_a.empty()) {
        if (!queue_s.empty()) {
            const size_t s = queue_s.back();
            queue_s.pop_back();
            for (size_t a : graph.sensor_to_actuators[s]) {
                if (reach_actuators.insert(a).second) {
                    queue_a.push_back(a);
                }
            }
        }
        else {
            const size_t a = queue_a.back();
            queue_a.pop_back();
            for (size_t s : graph.actuator_to_sensors[a]) {
                if (reach_sensors.insert(s).second) {
                    queue_s.push_back(s);
                }
            }
        }
    }

    ModelSlice out;
    for (size_t s = 0; s < model.sensors.size(); ++s) {
        if (rel_sensors.count(s) && reach_sensors.count(s)) {
            out.sensors.push_back(model.sensors[s].id);
        }
    }
    for (size_t a = 0; a < model.flow_elements.size(); ++a) {
        if (rel_actuators.count(a) && reach_actuators.count(a)) {
            out.actuators.push_back(model.flow_elements[a].id);
        }
    }
    const std::set<ComponentId> s_model(out.sensors.begin(), out.sensors.end());
    const std::set<ComponentId> a_model(out.actuators.begin(), out.actuators.end());
    for (const ControlStatement& cs : model.control_statements) {
        bool references = false;
        for (const ConditionAtom& atom : cs.condition) {
            references = references || s_model.count(atom.sensor) > 0;
        }
        for (const ControlAction& action : cs.actions) {
            references = references || a_model.count(action.actuator) > 0;
        }
        if (references) {
            out.control_statements.push_back(cs.id);
        }
    }
    return out;
}

/// Builds the standalone sub-plant induced by a slice, closing over whatever
/// the kept statements and paths still reference so the result validates.
inline PlantModel restrict_model(const PlantModel& model, const ModelSlice& sl)
{
    std::set<ComponentId> keep_sensors(sl.sensors.begin(), sl.sensors.end());
    std::set<ComponentId> keep_actuators(sl.actuators.begin(), sl.actuators.end());
    const std::set<std::string> keep_statements(sl.control_statements.begin(),
                                                sl.control_statements.end());

    for (const ControlStatement& cs : model.control_statements) {
        if (!keep_statements.count(cs.id)) {
            continue;
        }
        for (const ConditionAtom& atom : cs.condition) {
            keep_sensors.insert(atom.sensor);
        }
        for (const ControlAction& action : cs.actions) {
            keep_actuators.insert(action.actuator);
        }
    }

    // Keep each path that involves a kept actuator, and everything it needs.
    std::set<ComponentId> keep_paths, keep_tanks;
    for (const FlowPath& p : model.flow_paths) {
        const bool touched = std::any_of(p.elements.begin(), p.elements.end(),
                                         [&](const ComponentId& el) {
                                             return keep_actuators.count(el) > 0;
                                         });
        if (!touched) {
            continue;
        }
        keep_paths.insert(p.id);
        for (const ComponentId& el : p.elements) {
            keep_actuators.insert(el);
        }
        if (!is_external(p.source)) {
            keep_tanks.insert(p.source);
        }
        if (!is_external(p.sink)) {
            keep_tanks.insert(p.sink);
        }
    }
    for (const Sensor& s : model.sensors) {
        if (keep_sensors.count(s.id) && s.kind == SensorKind::Level) {
            keep_tanks.insert(s.attachment);
        }
    }
    // Sensors watching dropped paths cannot survive.
    std::set<ComponentId> final_sensors;
    for (const Sensor& s : model.sensors) {
        if (!keep_sensors.count(s.id)) {
            continue;
        }
        if (s.kind == SensorKind::Flow && !keep_paths.count(s.attachment)) {
            continue;
        }
        final_sensors.insert(s.id);
    }

    PlantModel out;
    out.name = model.name + "-slice";
    for (const Tank& t : model.tanks) {
        if (keep_tanks.count(t.id)) {
            out.tanks.push_back(t);
        }
    }
    for (const FlowElement& e : model.flow_elements) {
        if (keep_actuators.count(e.id)) {
            out.flow_elements.push_back(e);
        }
    }
    for (const Sensor& s : model.sensors) {
        if (final_sensors.count(s.id)) {
            out.sensors.push_back(s);
        }
    }
    for (const FlowPath& p : model.flow_paths) {
        if (keep_paths.count(p.id)) {
            out.flow_paths.push_back(p);
        }
    }
    for (const ControlStatement& cs : model.control_statements) {
        if (!keep_statements.count(cs.id)) {
            continue;
        }
        const bool complete =
            std::all_of(cs.condition.begin(), cs.condition.end(),
                        [&](const ConditionAtom& atom) {
                            return final_sensors.count(atom.sensor) > 0;
                        });
        if (complete) {
            out.control_statements.push_back(cs);
        }
    }
    for (const auto& [name, value] : model.thresholds) {
        const std::string prefix = name.substr(0, name.find('.'));
        if (final_sensors.count(prefix)) {
            out.thresholds.emplace(name, value);
        }
    }
    return out;
}

} // namespace icsim
