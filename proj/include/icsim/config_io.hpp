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

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "icsim/configs.hpp"
#include "icsim/errors.hpp"
#include "icsim/plant.hpp"
#include "icsim/sim.hpp"
#include "icsim/threat.hpp"

// ---------------------------------------------------------------------------
// JSON configuration files.
//
// Every format carries a "format" tag ("icsim-plant/1", ...) so files are
// self-describing and version bumps stay detectable.  Loaders are strict:
// unknown keys, missing keys, or wrong value types raise ConfigError with the
// file and element that caused it.  Writers are deterministic: object keys
// are emitted sorted, arrays keep declaration order, and numbers use the
// shortest round-trip representation, so saving the same value twice gives
// byte-identical files.
// ---------------------------------------------------------------------------

namespace icsim {

/// A threat model as carried by a threat file: what the attacker wants to
/// influence and what they can touch.
struct ThreatSpec {
    ThreatIntent intent;
    ThreatCapability capability;

    bool operator==(const ThreatSpec&) const = default;
};

/// Explicit starting point for a simulation run; feeds initial_state_from().
struct InitialConditions {
    std::map<ComponentId, double> sensor_values;
    std::map<ComponentId, std::string> actuator_states;

    bool operator==(const InitialConditions&) const = default;
};

/// How to read a historical dataset CSV: which column holds time and which
/// data columns map onto which model components.  Columns not mentioned are
/// ignored (the ingester reports them as warnings).
struct ColumnMapping {
    std::string timestamp_column;
    std::map<std::string, ComponentId> columns; // CSV header -> component id

    bool operator==(const ColumnMapping&) const = default;
};

namespace detail {

inline constexpr const char* kPlantFormat = "icsim-plant/1";
inline constexpr const char* kScenarioFormat = "icsim-scenario/1";
inline constexpr const char* kCatalogFormat = "icsim-catalog/1";
inline constexpr const char* kThreatFormat = "icsim-threat/1";
inline constexpr const char* kCalibrationFormat = "icsim-calibration/1";
inline constexpr const char* kInitialFormat = "icsim-init/1";
inline constexpr const char* kMappingFormat = "icsim-mapping/1";

/// Shortest decimal string that parses back to exactly the same double.
/// Used for every number this library writes into CSV files.
inline std::string format_double(double value)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) {
        throw Error("format_double: conversion failed");
    }
    return std::string(buf, ptr);
}

inline std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open \"" + path.string() + "\" for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw ConfigError("failed reading \"" + path.string() + "\"");
    }
    return buffer.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot open \"" + path.string() + "\" for writing");
    }
    out << content;
    out.flush();
    if (!out) {
        throw ConfigError("failed writing \"" + path.string() + "\"");
    }
}

inline std::string dump_json(const nlohmann::json& j)
{
    return j.dump(2) + "\n";
}

inline nlohmann::json parse_json_text(const std::string& text, const std::string& context)
{
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw ConfigError(context + ": not valid JSON");
    }
    return j;
}

inline void check_object(const nlohmann::json& j, const std::string& context)
{
    if (!j.is_object()) {
        throw ConfigError(context + ": expected a JSON object");
    }
}

/// Strict key check: every present key must be in `allowed`, every key in
/// `required` must be present.
inline void check_keys(const nlohmann::json& j, const std::vector<std::string>& required,
                       const std::vector<std::string>& optional, const std::string& context)
{
    check_object(j, context);
    for (const auto& item : j.items()) {
        const std::string& key = item.key();
        bool known = false;
        for (const std::string& k : required) {
            known = known || k == key;
        }
        for (const std::string& k : optional) {
            known = known || k == key;
        }
        if (!known) {
            throw ConfigError(context + ": unknown key \"" + key + "\"");
        }
    }
    for (const std::string& key : required) {
        if (!j.contains(key)) {
            throw ConfigError(context + ": missing key \"" + key + "\"");
        }
    }
}

inline const nlohmann::json& member(const nlohmann::json& j, const std::string& key,
                                    const std::string& context)
{
    check_object(j, context);
    auto it = j.find(key);
    if (it == j.end()) {
        throw ConfigError(context + ": missing key \"" + key + "\"");
    }
    return *it;
}

inline std::string get_string(const nlohmann::json& j, const std::string& key,
                              const std::string& context)
{
    const nlohmann::json& v = member(j, key, context);
    if (!v.is_string()) {
        throw ConfigError(context + ": key \"" + key + "\" must be a string");
    }
    return v.get<std::string>();
}

inline double get_double(const nlohmann::json& j, const std::string& key,
                         const std::string& context)
{
    const nlohmann::json& v = member(j, key, context);
    if (!v.is_number()) {
        throw ConfigError(context + ": key \"" + key + "\" must be a number");
    }
    return v.get<double>();
}

inline double get_double_or(const nlohmann::json& j, const std::string& key, double fallback,
                            const std::string& context)
{
    if (!j.contains(key)) {
        return fallback;
    }
    return get_double(j, key, context);
}

inline std::vector<std::string> get_string_array(const nlohmann::json& j, const std::string& key,
                                                 const std::string& context)
{
    const nlohmann::json& v = member(j, key, context);
    if (!v.is_array()) {
        throw ConfigError(context + ": key \"" + key + "\" must be an array");
    }
    std::vector<std::string> out;
    for (const nlohmann::json& item : v) {
        if (!item.is_string()) {
            throw ConfigError(context + ": key \"" + key + "\" must hold strings");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

inline std::map<std::string, double> get_double_map(const nlohmann::json& j,
                                                    const std::string& key,
                                                    const std::string& context)
{
    const nlohmann::json& v = member(j, key, context);
    if (!v.is_object()) {
        throw ConfigError(context + ": key \"" + key + "\" must be an object");
    }
    std::map<std::string, double> out;
    for (const auto& item : v.items()) {
        if (!item.value().is_number()) {
            throw ConfigError(context + ": \"" + key + "." + item.key()
                              + "\" must be a number");
        }
        out[item.key()] = item.value().get<double>();
    }
    return out;
}

inline std::map<std::string, std::string> get_string_map(const nlohmann::json& j,
                                                         const std::string& key,
                                                         const std::string& context)
{
    const nlohmann::json& v = member(j, key, context);
    if (!v.is_object()) {
        throw ConfigError(context + ": key \"" + key + "\" must be an object");
    }
    std::map<std::string, std::string> out;
    for (const auto& item : v.items()) {
        if (!item.value().is_string()) {
            throw ConfigError(context + ": \"" + key + "." + item.key()
                              + "\" must be a string");
        }
        out[item.key()] = item.value().get<std::string>();
    }
    return out;
}

inline void check_format(const nlohmann::json& j, const std::string& expected,
                         const std::string& context)
{
    const std::string found = get_string(j, "format", context);
    if (found != expected) {
        throw ConfigError(context + ": format is \"" + found + "\", expected \"" + expected
                          + "\"");
    }
}

inline const char* flow_element_kind_label(FlowElementKind kind)
{
    return kind == FlowElementKind::Pump ? "pump" : "valve";
}

inline FlowElementKind parse_flow_element_kind(const std::string& label,
                                               const std::string& context)
{
    if (label == "pump") {
        return FlowElementKind::Pump;
    }
    if (label == "valve") {
        return FlowElementKind::Valve;
    }
    throw ConfigError(context + ": unknown flow element kind \"" + label
                      + "\" (expected pump/valve)");
}

inline const char* sensor_kind_label(SensorKind kind)
{
    return kind == SensorKind::Level ? "level" : "flow";
}

inline SensorKind parse_sensor_kind(const std::string& label, const std::string& context)
{
    if (label == "level") {
        return SensorKind::Level;
    }
    if (label == "flow") {
        return SensorKind::Flow;
    }
    throw ConfigError(context + ": unknown sensor kind \"" + label + "\" (expected level/flow)");
}

inline Comparator parse_comparator(const std::string& label, const std::string& context)
{
    if (label == ">=") {
        return Comparator::GreaterEqual;
    }
    if (label == "<=") {
        return Comparator::LessEqual;
    }
    throw ConfigError(context + ": unknown comparator \"" + label + "\" (expected >= or <=)");
}

inline const char* attack_kind_label(AttackKind kind)
{
    return kind == AttackKind::SensorSpoof ? "sensor_spoof" : "actuator_command_spoof";
}

} // namespace detail

// ---------------------------------------------------------------------------
// Plant model.
// ---------------------------------------------------------------------------

inline nlohmann::json plant_to_json(const PlantModel& model)
{
    nlohmann::json j;
    j["format"] = detail::kPlantFormat;
    j["name"] = model.name;

    j["tanks"] = nlohmann::json::array();
    for (const Tank& t : model.tanks) {
        j["tanks"].push_back({{"id", t.id},
                              {"cross_section_area_m2", t.cross_section_area_m2},
                              {"physical_height_mm", t.physical_height_mm},
                              {"overflow_level_mm", t.overflow_level_mm},
                              {"underflow_level_mm", t.underflow_level_mm},
                              {"initial_level_mm", t.initial_level_mm}});
    }

    j["flow_elements"] = nlohmann::json::array();
    for (const FlowElement& e : model.flow_elements) {
        j["flow_elements"].push_back({{"id", e.id},
                                      {"kind", detail::flow_element_kind_label(e.kind)},
                                      {"design_flow_rate_m3ph", e.design_flow_rate_m3ph}});
    }

    j["sensors"] = nlohmann::json::array();
    for (const Sensor& s : model.sensors) {
        j["sensors"].push_back({{"id", s.id},
                                {"kind", detail::sensor_kind_label(s.kind)},
                                {"attachment", s.attachment}});
    }

    j["flow_paths"] = nlohmann::json::array();
    for (const FlowPath& p : model.flow_paths) {
        nlohmann::json jp = {{"id", p.id},
                             {"source", p.source},
                             {"sink", p.sink},
                             {"elements", p.elements}};
        if (p.yield_fraction != 1.0) {
            jp["yield_fraction"] = p.yield_fraction;
        }
        j["flow_paths"].push_back(std::move(jp));
    }

    j["control_statements"] = nlohmann::json::array();
    for (const ControlStatement& s : model.control_statements) {
        nlohmann::json condition = nlohmann::json::array();
        for (const ConditionAtom& a : s.condition) {
            condition.push_back({{"sensor", a.sensor},
                                 {"comparator", comparator_label(a.comparator)},
                                 {"threshold", a.threshold}});
        }
        nlohmann::json actions = nlohmann::json::array();
        for (const ControlAction& a : s.actions) {
            actions.push_back({{"actuator", a.actuator}, {"state", a.target_state}});
        }
        j["control_statements"].push_back(
            {{"id", s.id}, {"condition", condition}, {"actions", actions}});
    }

    j["thresholds"] = model.thresholds;
    return j;
}

inline PlantModel plant_from_json(const nlohmann::json& j, const std::string& context)
{
    detail::check_keys(j,
                       {"format", "name", "tanks", "flow_elements", "sensors", "flow_paths",
                        "control_statements", "thresholds"},
                       {}, context);
    detail::check_format(j, detail::kPlantFormat, context);

    PlantModel model;
    model.name = detail::get_string(j, "name", context);

    size_t i = 0;
    for (const nlohmann::json& jt : detail::member(j, "tanks", context)) {
        const std::string ctx = context + ": tanks[" + std::to_string(i++) + "]";
        detail::check_keys(jt,
                           {"id", "cross_section_area_m2", "physical_height_mm",
                            "overflow_level_mm", "underflow_level_mm", "initial_level_mm"},
                           {}, ctx);
        Tank t;
        t.id = detail::get_string(jt, "id", ctx);
        t.cross_section_area_m2 = detail::get_double(jt, "cross_section_area_m2", ctx);
        t.physical_height_mm = detail::get_double(jt, "physical_height_mm", ctx);
        t.overflow_level_mm = detail::get_double(jt, "overflow_level_mm", ctx);
        t.underflow_level_mm = detail::get_double(jt, "underflow_level_mm", ctx);
        t.initial_level_mm = detail::get_double(jt, "initial_level_mm", ctx);
        model.tanks.push_back(std::move(t));
    }

    i = 0;
    for (const nlohmann::json& je : detail::member(j, "flow_elements", context)) {
        const std::string ctx = context + ": flow_elements[" + std::to_string(i++) + "]";
        detail::check_keys(je, {"id", "kind", "design_flow_rate_m3ph"}, {}, ctx);
        FlowElement e;
        e.id = detail::get_string(je, "id", ctx);
        e.kind = detail::parse_flow_element_kind(detail::get_string(je, "kind", ctx), ctx);
        e.design_flow_rate_m3ph = detail::get_double(je, "design_flow_rate_m3ph", ctx);
        model.flow_elements.push_back(std::move(e));
    }

    i = 0;
    for (const nlohmann::json& js : detail::member(j, "sensors", context)) {
        const std::string ctx = context + ": sensors[" + std::to_string(i++) + "]";
        detail::check_keys(js, {"id", "kind", "attachment"}, {}, ctx);
        Sensor s;
        s.id = detail::get_string(js, "id", ctx);
        s.kind = detail::parse_sensor_kind(detail::get_string(js, "kind", ctx), ctx);
        s.attachment = detail::get_string(js, "attachment", ctx);
        model.sensors.push_back(std::move(s));
    }

    i = 0;
    for (const nlohmann::json& jp : detail::member(j, "flow_paths", context)) {
        const std::string ctx = context + ": flow_paths[" + std::to_string(i++) + "]";
        detail::check_keys(jp, {"id", "source", "sink", "elements"}, {"yield_fraction"}, ctx);
        FlowPath p;
        p.id = detail::get_string(jp, "id", ctx);
        p.source = detail::get_string(jp, "source", ctx);
        p.sink = detail::get_string(jp, "sink", ctx);
        p.elements = detail::get_string_array(jp, "elements", ctx);
        p.yield_fraction = detail::get_double_or(jp, "yield_fraction", 1.0, ctx);
        model.flow_paths.push_back(std::move(p));
    }

    i = 0;
    for (const nlohmann::json& js : detail::member(j, "control_statements", context)) {
        const std::string ctx = context + ": control_statements[" + std::to_string(i++) + "]";
        detail::check_keys(js, {"id", "condition", "actions"}, {}, ctx);
        ControlStatement s;
        s.id = detail::get_string(js, "id", ctx);
        for (const nlohmann::json& ja : detail::member(js, "condition", ctx)) {
            detail::check_keys(ja, {"sensor", "comparator", "threshold"}, {}, ctx);
            ConditionAtom a;
            a.sensor = detail::get_string(ja, "sensor", ctx);
            a.comparator = detail::parse_comparator(detail::get_string(ja, "comparator", ctx), ctx);
            a.threshold = detail::get_double(ja, "threshold", ctx);
            s.condition.push_back(std::move(a));
        }
        for (const nlohmann::json& ja : detail::member(js, "actions", ctx)) {
            detail::check_keys(ja, {"actuator", "state"}, {}, ctx);
            ControlAction a;
            a.actuator = detail::get_string(ja, "actuator", ctx);
            a.target_state = detail::get_string(ja, "state", ctx);
            s.actions.push_back(std::move(a));
        }
        model.control_statements.push_back(std::move(s));
    }

    model.thresholds = detail::get_double_map(j, "thresholds", context);
    return model;
}

/// Loads and validates a plant file; an invalid plant raises ConfigError with
/// every validation finding listed.
inline PlantModel load_plant(const std::filesystem::path& path)
{
    const std::string context = path.filename().string();
    const nlohmann::json j = detail::parse_json_text(detail::read_text_file(path), context);
    PlantModel model = plant_from_json(j, context);
    const std::vector<std::string> issues = validate_plant(model);
    if (!issues.empty()) {
        std::string msg = context + ": plant fails validation:";
        for (const std::string& issue : issues) {
            msg += "\n  - " + issue;
        }
        throw ConfigError(msg);
    }
    return model;
}

inline void save_plant(const PlantModel& model, const std::filesystem::path& path)
{
    detail::write_text_file(path, detail::dump_json(plant_to_json(model)));
}

// ---------------------------------------------------------------------------
// Attack scenarios and catalogs.
// ---------------------------------------------------------------------------

inline nlohmann::json scenario_to_json(const AttackScenario& scenario)
{
    nlohmann::json j;
    j["format"] = detail::kScenarioFormat;
    j["name"] = scenario.name;
    j["primitives"] = nlohmann::json::array();
    for (const AttackPrimitive& p : scenario.primitives) {
        nlohmann::json jp;
        jp["kind"] = detail::attack_kind_label(p.kind);
        jp["target"] = p.target;
        if (p.kind == AttackKind::SensorSpoof) {
            jp["value"] = p.spoof_value;
        }
        else {
            jp["state"] = p.forced_state;
        }
        jp["start_s"] = p.start_s;
        jp["end_s"] = p.end_s;
        j["primitives"].push_back(std::move(jp));
    }
    return j;
}

inline AttackScenario scenario_from_json(const nlohmann::json& j, const std::string& context)
{
    detail::check_keys(j, {"format", "name", "primitives"}, {}, context);
    detail::check_format(j, detail::kScenarioFormat, context);

    AttackScenario scenario;
    scenario.name = detail::get_string(j, "name", context);
    size_t i = 0;
    for (const nlohmann::json& jp : detail::member(j, "primitives", context)) {
        const std::string ctx = context + ": primitives[" + std::to_string(i++) + "]";
        const std::string kind = detail::get_string(jp, "kind", ctx);
        AttackPrimitive p;
        if (kind == "sensor_spoof") {
            detail::check_keys(jp, {"kind", "target", "value", "start_s", "end_s"}, {}, ctx);
            p.kind = AttackKind::SensorSpoof;
            p.spoof_value = detail::get_double(jp, "value", ctx);
        }
        else if (kind == "actuator_command_spoof") {
            detail::check_keys(jp, {"kind", "target", "state", "start_s", "end_s"}, {}, ctx);
            p.kind = AttackKind::ActuatorCommandSpoof;
            p.forced_state = detail::get_string(jp, "state", ctx);
        }
        else {
            throw ConfigError(ctx + ": unknown attack kind \"" + kind
                              + "\" (expected sensor_spoof/actuator_command_spoof)");
        }
        p.target = detail::get_string(jp, "target", ctx);
        p.start_s = detail::get_double(jp, "start_s", ctx);
        p.end_s = detail::get_double(jp, "end_s", ctx);
        scenario.primitives.push_back(std::move(p));
    }
    return scenario;
}

inline AttackScenario load_scenario(const std::filesystem::path& path)
{
    const std::string context = path.filename().string();
    return scenario_from_json(detail::parse_json_text(detail::read_text_file(path), context),
                              context);
}

inline void save_scenario(const AttackScenario& scenario, const std::filesystem::path& path)
{
    detail::write_text_file(path, detail::dump_json(scenario_to_json(scenario)));
}

inline nlohmann::json catalog_to_json(const NamedScenarioCatalog& catalog)
{
    nlohmann::json j;
    j["format"] = detail::kCatalogFormat;
    j["entries"] = nlohmann::json::array();
    for (const auto& [name, scenario] : catalog.entries) {
        nlohmann::json js = scenario_to_json(scenario);
        js.erase("format"); // nested: the catalog's own tag covers its entries
        j["entries"].push_back(std::move(js));
    }
    return j;
}

inline NamedScenarioCatalog catalog_from_json(const nlohmann::json& j, const std::string& context)
{
    detail::check_keys(j, {"format", "entries"}, {}, context);
    detail::check_format(j, detail::kCatalogFormat, context);

    NamedScenarioCatalog catalog;
    size_t i = 0;
    for (const nlohmann::json& je : detail::member(j, "entries", context)) {
        const std::string ctx = context + ": entries[" + std::to_string(i++) + "]";
        nlohmann::json js = je;
        detail::check_object(js, ctx);
        js["format"] = detail::kScenarioFormat;
        AttackScenario scenario = scenario_from_json(js, ctx);
        if (scenario.name.empty()) {
            throw ConfigError(ctx + ": scenario name must be nonempty");
        }
        if (catalog.entries.count(scenario.name)) {
            throw ConfigError(ctx + ": duplicate scenario name \"" + scenario.name + "\"");
        }
        catalog.entries[scenario.name] = std::move(scenario);
    }
    return catalog;
}

inline NamedScenarioCatalog load_catalog(const std::filesystem::path& path)
{
    const std::string context = path.filename().string();
    return catalog_from_json(detail::parse_json_text(detail::read_text_file(path), context),
                             context);
}

inline void save_catalog(const NamedScenarioCatalog& catalog, const std::filesystem::path& path)
{
    detail::write_text_file(path, detail::dump_json(catalog_to_json(catalog)));
}

// ---------------------------------------------------------------------------
// Threat files.
// ---------------------------------------------------------------------------

inline nlohmann::json threat_to_json(const ThreatSpec& threat)
{
    nlohmann::json j;
    j["format"] = detail::kThreatFormat;
    j["intent"] = {{"metric_sensors", threat.intent.metric_sensors}};
    j["capability"] = {{"sensors", threat.capability.sensors},
                       {"actuators", threat.capability.actuators}};
    return j;
}

inline ThreatSpec threat_from_json(const nlohmann::json& j, const std::string& context)
{
    detail::check_keys(j, {"format", "intent", "capability"}, {}, context);
    detail::check_format(j, detail::kThreatFormat, context);

    ThreatSpec threat;
    const nlohmann::json& ji = detail::member(j, "intent", context);
    detail::check_keys(ji, {"metric_sensors"}, {}, context + ": intent");
    threat.intent.metric_sensors =
        detail::get_string_array(ji, "metric_sensors", context + ": intent");

    const nlohmann::json& jc = detail::member(j, "capability", context);
    detail::check_keys(jc, {}, {"sensors", "actuators"}, context + ": capability");
    if (jc.contains("sensors")) {
        threat.capability.sensors =
            detail::get_string_array(jc, "sensors", context + ": capability");
    }
    if (jc.contains("actuators")) {
        threat.capability.actuators =
            detail::get_string_array(jc, "actuators", context + ": capability");
    }
    return threat;
}

inline ThreatSpec load_threat(const std::filesystem::path& path)
{
    const std::string context = path.filename().string();
    return threat_from_json(detail::parse_json_text(detail::read_text_file(path), context),
                            context);
}

inline void save_threat(const ThreatSpec& threat, const std::filesystem::path& path)
{
    detail::write_text_file(path, detail::dump_json(threat_to_json(threat)));
}

// ---------------------------------------------------------------------------
// Calibration sets.
// ---------------------------------------------------------------------------

inline nlohmann::json calibration_to_json(const CalibrationSet& c)
{
    nlohmann::json j;
    j["format"] = detail::kCalibrationFormat;
    j["areas_m2"] = c.areas_m2;
    j["overflow_levels_mm"] = c.overflow_levels_mm;
    j["underflow_levels_mm"] = c.underflow_levels_mm;
    j["ro_yield_fraction"] = c.ro_yield_fraction;
    j["design_flow_rates_m3ph"] = c.design_flow_rates_m3ph;
    j["ttcs_targets_s"] = c.ttcs_targets_s;
    j["flow_magnitude_targets_m3ph"] = c.flow_magnitude_targets_m3ph;
    return j;
}

inline CalibrationSet calibration_from_json(const nlohmann::json& j, const std::string& context)
{
    detail::check_keys(j,
                       {"format", "areas_m2", "overflow_levels_mm", "underflow_levels_mm",
                        "ro_yield_fraction", "design_flow_rates_m3ph", "ttcs_targets_s",
                        "flow_magnitude_targets_m3ph"},
                       {}, context);
    detail::check_format(j, detail::kCalibrationFormat, context);

    CalibrationSet c;
    c.areas_m2 = detail::get_double_map(j, "areas_m2", context);
    c.overflow_levels_mm = detail::get_double_map(j, "overflow_levels_mm", context);
    c.underflow_levels_mm = detail::get_double_map(j, "underflow_levels_mm", context);
    c.ro_yield_fraction = detail::get_double(j, "ro_yield_fraction", context);
    c.design_flow_rates_m3ph = detail::get_double_map(j, "design_flow_rates_m3ph", context);
    c.ttcs_targets_s = detail::get_double_map(j, "ttcs_targets_s", context);
    c.flow_magnitude_targets_m3ph =
        detail::get_double_map(j, "flow_magnitude_targets_m3ph", context);
    return c;
}

inline CalibrationSet load_calibration(const std::filesystem::path& path)
{
    const std::string context = path.filename().string();
    return calibration_from_json(detail::parse_json_text(detail::read_text_file(path), context),
                                 context);
}

inline void save_calibration(const CalibrationSet& c, const std::filesystem::path& path)
{
    detail::write_text_file(path, detail::dump_json(calibration_to_json(c)));
}

// ---------------------------------------------------------------------------
// Initial conditions.
// ---------------------------------------------------------------------------

inline nlohmann::json initial_to_json(const InitialConditions& init)
{
    nlohmann::json j;
    j["format"] = detail::kInitialFormat;
    j["sensor_values"] = init.sensor_values;
    j["actuator_states"] = init.actuator_states;
    return j;
}

inline InitialConditions initial_from_json(const nlohmann::json& j, const std::string& context)
{
    detail::check_keys(j, {"format", "sensor_values", "actuator_states"}, {}, context);
    detail::check_format(j, detail::kInitialFormat, context);

    InitialConditions init;
    for (auto& [id, value] : detail::get_double_map(j, "sensor_values", context)) {
        init.sensor_values[id] = value;
    }
    for (auto& [id, state] : detail::get_string_map(j, "actuator_states", context)) {
        init.actuator_states[id] = state;
    }
    return init;
}

inline InitialConditions load_initial_conditions(const std::filesystem::path& path)
{
    const std::string context = path.filename().string();
    return initial_from_json(detail::parse_json_text(detail::read_text_file(path), context),
                             context);
}

inline void save_initial_conditions(const InitialConditions& init,
                                    const std::filesystem::path& path)
{
    detail::write_text_file(path, detail::dump_json(initial_to_json(init)));
}

/// Builds the simulation starting state described by an initial-conditions
/// file against a concrete plant.
inline DualState initial_state_from(const PlantIndex& ix, const InitialConditions& init)
{
    return initial_state_from(ix, init.sensor_values, init.actuator_states);
}

// ---------------------------------------------------------------------------
// Dataset column mappings.
// ---------------------------------------------------------------------------

inline nlohmann::json mapping_to_json(const ColumnMapping& mapping)
{
    nlohmann::json j;
    j["format"] = detail::kMappingFormat;
    j["timestamp_column"] = mapping.timestamp_column;
    j["columns"] = mapping.columns;
    return j;
}

inline ColumnMapping mapping_from_json(const nlohmann::json& j, const std::string& context)
{
    detail::check_keys(j, {"format", "timestamp_column", "columns"}, {}, context);
    detail::check_format(j, detail::kMappingFormat, context);

    ColumnMapping mapping;
    mapping.timestamp_column = detail::get_string(j, "timestamp_column", context);
    for (auto& [column, component] : detail::get_string_map(j, "columns", context)) {
        mapping.columns[column] = component;
    }
    if (mapping.timestamp_column.empty()) {
        throw ConfigError(context + ": timestamp_column must be nonempty");
    }
    return mapping;
}

inline ColumnMapping load_mapping(const std::filesystem::path& path)
{
    const std::string context = path.filename().string();
    return mapping_from_json(detail::parse_json_text(detail::read_text_file(path), context),
                             context);
}

inline void save_mapping(const ColumnMapping& mapping, const std::filesystem::path& path)
{
    detail::write_text_file(path, detail::dump_json(mapping_to_json(mapping)));
}

} // namespace icsim
