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

#include <map>
#include <string>

#include "icsim/plant.hpp"
#include "icsim/sim.hpp"

namespace icsim {

// ---------------------------------------------------------------------------
// Single-tank demonstration plant: one tank T1 with inflow pump Pump_in and
// outflow pump Pump_out, level sensor L1, flow sensors F1/F2, and two
// band-control statements (high level: stop inflow, start outflow; low
// level: start inflow, stop outflow).
// ---------------------------------------------------------------------------

inline PlantModel toy_plant()
{
    PlantModel m;
    m.name = "single-tank";
    m.tanks.push_back({"T1", 0.5, 1000.0, 900.0, 50.0, 500.0});
    m.flow_elements.push_back({"Pump_in", FlowElementKind::Pump, 1.14});
    m.flow_elements.push_back({"Pump_out", FlowElementKind::Pump, 1.14});
    m.sensors.push_back({"L1", SensorKind::Level, "T1"});
    m.sensors.push_back({"F1", SensorKind::Flow, "inflow"});
    m.sensors.push_back({"F2", SensorKind::Flow, "outflow"});
    m.flow_paths.push_back({"inflow", kExternal, "T1", {"Pump_in"}, 1.0});
    m.flow_paths.push_back({"outflow", "T1", kExternal, {"Pump_out"}, 1.0});
    m.control_statements.push_back(
        {"drain-when-high",
         {{"L1", Comparator::GreaterEqual, 800.0}},
         {{"Pump_in", "off"}, {"Pump_out", "on"}}});
    m.control_statements.push_back(
        {"fill-when-low",
         {{"L1", Comparator::LessEqual, 200.0}},
         {{"Pump_in", "on"}, {"Pump_out", "off"}}});
    m.thresholds = {{"L1.low", 200.0}, {"L1.high", 800.0}};
    return m;
}

inline std::map<ComponentId, double> toy_initial_sensor_values()
{
    return {{"L1", 500.0}};
}

inline std::map<ComponentId, std::string> toy_initial_actuator_states()
{
    return {{"Pump_in", "on"}, {"Pump_out", "off"}};
}

// ---------------------------------------------------------------------------
// Five-stage water-treatment plant.
//
// Stages: P1 raw-water intake (T-101), P2 chemical dosing (tankless
// pass-through), P3 ultrafiltration feed (T-301), P4 RO feed (T-401),
// P5 reverse osmosis (tankless; permeate throughput FIT-502).
//
// Geometry (tank areas, overflow levels) and the RO recovery fraction are
// calibration data, not constants: the construction takes a CalibrationSet
// so fitted and pre-fit variants share one topology.
// ---------------------------------------------------------------------------

/// Free parameters of the plant geometry plus the quantitative targets the
/// calibrator fits them against.
struct CalibrationSet {
    // Free parameters.
    std::map<ComponentId, double> areas_m2;            // per tank
    std::map<ComponentId, double> overflow_levels_mm;  // per tank
    std::map<ComponentId, double> underflow_levels_mm; // per tank
    double ro_yield_fraction = 1.0;
    // Fixed design inputs (not searched by the calibrator, but carried here
    // so one structure fully determines the plant).
    std::map<ComponentId, double> design_flow_rates_m3ph; // per flow element
    // Targets.
    std::map<std::string, double> ttcs_targets_s; // "P1.high", "P1.low", ... -> seconds
    std::map<ComponentId, double> flow_magnitude_targets_m3ph; // e.g. FIT-502 -> 1.14

    bool operator==(const CalibrationSet&) const = default;
};

/// Table-style worst-case time-to-critical-state targets and the measured
/// plant throughput, shared by both calibration variants.
inline void set_default_targets(CalibrationSet& c)
{
    c.ttcs_targets_s = {
        {"P1.high", 838.8}, {"P1.low", 1101.4}, {"P3.high", 448.1},
        {"P3.low", 1939.8}, {"P4.high", 493.3}, {"P4.low", 2523.2},
    };
    c.flow_magnitude_targets_m3ph = {{"FIT-502", 1.14}};
}

/// Which tank realizes each process's vulnerable states.
inline const std::map<std::string, ComponentId>& process_tanks()
{
    static const std::map<std::string, ComponentId> m = {
        {"P1", "T-101"}, {"P3", "T-301"}, {"P4", "T-401"}};
    return m;
}

/// Naive pre-fit parameter set: every stage runs at the plant's published
/// throughput of 1.14 m^3/hr, the RO split is ignored, and tank areas come
/// from the closed-form drain inversion A = Q * (T_low / 3600) / h_drain
/// (uniform-rate assumption; these are also the analytic seeds the
/// calibrator reports).
inline CalibrationSet precalibration_swat_calibration()
{
    CalibrationSet c;
    c.areas_m2 = {
        {"T-101", 1.14 * (1101.4 / 3600.0) / 0.5},
        {"T-301", 1.14 * (1939.8 / 3600.0) / 0.8},
        {"T-401", 1.14 * (2523.2 / 3600.0) / 0.8},
    };
    c.overflow_levels_mm = {{"T-101", 1100.0}, {"T-301", 1250.0}, {"T-401", 1100.0}};
    c.underflow_levels_mm = {{"T-101", 0.0}, {"T-301", 0.0}, {"T-401", 0.0}};
    c.ro_yield_fraction = 1.0;
    c.design_flow_rates_m3ph = {
        {"MV-101", 1.14}, {"P-101", 1.14}, {"MV-201", 1.14},
        {"P-301", 1.14}, {"P-401", 1.14}, {"P-501", 1.14},
    };
    set_default_targets(c);
    return c;
}

/// Shipped calibration: stage rates follow a decreasing chain so tanks
/// actually cycle between their control bands (a plant with uniform rates
/// reaches flow equilibrium and never oscillates), the RO fraction matches
/// the measured 1.14 m^3/hr permeate against the 1.7 m^3/hr feed, and the
/// geometry values were produced by calibrate() against the TTCS targets.
inline CalibrationSet default_swat_calibration()
{
    CalibrationSet c;
    c.areas_m2 = {
        {"T-101", 1.4682509920247395},
        {"T-301", 1.3617118164062498},
        {"T-401", 1.4896156168619785},
    };
    c.overflow_levels_mm = {
        {"T-101", 1196.8230760097504},
        {"T-301", 1219.375},
        {"T-401", 1183.7255859375},
    };
    c.underflow_levels_mm = {{"T-101", 0.0}, {"T-301", 0.0}, {"T-401", 0.0}};
    c.ro_yield_fraction = 1.14 / 1.7;
    c.design_flow_rates_m3ph = {
        {"MV-101", 2.5}, {"P-101", 2.45}, {"MV-201", 2.4},
        {"P-301", 2.0}, {"P-401", 1.7}, {"P-501", 1.7},
    };
    set_default_targets(c);
    return c;
}

inline PlantModel swat_plant(const CalibrationSet& calibration)
{
    const char* required_tanks[] = {"T-101", "T-301", "T-401"};
    const char* required_elements[] = {"MV-101", "P-101", "MV-201", "P-301", "P-401", "P-501"};
    std::vector<std::string> gaps;
    for (const char* id : required_tanks) {
        if (!calibration.areas_m2.count(id)) gaps.push_back(std::string("areas_m2.") + id);
        if (!calibration.overflow_levels_mm.count(id))
            gaps.push_back(std::string("overflow_levels_mm.") + id);
        if (!calibration.underflow_levels_mm.count(id))
            gaps.push_back(std::string("underflow_levels_mm.") + id);
    }
    for (const char* id : required_elements) {
        if (!calibration.design_flow_rates_m3ph.count(id))
            gaps.push_back(std::string("design_flow_rates_m3ph.") + id);
    }
    if (!(calibration.ro_yield_fraction > 0.0 && calibration.ro_yield_fraction <= 1.0)) {
        gaps.push_back("ro_yield_fraction (must be in (0, 1])");
    }
    if (!gaps.empty()) {
        std::string msg = "swat_plant: incomplete calibration, missing:";
        for (const std::string& g : gaps) {
            msg += " " + g;
        }
        throw ContractViolation(msg);
    }

    const auto& rate = calibration.design_flow_rates_m3ph;
    auto tank = [&](const char* id, double initial) {
        const double overflow = calibration.overflow_levels_mm.at(id);
        const double underflow = calibration.underflow_levels_mm.at(id);
        // Keep headroom above the overflow threshold so overflowing runs can
        // be observed before the hard clamp.
        const double height = std::max(1500.0, overflow + 100.0);
        return Tank{id, calibration.areas_m2.at(id), height, overflow, underflow, initial};
    };

    PlantModel m;
    m.name = "swat-5-stage";
    m.tanks.push_back(tank("T-101", 500.0));
    m.tanks.push_back(tank("T-301", 800.0));
    m.tanks.push_back(tank("T-401", 800.0));

    m.flow_elements.push_back({"MV-101", FlowElementKind::Valve, rate.at("MV-101")});
    m.flow_elements.push_back({"P-101", FlowElementKind::Pump, rate.at("P-101")});
    m.flow_elements.push_back({"MV-201", FlowElementKind::Valve, rate.at("MV-201")});
    m.flow_elements.push_back({"P-301", FlowElementKind::Pump, rate.at("P-301")});
    m.flow_elements.push_back({"P-401", FlowElementKind::Pump, rate.at("P-401")});
    m.flow_elements.push_back({"P-501", FlowElementKind::Pump, rate.at("P-501")});

    m.sensors.push_back({"LIT-101", SensorKind::Level, "T-101"});
    m.sensors.push_back({"LIT-301", SensorKind::Level, "T-301"});
    m.sensors.push_back({"LIT-401", SensorKind::Level, "T-401"});
    m.sensors.push_back({"FIT-101", SensorKind::Flow, "raw-inflow"});
    m.sensors.push_back({"FIT-201", SensorKind::Flow, "dosing-transfer"});
    m.sensors.push_back({"FIT-301", SensorKind::Flow, "uf-transfer"});
    m.sensors.push_back({"FIT-401", SensorKind::Flow, "ro-feed"});
    m.sensors.push_back({"FIT-501", SensorKind::Flow, "ro-feed"});
    m.sensors.push_back({"FIT-502", SensorKind::Flow, "ro-permeate"});

    m.flow_paths.push_back({"raw-inflow", kExternal, "T-101", {"MV-101"}, 1.0});
    m.flow_paths.push_back({"dosing-transfer", "T-101", "T-301", {"P-101", "MV-201"}, 1.0});
    m.flow_paths.push_back({"uf-transfer", "T-301", "T-401", {"P-301"}, 1.0});
    m.flow_paths.push_back({"ro-feed", "T-401", kExternal, {"P-401"}, 1.0});
    // The RO unit sits past the plant's last tank: its feed is P-401's
    // discharge, so topologically it runs boundary-to-boundary and the
    // permeate is the delivered fraction of the feed.
    m.flow_paths.push_back(
        {"ro-permeate", kExternal, kExternal, {"P-501"}, calibration.ro_yield_fraction});

    m.control_statements.push_back({"mv101-open-low",
                                    {{"LIT-101", Comparator::LessEqual, 500.0}},
                                    {{"MV-101", "open"}}});
    m.control_statements.push_back({"mv101-close-high",
                                    {{"LIT-101", Comparator::GreaterEqual, 800.0}},
                                    {{"MV-101", "closed"}}});
    m.control_statements.push_back({"p1-start",
                                    {{"LIT-301", Comparator::LessEqual, 800.0},
                                     {"LIT-101", Comparator::GreaterEqual, 300.0}},
                                    {{"P-101", "on"}, {"MV-201", "open"}}});
    m.control_statements.push_back({"p1-stop-high",
                                    {{"LIT-301", Comparator::GreaterEqual, 1000.0}},
                                    {{"P-101", "off"}, {"MV-201", "closed"}}});
    m.control_statements.push_back({"p1-stop-highhigh",
                                    {{"LIT-301", Comparator::GreaterEqual, 1200.0}},
                                    {{"P-101", "off"}, {"MV-201", "closed"}}});
    m.control_statements.push_back({"p1-stop-lowlow",
                                    {{"LIT-101", Comparator::LessEqual, 250.0}},
                                    {{"P-101", "off"}, {"MV-201", "closed"}}});
    m.control_statements.push_back({"p3-start",
                                    {{"LIT-401", Comparator::LessEqual, 800.0},
                                     {"LIT-301", Comparator::GreaterEqual, 300.0}},
                                    {{"P-301", "on"}}});
    m.control_statements.push_back({"p3-stop-high",
                                    {{"LIT-401", Comparator::GreaterEqual, 1000.0}},
                                    {{"P-301", "off"}}});
    m.control_statements.push_back({"p3-stop-lowlow",
                                    {{"LIT-301", Comparator::LessEqual, 250.0}},
                                    {{"P-301", "off"}}});
    m.control_statements.push_back({"p5-run",
                                    {{"LIT-401", Comparator::GreaterEqual, 300.0}},
                                    {{"P-401", "on"}, {"P-501", "on"}}});
    m.control_statements.push_back({"p5-stop-lowlow",
                                    {{"LIT-401", Comparator::LessEqual, 250.0}},
                                    {{"P-401", "off"}, {"P-501", "off"}}});

    m.thresholds = {
        {"LIT-101.LL", 250.0}, {"LIT-101.LL-clear", 300.0},
        {"LIT-101.L", 500.0},  {"LIT-101.H", 800.0},
        {"LIT-301.LL", 250.0}, {"LIT-301.LL-clear", 300.0},
        {"LIT-301.L", 800.0},  {"LIT-301.H", 1000.0}, {"LIT-301.HH", 1200.0},
        {"LIT-401.LL", 250.0}, {"LIT-401.LL-clear", 300.0},
        {"LIT-401.L", 800.0},  {"LIT-401.H", 1000.0},
    };
    return m;
}

inline PlantModel swat_plant()
{
    return swat_plant(default_swat_calibration());
}

/// Writes a calibration's free parameters and design rates onto an existing
/// plant: tank geometry and element rates match by component id, and the
/// product yield lands on the "ro-permeate" path when the plant has one.
/// Components the calibration does not mention keep their values.
inline PlantModel apply_calibration(PlantModel model, const CalibrationSet& calibration)
{
    for (Tank& tank : model.tanks) {
        if (auto it = calibration.areas_m2.find(tank.id); it != calibration.areas_m2.end()) {
            tank.cross_section_area_m2 = it->second;
        }
        if (auto it = calibration.overflow_levels_mm.find(tank.id);
            it != calibration.overflow_levels_mm.end()) {
            tank.overflow_level_mm = it->second;
        }
        if (auto it = calibration.underflow_levels_mm.find(tank.id);
            it != calibration.underflow_levels_mm.end()) {
            tank.underflow_level_mm = it->second;
        }
    }
    for (FlowElement& element : model.flow_elements) {
        if (auto it = calibration.design_flow_rates_m3ph.find(element.id);
            it != calibration.design_flow_rates_m3ph.end()) {
            element.design_flow_rate_m3ph = it->second;
        }
    }
    for (FlowPath& path : model.flow_paths) {
        if (path.id == "ro-permeate") {
            path.yield_fraction = calibration.ro_yield_fraction;
        }
    }
    return model;
}

inline std::map<ComponentId, double> swat_initial_sensor_values()
{
    return {{"LIT-101", 500.0}, {"LIT-301", 800.0}, {"LIT-401", 800.0}};
}

inline std::map<ComponentId, std::string> swat_initial_actuator_states()
{
    return {{"MV-101", "open"}, {"P-101", "on"},  {"MV-201", "open"},
            {"P-301", "on"},    {"P-401", "on"},  {"P-501", "on"}};
}

// ---------------------------------------------------------------------------
// Named attack catalog.
// ---------------------------------------------------------------------------

struct NamedScenarioCatalog {
    std::map<std::string, AttackScenario> entries;
};

inline NamedScenarioCatalog make_default_catalog()
{
    NamedScenarioCatalog cat;
    auto add = [&cat](AttackScenario s) { cat.entries[s.name] = std::move(s); };

    // Historical replications: a single-stage single-point sensor spoof and a
    // multi-stage multi-point sensor+command spoof.
    add({"attack7", {sensor_spoof("LIT-301", 1200.0, 500.0, 1000.0)}});
    add({"attack30",
         {sensor_spoof("LIT-101", 700.0, 300.0, 900.0),
          command_spoof("MV-101", "closed", 300.0, 900.0),
          command_spoof("P-101", "on", 300.0, 900.0),
          command_spoof("MV-201", "open", 300.0, 900.0)}});

    // Experiment 1: stop all water inflow, by direct command or by the
    // equivalent high-level spoof.
    add({"e1-close-mv101-cmd", {command_spoof("MV-101", "closed", 0.0, 7200.0)}});
    add({"e1-spoof-lit101-high", {sensor_spoof("LIT-101", 800.0, 0.0, 7200.0)}});

    // Experiment 2a: disrupt stage-1 pumping.
    add({"e2a-p1-cmd", {command_spoof("P-101", "off", 0.0, 7200.0)}});
    add({"e2a-spoof-lit101-lowlow", {sensor_spoof("LIT-101", 250.0, 0.0, 7200.0)}});
    add({"e2a-spoof-lit301-high", {sensor_spoof("LIT-301", 1000.0, 0.0, 7200.0)}});

    // Experiment 2b: disrupt stage-3 pumping.
    add({"e2b-p3-cmd", {command_spoof("P-301", "off", 0.0, 7200.0)}});
    add({"e2b-spoof-lit301-lowlow", {sensor_spoof("LIT-301", 250.0, 0.0, 7200.0)}});
    add({"e2b-spoof-lit401-high", {sensor_spoof("LIT-401", 1000.0, 0.0, 7200.0)}});
    return cat;
}

/// The shared catalog instance (stable storage: safe to hold references to
/// its entries).
inline const NamedScenarioCatalog& default_catalog()
{
    static const NamedScenarioCatalog cat = make_default_catalog();
    return cat;
}

} // namespace icsim
