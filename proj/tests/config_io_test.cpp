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
#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <string>

#include "icsim/config_io.hpp"
#include "icsim/configs.hpp"
#include "icsim/trace_io.hpp"

namespace {

namespace fs = std::filesystem;

using icsim::AttackScenario;
using icsim::CalibrationSet;
using icsim::ColumnMapping;
using icsim::ConfigError;
using icsim::InitialConditions;
using icsim::NamedScenarioCatalog;
using icsim::PlantIndex;
using icsim::PlantModel;
using icsim::SimulationTrace;
using icsim::ThreatSpec;

fs::path temp_file(const std::string& name)
{
    return fs::path(testing::TempDir()) / name;
}

fs::path data_file(const std::string& name)
{
    return fs::path(ICSIM_DATA_DIR) / name;
}

/// The calibration-targets input shipped with the repo: design rates and
/// quantitative targets, no geometry (the calibrator derives its own seeds).
CalibrationSet targets_only_calibration()
{
    CalibrationSet c;
    c.design_flow_rates_m3ph = icsim::default_swat_calibration().design_flow_rates_m3ph;
    icsim::set_default_targets(c);
    return c;
}

ThreatSpec example_threat()
{
    ThreatSpec t;
    t.intent.metric_sensors = {"FIT-502"};
    t.capability.actuators = {"P-501"};
    return t;
}

InitialConditions swat_initial_conditions()
{
    InitialConditions init;
    init.sensor_values = icsim::swat_initial_sensor_values();
    init.actuator_states = icsim::swat_initial_actuator_states();
    return init;
}

TEST(PlantIo, RoundTripPreservesEveryField)
{
    for (const PlantModel& model : {icsim::toy_plant(), icsim::swat_plant(),
                                    icsim::swat_plant(icsim::precalibration_swat_calibration())}) {
        const fs::path path = temp_file("plant_roundtrip.json");
        icsim::save_plant(model, path);
        EXPECT_EQ(icsim::load_plant(path), model) << model.name;
    }
}

TEST(PlantIo, SavingTwiceIsByteIdentical)
{
    const fs::path a = temp_file("plant_a.json");
    const fs::path b = temp_file("plant_b.json");
    icsim::save_plant(icsim::swat_plant(), a);
    icsim::save_plant(icsim::swat_plant(), b);
    EXPECT_EQ(icsim::detail::read_text_file(a), icsim::detail::read_text_file(b));
}

TEST(PlantIo, MalformedInputsAreConfigErrors)
{
    const fs::path path = temp_file("plant_bad.json");

    icsim::detail::write_text_file(path, "not json at all");
    EXPECT_THROW(icsim::load_plant(path), ConfigError);

    icsim::detail::write_text_file(path, "{\"format\": \"icsim-plant/999\"}");
    EXPECT_THROW(icsim::load_plant(path), ConfigError);

    // Unknown key.
    nlohmann::json j = icsim::plant_to_json(icsim::toy_plant());
    j["surprise"] = 1;
    icsim::detail::write_text_file(path, icsim::detail::dump_json(j));
    EXPECT_THROW(icsim::load_plant(path), ConfigError);

    // Missing section.
    j = icsim::plant_to_json(icsim::toy_plant());
    j.erase("sensors");
    icsim::detail::write_text_file(path, icsim::detail::dump_json(j));
    EXPECT_THROW(icsim::load_plant(path), ConfigError);

    // Wrong value type.
    j = icsim::plant_to_json(icsim::toy_plant());
    j["tanks"][0]["cross_section_area_m2"] = "wide";
    icsim::detail::write_text_file(path, icsim::detail::dump_json(j));
    EXPECT_THROW(icsim::load_plant(path), ConfigError);

    // Bad comparator label.
    j = icsim::plant_to_json(icsim::toy_plant());
    j["control_statements"][0]["condition"][0]["comparator"] = "==";
    icsim::detail::write_text_file(path, icsim::detail::dump_json(j));
    EXPECT_THROW(icsim::load_plant(path), ConfigError);

    EXPECT_THROW(icsim::load_plant(temp_file("no_such_file.json")), ConfigError);
}

TEST(PlantIo, StructurallyValidButInconsistentPlantIsRejectedWithFindings)
{
    PlantModel broken = icsim::toy_plant();
    broken.sensors[0].attachment = "T-404"; // level sensor on a tank that does not exist
    const fs::path path = temp_file("plant_invalid.json");
    icsim::save_plant(broken, path);
    try {
        icsim::load_plant(path);
        FAIL() << "expected ConfigError";
    }
    catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("T-404"), std::string::npos) << e.what();
    }
}

TEST(ScenarioIo, RoundTripAndCatalogRoundTrip)
{
    const NamedScenarioCatalog& catalog = icsim::default_catalog();
    for (const auto& [name, scenario] : catalog.entries) {
        const fs::path path = temp_file("scenario_roundtrip.json");
        icsim::save_scenario(scenario, path);
        EXPECT_EQ(icsim::load_scenario(path), scenario) << name;
    }

    const fs::path path = temp_file("catalog_roundtrip.json");
    icsim::save_catalog(catalog, path);
    const NamedScenarioCatalog loaded = icsim::load_catalog(path);
    ASSERT_EQ(loaded.entries.size(), catalog.entries.size());
    for (const auto& [name, scenario] : catalog.entries) {
        ASSERT_TRUE(loaded.entries.count(name)) << name;
        EXPECT_EQ(loaded.entries.at(name), scenario) << name;
    }
}

TEST(ScenarioIo, RejectsUnknownKindsAndDuplicateNames)
{
    const fs::path path = temp_file("scenario_bad.json");

    nlohmann::json j =
        icsim::scenario_to_json(icsim::default_catalog().entries.at("attack7"));
    j["primitives"][0]["kind"] = "replay";
    icsim::detail::write_text_file(path, icsim::detail::dump_json(j));
    EXPECT_THROW(icsim::load_scenario(path), ConfigError);

    // A sensor spoof must carry "value", not "state".
    j = icsim::scenario_to_json(icsim::default_catalog().entries.at("attack7"));
    j["primitives"][0].erase("value");
    j["primitives"][0]["state"] = "on";
    icsim::detail::write_text_file(path, icsim::detail::dump_json(j));
    EXPECT_THROW(icsim::load_scenario(path), ConfigError);

    nlohmann::json jc = icsim::catalog_to_json(icsim::default_catalog());
    jc["entries"].push_back(jc["entries"][0]);
    icsim::detail::write_text_file(path, icsim::detail::dump_json(jc));
    EXPECT_THROW(icsim::load_catalog(path), ConfigError);
}

TEST(ThreatIo, RoundTripAndSectionChecks)
{
    const ThreatSpec threat = example_threat();
    const fs::path path = temp_file("threat_roundtrip.json");
    icsim::save_threat(threat, path);
    EXPECT_EQ(icsim::load_threat(path), threat);

    // Capability halves are optional independently; intent is not.
    nlohmann::json j = icsim::threat_to_json(threat);
    j["capability"].erase("sensors");
    icsim::detail::write_text_file(path, icsim::detail::dump_json(j));
    EXPECT_EQ(icsim::load_threat(path), threat);

    j = icsim::threat_to_json(threat);
    j.erase("intent");
    icsim::detail::write_text_file(path, icsim::detail::dump_json(j));
    EXPECT_THROW(icsim::load_threat(path), ConfigError);
}

TEST(CalibrationIo, RoundTripFittedAndTargetsOnly)
{
    for (const CalibrationSet& c :
         {icsim::default_swat_calibration(), icsim::precalibration_swat_calibration(),
          targets_only_calibration()}) {
        const fs::path path = temp_file("calibration_roundtrip.json");
        icsim::save_calibration(c, path);
        EXPECT_EQ(icsim::load_calibration(path), c);
    }
}

TEST(InitialConditionsIo, RoundTripAndStateConstruction)
{
    const InitialConditions init = swat_initial_conditions();
    const fs::path path = temp_file("init_roundtrip.json");
    icsim::save_initial_conditions(init, path);
    EXPECT_EQ(icsim::load_initial_conditions(path), init);

    const PlantModel model = icsim::swat_plant();
    const PlantIndex ix = PlantIndex::build(model);
    EXPECT_EQ(icsim::initial_state_from(ix, icsim::load_initial_conditions(path)),
              icsim::initial_state_from(ix, init.sensor_values, init.actuator_states));
}

TEST(MappingIo, RoundTripAndValidation)
{
    ColumnMapping mapping;
    mapping.timestamp_column = "t";
    mapping.columns = {{"LIT101", "LIT-101"}, {"FIT101", "FIT-101"}, {"MV101", "MV-101"}};
    const fs::path path = temp_file("mapping_roundtrip.json");
    icsim::save_mapping(mapping, path);
    EXPECT_EQ(icsim::load_mapping(path), mapping);

    nlohmann::json j = icsim::mapping_to_json(mapping);
    j["timestamp_column"] = "";
    icsim::detail::write_text_file(path, icsim::detail::dump_json(j));
    EXPECT_THROW(icsim::load_mapping(path), ConfigError);
}

// ---------------------------------------------------------------------------
// Shipped data files: each must load to exactly what the in-code builder
// produces, and the builder must serialize to the exact shipped bytes, so
// code and data cannot drift apart silently.
// ---------------------------------------------------------------------------

TEST(ShippedData, PlantsMatchBuilders)
{
    const std::map<std::string, PlantModel> expected = {
        {"toy_plant.json", icsim::toy_plant()},
        {"swat_plant.json", icsim::swat_plant()},
        {"swat_plant_precalibration.json",
         icsim::swat_plant(icsim::precalibration_swat_calibration())},
    };
    for (const auto& [name, model] : expected) {
        EXPECT_EQ(icsim::load_plant(data_file(name)), model) << name;
        EXPECT_EQ(icsim::detail::read_text_file(data_file(name)),
                  icsim::detail::dump_json(icsim::plant_to_json(model)))
            << name;
    }
}

TEST(ShippedData, CatalogMatchesBuilder)
{
    const NamedScenarioCatalog loaded = icsim::load_catalog(data_file("swat_catalog.json"));
    EXPECT_EQ(loaded.entries, icsim::default_catalog().entries);
    EXPECT_EQ(icsim::detail::read_text_file(data_file("swat_catalog.json")),
              icsim::detail::dump_json(icsim::catalog_to_json(icsim::default_catalog())));
}

TEST(ShippedData, TargetsThreatInitAndMappingMatchBuilders)
{
    EXPECT_EQ(icsim::load_calibration(data_file("calibration_targets.json")),
              targets_only_calibration());
    EXPECT_EQ(icsim::load_threat(data_file("threat_example.json")), example_threat());
    EXPECT_EQ(icsim::load_initial_conditions(data_file("swat_init.json")),
              swat_initial_conditions());

    InitialConditions toy_init;
    toy_init.sensor_values = icsim::toy_initial_sensor_values();
    toy_init.actuator_states = icsim::toy_initial_actuator_states();
    EXPECT_EQ(icsim::load_initial_conditions(data_file("toy_init.json")), toy_init);

    const ColumnMapping mapping = icsim::load_mapping(data_file("example_mapping.json"));
    EXPECT_EQ(mapping.timestamp_column, "Timestamp");
    for (const auto& [column, component] : mapping.columns) {
        EXPECT_EQ(component.size(), column.size() + 1) << column; // "LIT101" -> "LIT-101"
    }
}

// ---------------------------------------------------------------------------
// Trace CSV.
// ---------------------------------------------------------------------------

TEST(TraceIo, RoundTripIsExact)
{
    const PlantModel model = icsim::toy_plant();
    const PlantIndex ix = PlantIndex::build(model);
    const AttackScenario attack{"poke", {icsim::sensor_spoof("L1", 900.0, 20.0, 60.0)}};
    const SimulationTrace trace =
        icsim::run(ix, icsim::default_initial_state(ix), attack, 1.0, 120.0);

    const fs::path path = temp_file("trace_roundtrip.csv");
    icsim::save_trace(ix, trace, path);
    const SimulationTrace loaded = icsim::load_trace(ix, path);

    ASSERT_EQ(loaded.samples.size(), trace.samples.size());
    EXPECT_EQ(loaded.dt, trace.dt);
    for (size_t i = 0; i < trace.samples.size(); ++i) {
        EXPECT_EQ(loaded.samples[i].time, trace.samples[i].time);
        EXPECT_EQ(loaded.samples[i].physical_sensors, trace.samples[i].physical_sensors);
        EXPECT_EQ(loaded.samples[i].cyber_sensors, trace.samples[i].cyber_sensors);
        EXPECT_EQ(loaded.samples[i].actuator_states, trace.samples[i].actuator_states);
        EXPECT_EQ(loaded.samples[i].tank_levels, trace.samples[i].tank_levels);
    }
}

TEST(TraceIo, HeaderNamesEveryRealmAndActuator)
{
    const std::string header = icsim::trace_csv_header(icsim::toy_plant());
    EXPECT_EQ(header, "time,L1,F1,F2,L1.cyber,F1.cyber,F2.cyber,Pump_in,Pump_out");
}

TEST(TraceIo, MismatchedHeaderIsRejected)
{
    const PlantModel toy = icsim::toy_plant();
    const PlantIndex toy_ix = PlantIndex::build(toy);
    const SimulationTrace trace =
        icsim::run(toy_ix, icsim::default_initial_state(toy_ix), {}, 1.0, 10.0);
    const fs::path path = temp_file("trace_header.csv");
    icsim::save_trace(toy_ix, trace, path);

    const PlantModel swat = icsim::swat_plant();
    const PlantIndex swat_ix = PlantIndex::build(swat);
    EXPECT_THROW(icsim::load_trace(swat_ix, path), ConfigError);

    icsim::detail::write_text_file(path, "");
    EXPECT_THROW(icsim::load_trace(toy_ix, path), ConfigError);
}

TEST(TraceIo, EventsRoundTrip)
{
    const PlantModel model = icsim::toy_plant();
    const PlantIndex ix = PlantIndex::build(model);
    // Overfill the toy tank so the event stream is nonempty.
    const AttackScenario attack{"overfill", {icsim::sensor_spoof("L1", 100.0, 0.0, 3000.0)}};
    const SimulationTrace trace =
        icsim::run(ix, icsim::default_initial_state(ix), attack, 1.0, 3000.0);
    ASSERT_FALSE(trace.events.empty());

    const fs::path path = temp_file("events_roundtrip.csv");
    icsim::save_events(trace.events, path);
    EXPECT_EQ(icsim::load_events(path), trace.events);

    icsim::detail::write_text_file(path, "time,kind,component\n12,eruption,T1\n");
    EXPECT_THROW(icsim::load_events(path), ConfigError);
}

TEST(TraceIo, IdenticalRunsSerializeToIdenticalBytes)
{
    const PlantModel model = icsim::swat_plant();
    const PlantIndex ix = PlantIndex::build(model);
    const icsim::DualState initial = icsim::initial_state_from(
        ix, icsim::swat_initial_sensor_values(), icsim::swat_initial_actuator_states());
    const AttackScenario& attack = icsim::default_catalog().entries.at("attack7");

    const std::string a = icsim::trace_to_csv(ix, icsim::run(ix, initial, attack, 1.0, 1500.0));
    const std::string b = icsim::trace_to_csv(ix, icsim::run(ix, initial, attack, 1.0, 1500.0));
    EXPECT_EQ(a, b);
}

} // namespace
