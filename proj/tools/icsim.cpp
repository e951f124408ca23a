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
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icsim/calibrate.hpp"
#include "icsim/config_io.hpp"
#include "icsim/configs.hpp"
#include "icsim/dataset.hpp"
#include "icsim/experiment.hpp"
#include "icsim/metrics.hpp"
#include "icsim/sim.hpp"
#include "icsim/threat.hpp"
#include "icsim/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

std::string fmt(double value)
{
    return icsim::detail::format_double(value);
}

/// Folds a multi-line diagnostic (e.g. a validation finding list) into the
/// single "error: ..." line the CLI promises.
std::string one_line(const std::string& text)
{
    std::string out;
    bool at_line_start = false;
    for (const char c : text) {
        if (c == '\n') {
            if (!out.empty() && out.back() != ':') {
                out += ';';
            }
            at_line_start = true;
            continue;
        }
        if (at_line_start) {
            if (c == ' ' || c == '\t') {
                continue;
            }
            if (!out.empty()) {
                out += ' ';
            }
            at_line_start = false;
        }
        out += c;
    }
    while (!out.empty() && (out.back() == ' ' || out.back() == ';')) {
        out.pop_back();
    }
    return out;
}

fs::path prepare_out_dir(const std::string& dir)
{
    const fs::path path(dir);
    fs::create_directories(path);
    return path;
}

void wrote(const fs::path& path)
{
    std::cout << "wrote " << path.string() << "\n";
}

double parse_window_bound(const std::string& text, const char* flag)
{
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw icsim::ContractViolation(std::string(flag) + ": \"" + text
                                       + "\" is not a number");
    }
    return value;
}

std::pair<double, double> parse_window(const std::string& text, const char* flag)
{
    const size_t colon = text.find(':');
    if (colon == std::string::npos) {
        throw icsim::ContractViolation(std::string(flag) + ": expected START:END, got \""
                                       + text + "\"");
    }
    return {parse_window_bound(text.substr(0, colon), flag),
            parse_window_bound(text.substr(colon + 1), flag)};
}

// --- slice ------------------------------------------------------------------

struct SliceArgs {
    std::string plant;
    std::string threat;
    std::string out_dir;
};

void run_slice(const SliceArgs& args)
{
    const icsim::PlantModel model = icsim::load_plant(args.plant);
    const icsim::ThreatSpec threat = icsim::load_threat(args.threat);
    const icsim::ModelSlice sl = icsim::slice(model, threat.intent, threat.capability);

    nlohmann::json j;
    j["format"] = "icsim-slice/1";
    j["sensors"] = sl.sensors;
    j["actuators"] = sl.actuators;
    j["control_statements"] = sl.control_statements;

    const fs::path out = prepare_out_dir(args.out_dir);
    icsim::detail::write_text_file(out / "slice.json", icsim::detail::dump_json(j));
    icsim::save_plant(icsim::restrict_model(model, sl), out / "sliced_plant.json");

    std::cout << "slice: " << sl.sensors.size() << " sensors, " << sl.actuators.size()
              << " actuators, " << sl.control_statements.size() << " control statements\n";
    wrote(out / "slice.json");
    wrote(out / "sliced_plant.json");
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::string plant;
    std::string scenario;
    std::string init;
    std::string out_dir;
    double dt = 1.0;
    double horizon = 3600.0;
};

void run_simulate(const SimulateArgs& args)
{
    const icsim::PlantModel model = icsim::load_plant(args.plant);
    const icsim::PlantIndex ix = icsim::PlantIndex::build(model);

    icsim::AttackScenario scenario;
    if (!args.scenario.empty()) {
        scenario = icsim::load_scenario(args.scenario);
    }
    const icsim::DualState initial = args.init.empty()
        ? icsim::default_initial_state(ix)
        : icsim::initial_state_from(ix, icsim::load_initial_conditions(args.init));

    const icsim::SimulationTrace trace =
        icsim::run(ix, initial, scenario, args.dt, args.horizon);

    const fs::path out = prepare_out_dir(args.out_dir);
    icsim::save_trace(ix, trace, out / "trace.csv");
    icsim::save_events(trace.events, out / "events.csv");

    std::cout << "simulated " << trace.samples.size() << " samples (dt " << fmt(args.dt)
              << " s, horizon " << fmt(args.horizon) << " s), " << trace.events.size()
              << " safety events\n";
    wrote(out / "trace.csv");
    wrote(out / "events.csv");
}

// --- validate ---------------------------------------------------------------

struct ValidateArgs {
    std::string plant;
    std::string dataset;
    std::string mapping;
    std::string out_dir;
    double horizon = 0.0;
    bool horizon_given = false;
    double max_lag = 300.0;
};

void run_validate(const ValidateArgs& args)
{
    const icsim::PlantModel model = icsim::load_plant(args.plant);
    const icsim::PlantIndex ix = icsim::PlantIndex::build(model);
    const icsim::ColumnMapping mapping = icsim::load_mapping(args.mapping);
    const icsim::HistoricalDataset dataset = icsim::ingest(args.dataset, mapping);

    for (const std::string& column : dataset.ignored_columns) {
        std::cout << "ignored column: " << column << "\n";
    }

    const double horizon = args.horizon_given
        ? args.horizon
        : dataset.times_s.back() - dataset.times_s.front();

    const fs::path out = prepare_out_dir(args.out_dir);
    const icsim::ComparisonReport report =
        icsim::validate_against(ix, dataset, horizon, args.max_lag, out);
    icsim::save_comparison(report, out / "comparison.json");

    for (const auto& [id, signal] : report.signals) {
        std::cout << id << ": rmse " << fmt(signal.rmse) << ", max |dev| "
                  << fmt(signal.max_abs_deviation) << ", lag " << fmt(signal.lag_s) << " s";
        if (signal.lag_at_search_bound) {
            std::cout << " (lag search hit its bound)";
        }
        std::cout << "\n";
    }
    wrote(out / "comparison.json");
}

// --- metrics ----------------------------------------------------------------

struct MetricsArgs {
    std::string plant;
    std::string normal;
    std::string attacked;
    std::string window;
    std::string out_dir;
};

void run_metrics(const MetricsArgs& args)
{
    const icsim::PlantModel model = icsim::load_plant(args.plant);
    const icsim::PlantIndex ix = icsim::PlantIndex::build(model);
    const icsim::SimulationTrace normal = icsim::load_trace(ix, args.normal);
    const icsim::SimulationTrace attacked = icsim::load_trace(ix, args.attacked);

    double window_start = normal.samples.front().time;
    double window_end = normal.samples.back().time;
    if (!args.window.empty()) {
        std::tie(window_start, window_end) = parse_window(args.window, "--window");
    }

    std::map<std::string, double> ratios;
    std::vector<std::string> notes;
    for (const icsim::Sensor& sensor : model.sensors) {
        const icsim::OperatingCurve base = icsim::operating_curve(ix, normal, sensor.id);
        const icsim::OperatingCurve degraded = icsim::operating_curve(ix, attacked, sensor.id);
        try {
            ratios[sensor.id] = icsim::impact_ratio(base, degraded, window_start, window_end);
        }
        catch (const icsim::DegenerateDenominator&) {
            notes.push_back("metric " + sensor.id
                            + " skipped, normal-operation area is zero");
        }
    }

    nlohmann::json j;
    j["format"] = "icsim-metrics/1";
    j["window_start_s"] = window_start;
    j["window_end_s"] = window_end;
    j["impact_ratios"] = ratios;
    j["notes"] = notes;

    const fs::path out = prepare_out_dir(args.out_dir);
    icsim::detail::write_text_file(out / "metrics.json", icsim::detail::dump_json(j));

    for (const auto& [id, ratio] : ratios) {
        std::cout << id << ": " << fmt(ratio) << "\n";
    }
    for (const std::string& note : notes) {
        std::cout << note << "\n";
    }
    wrote(out / "metrics.json");
}

// --- experiment -------------------------------------------------------------

struct ExperimentArgs {
    std::string plant;
    std::string catalog;
    std::string init;
    std::string config;
    std::string out_dir;
    double dt = 0.0;
    bool dt_given = false;
    double horizon = 0.0;
    bool horizon_given = false;
};

void apply_experiment_config(const std::string& path, icsim::ExperimentSuiteSpec& spec)
{
    const std::string context = fs::path(path).filename().string();
    const nlohmann::json j =
        icsim::detail::parse_json_text(icsim::detail::read_text_file(path), context);
    icsim::detail::check_keys(j, {"format"},
                              {"dt_s", "horizon_s", "normal_horizon_s", "scenario_tanks"},
                              context);
    icsim::detail::check_format(j, "icsim-experiment/1", context);
    if (j.contains("dt_s")) {
        spec.dt_s = icsim::detail::get_double(j, "dt_s", context);
    }
    if (j.contains("horizon_s")) {
        spec.horizon_s = icsim::detail::get_double(j, "horizon_s", context);
    }
    if (j.contains("normal_horizon_s")) {
        spec.normal_horizon_s = icsim::detail::get_double(j, "normal_horizon_s", context);
    }
    if (j.contains("scenario_tanks")) {
        for (const auto& [name, tank] :
             icsim::detail::get_string_map(j, "scenario_tanks", context)) {
            spec.scenario_tanks[name] = tank;
        }
    }
}

void run_experiment(const ExperimentArgs& args)
{
    const icsim::PlantModel model = icsim::load_plant(args.plant);
    const icsim::PlantIndex ix = icsim::PlantIndex::build(model);

    icsim::ExperimentSuiteSpec spec = icsim::default_suite_spec();
    if (!args.init.empty()) {
        spec.initial = icsim::load_initial_conditions(args.init);
    }
    if (!args.config.empty()) {
        apply_experiment_config(args.config, spec);
    }
    if (args.dt_given) {
        spec.dt_s = args.dt;
    }
    if (args.horizon_given) {
        spec.horizon_s = args.horizon;
    }

    const icsim::NamedScenarioCatalog catalog = args.catalog.empty()
        ? icsim::default_catalog()
        : icsim::load_catalog(args.catalog);

    const icsim::ExperimentSuiteReport suite =
        icsim::run_experiment_suite(ix, catalog, spec);

    const fs::path out = prepare_out_dir(args.out_dir);
    icsim::save_suite_report(suite, out / "suite_report.json");
    icsim::save_suite_csvs(suite, out);

    std::cout << "suite: " << suite.entries.size() << " entries across "
              << catalog.entries.size() << " scenarios\n";
    for (const std::string& note : suite.notes) {
        std::cout << "note: " << note << "\n";
    }
    wrote(out / "suite_report.json");
    wrote(out / "impact_ratios.csv");
    wrote(out / "ttcs.csv");
}

// --- catalog ----------------------------------------------------------------

struct CatalogArgs {
    std::string catalog;
    std::string extract;
    std::string out_dir;
};

void run_catalog(const CatalogArgs& args)
{
    const icsim::NamedScenarioCatalog catalog = args.catalog.empty()
        ? icsim::default_catalog()
        : icsim::load_catalog(args.catalog);

    for (const auto& [name, scenario] : catalog.entries) {
        const auto [start, end] = icsim::detail::attack_window(
            scenario, std::numeric_limits<double>::infinity());
        std::cout << name << ": " << scenario.primitives.size()
                  << (scenario.primitives.size() == 1 ? " primitive" : " primitives")
                  << ", window [" << fmt(start) << ", " << fmt(end) << ") s\n";
        for (const icsim::AttackPrimitive& p : scenario.primitives) {
            std::cout << "  " << icsim::detail::attack_kind_label(p.kind) << " " << p.target;
            if (p.kind == icsim::AttackKind::SensorSpoof) {
                std::cout << " = " << fmt(p.spoof_value);
            }
            else {
                std::cout << " := " << p.forced_state;
            }
            std::cout << " over [" << fmt(p.start_s) << ", " << fmt(p.end_s) << ") s\n";
        }
    }

    if (!args.extract.empty()) {
        const auto it = catalog.entries.find(args.extract);
        if (it == catalog.entries.end()) {
            throw icsim::ContractViolation("catalog: no scenario named \"" + args.extract
                                           + "\"");
        }
        const fs::path out = prepare_out_dir(args.out_dir);
        const fs::path path = out / (args.extract + ".json");
        icsim::save_scenario(it->second, path);
        wrote(path);
    }
}

// --- calibrate --------------------------------------------------------------

struct CalibrateArgs {
    std::string plant;
    std::string targets;
    std::string out_dir;
};

std::string fixed_percent(double fraction)
{
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.2f%%", fraction * 100.0);
    return buffer;
}

void run_calibrate(const CalibrateArgs& args)
{
    const icsim::PlantModel base = icsim::load_plant(args.plant);
    const icsim::CalibrationSet targets = icsim::load_calibration(args.targets);
    const icsim::CalibrationReport report = icsim::calibrate(targets);

    const fs::path out = prepare_out_dir(args.out_dir);
    icsim::save_calibration(report.fitted, out / "calibration.json");
    icsim::save_plant(icsim::apply_calibration(base, report.fitted),
                      out / "calibrated_plant.json");

    nlohmann::json j;
    j["format"] = "icsim-residual-report/1";
    j["converged"] = report.converged;
    j["evaluations"] = report.evaluations;
    j["analytic_seed_areas_m2"] = report.analytic_seeds;
    j["residuals"] = nlohmann::json::array();
    for (const icsim::TargetResidual& r : report.residuals) {
        nlohmann::json row;
        row["target"] = r.target;
        row["target_s"] = r.target_s;
        if (r.achieved_s) {
            row["achieved_s"] = *r.achieved_s;
        }
        else {
            row["achieved_s"] = nullptr;
        }
        row["residual_fraction"] = r.residual_fraction;
        row["witness"] = r.witness;
        j["residuals"].push_back(row);
    }
    j["notes"] = report.notes;
    icsim::detail::write_text_file(out / "residual_report.json", icsim::detail::dump_json(j));

    std::cout << (report.converged ? "converged" : "did not converge") << " after "
              << report.evaluations << " evaluations\n";
    for (const icsim::TargetResidual& r : report.residuals) {
        std::cout << r.target << ": target " << fmt(r.target_s) << " s, ";
        if (r.achieved_s) {
            std::cout << "achieved " << fmt(*r.achieved_s) << " s, residual "
                      << fixed_percent(r.residual_fraction);
        }
        else {
            std::cout << "critical state not reached";
        }
        std::cout << " (witness: " << r.witness << ")\n";
    }
    for (const std::string& note : report.notes) {
        std::cout << "note: " << note << "\n";
    }
    wrote(out / "calibration.json");
    wrote(out / "calibrated_plant.json");
    wrote(out / "residual_report.json");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"icsim: deterministic water-treatment plant simulator and "
                 "attack-impact analysis toolkit"};
    app.require_subcommand(1);

    SliceArgs slice_args;
    CLI::App* slice_cmd = app.add_subcommand(
        "slice", "Reduce a plant to the submodel a threat specification can touch");
    slice_cmd->add_option("--plant", slice_args.plant, "Plant configuration file")
        ->required();
    slice_cmd->add_option("--threat", slice_args.threat, "Threat specification file")
        ->required();
    slice_cmd->add_option("--out-dir", slice_args.out_dir, "Output directory")->required();
    slice_cmd->callback([&slice_args] { run_slice(slice_args); });

    SimulateArgs simulate_args;
    CLI::App* simulate_cmd = app.add_subcommand(
        "simulate", "Run one scenario and write the trace and safety-event CSVs");
    simulate_cmd->add_option("--plant", simulate_args.plant, "Plant configuration file")
        ->required();
    simulate_cmd->add_option("--scenario", simulate_args.scenario,
                             "Attack scenario file (omit for normal operation)");
    simulate_cmd->add_option("--init", simulate_args.init,
                             "Initial-conditions file (omit for plant defaults)");
    simulate_cmd->add_option("--dt", simulate_args.dt, "Step size in seconds")
        ->capture_default_str();
    simulate_cmd->add_option("--horizon", simulate_args.horizon, "Run length in seconds")
        ->capture_default_str();
    simulate_cmd->add_option("--out-dir", simulate_args.out_dir, "Output directory")
        ->required();
    simulate_cmd->callback([&simulate_args] { run_simulate(simulate_args); });

    ValidateArgs validate_args;
    CLI::App* validate_cmd = app.add_subcommand(
        "validate", "Compare a normal-operation simulation against recorded plant data");
    validate_cmd->add_option("--plant", validate_args.plant, "Plant configuration file")
        ->required();
    validate_cmd->add_option("--dataset", validate_args.dataset, "Recorded data CSV")
        ->required();
    validate_cmd->add_option("--mapping", validate_args.mapping, "Column-mapping file")
        ->required();
    CLI::Option* horizon_opt = validate_cmd->add_option(
        "--horizon", validate_args.horizon,
        "Comparison horizon in seconds (default: the dataset span)");
    validate_cmd->add_option("--window", validate_args.max_lag,
                             "Lag search bound in seconds")
        ->capture_default_str();
    validate_cmd->add_option("--out-dir", validate_args.out_dir, "Output directory")
        ->required();
    validate_cmd->callback([&validate_args, horizon_opt] {
        validate_args.horizon_given = horizon_opt->count() > 0;
        run_validate(validate_args);
    });

    MetricsArgs metrics_args;
    CLI::App* metrics_cmd = app.add_subcommand(
        "metrics", "Compute impact ratios between a normal and a degraded trace");
    metrics_cmd->add_option("--plant", metrics_args.plant, "Plant configuration file")
        ->required();
    metrics_cmd->add_option("--normal", metrics_args.normal, "Normal-operation trace CSV")
        ->required();
    metrics_cmd->add_option("--attacked", metrics_args.attacked, "Degraded trace CSV")
        ->required();
    metrics_cmd->add_option("--window", metrics_args.window,
                            "Integration window START:END in seconds "
                            "(default: the whole trace)");
    metrics_cmd->add_option("--out-dir", metrics_args.out_dir, "Output directory")
        ->required();
    metrics_cmd->callback([&metrics_args] { run_metrics(metrics_args); });

    ExperimentArgs experiment_args;
    CLI::App* experiment_cmd = app.add_subcommand(
        "experiment", "Run the scenario catalog from both vulnerable operating points");
    experiment_cmd->add_option("--plant", experiment_args.plant, "Plant configuration file")
        ->required();
    experiment_cmd->add_option("--catalog", experiment_args.catalog,
                               "Scenario catalog file (default: the built-in catalog)");
    experiment_cmd->add_option("--init", experiment_args.init,
                               "Initial-conditions file for the discovery run");
    experiment_cmd->add_option("--config", experiment_args.config,
                               "Experiment configuration overrides file");
    CLI::Option* dt_opt =
        experiment_cmd->add_option("--dt", experiment_args.dt, "Step size in seconds");
    CLI::Option* exp_horizon_opt = experiment_cmd->add_option(
        "--horizon", experiment_args.horizon, "Replay length in seconds");
    experiment_cmd->add_option("--out-dir", experiment_args.out_dir, "Output directory")
        ->required();
    experiment_cmd->callback([&experiment_args, dt_opt, exp_horizon_opt] {
        experiment_args.dt_given = dt_opt->count() > 0;
        experiment_args.horizon_given = exp_horizon_opt->count() > 0;
        run_experiment(experiment_args);
    });

    CatalogArgs catalog_args;
    CLI::App* catalog_cmd =
        app.add_subcommand("catalog", "List the named attack scenarios");
    catalog_cmd->add_option("--catalog", catalog_args.catalog,
                            "Scenario catalog file (default: the built-in catalog)");
    CLI::Option* extract_opt = catalog_cmd->add_option(
        "--extract", catalog_args.extract, "Write one named scenario to its own file");
    catalog_cmd->add_option("--out-dir", catalog_args.out_dir,
                            "Output directory (required with --extract)")
        ->needs(extract_opt);
    extract_opt->needs(catalog_cmd->get_option("--out-dir"));
    catalog_cmd->callback([&catalog_args] { run_catalog(catalog_args); });

    CalibrateArgs calibrate_args;
    CLI::App* calibrate_cmd = app.add_subcommand(
        "calibrate", "Fit tank geometry to worst-case time-to-critical-state targets");
    calibrate_cmd->add_option("--plant", calibrate_args.plant,
                              "Plant configuration file the fit is applied to")
        ->required();
    calibrate_cmd->add_option("--targets", calibrate_args.targets,
                              "Calibration targets file")
        ->required();
    calibrate_cmd->add_option("--out-dir", calibrate_args.out_dir, "Output directory")
        ->required();
    calibrate_cmd->callback([&calibrate_args] { run_calibrate(calibrate_args); });

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << one_line(e.what()) << "\n";
        return 1;
    }
    return 0;
}
