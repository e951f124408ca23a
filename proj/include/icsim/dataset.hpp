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
#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icsim/config_io.hpp"
#include "icsim/sim.hpp"
#include "icsim/trace_io.hpp"

// ---------------------------------------------------------------------------
// Historical plant data: ingesting logged CSVs and checking the simulator
// against them.
//
// A dataset CSV has one timestamp column plus one column per logged point.
// The caller supplies a ColumnMapping naming the timestamp column and tying
// data columns to model components ("LIT101" -> "LIT-101"); columns the
// mapping does not mention are ignored and reported back as warnings.
// Timestamps must be numeric seconds on a uniform grid.  Actuator columns
// hold 0/1 (off/on, closed/open).
//
// validate_against() initializes the plant from the dataset's first row,
// replays normal operation at the dataset's own sampling interval, and
// reports per-sensor RMSE, maximum absolute deviation, and the time lag that
// best aligns the recorded signal with the simulated one (argmax of the
// normalized cross-correlation over a bounded shift range; positive lag
// means the recorded signal trails the simulation).  Rows are aligned by
// index, so absolute timestamp offsets between dataset and simulation do not
// matter.  Mapped actuator columns seed the initial state but are not
// compared.
// ---------------------------------------------------------------------------

namespace icsim {

struct HistoricalDataset {
    double interval_s = 1.0;
    std::vector<double> times_s;
    std::map<ComponentId, std::vector<double>> series; // component -> one value per row
    std::vector<std::string> ignored_columns;          // header order
};

struct SignalComparison {
    double rmse = 0.0;
    double max_abs_deviation = 0.0;
    double lag_s = 0.0;
    /// True when the best alignment sits on the edge of the searched shift
    /// range, i.e. the true lag may be larger than the bound.
    bool lag_at_search_bound = false;
};

struct ComparisonReport {
    double horizon_s = 0.0;
    double interval_s = 0.0;
    std::map<ComponentId, SignalComparison> signals;
};

namespace detail {

inline constexpr const char* kComparisonFormat = "icsim-comparison/1";
inline constexpr double kTimestampGridTolerance = 1e-6;

inline std::optional<double> try_parse_double(std::string_view cell)
{
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        return std::nullopt;
    }
    return value;
}

/// Pearson correlation of two equally long slices after mean removal; 0.0
/// when either side has no variance (a constant carries no lag information).
inline double normalized_correlation(const std::vector<double>& a, size_t a_offset,
                                     const std::vector<double>& b, size_t b_offset, size_t n)
{
    double mean_a = 0.0;
    double mean_b = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mean_a += a[a_offset + i];
        mean_b += b[b_offset + i];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);
    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double da = a[a_offset + i] - mean_a;
        const double db = b[b_offset + i] - mean_b;
        dot += da * db;
        norm_a += da * da;
        norm_b += db * db;
    }
    if (norm_a <= 0.0 || norm_b <= 0.0) {
        return 0.0;
    }
    return dot / std::sqrt(norm_a * norm_b);
}

} // namespace detail

inline HistoricalDataset ingest(const std::filesystem::path& path, const ColumnMapping& mapping)
{
    const std::string context = path.filename().string();
    if (mapping.columns.empty()) {
        throw IngestionError(context + ": column mapping maps no data columns");
    }

    std::string text;
    try {
        text = detail::read_text_file(path);
    }
    catch (const ConfigError& e) {
        throw IngestionError(e.what());
    }
    const std::vector<std::string_view> lines = detail::split_lines(text);
    if (lines.empty()) {
        throw IngestionError(context + ": file is empty");
    }

    const std::vector<std::string_view> header = detail::split_csv_row(lines[0]);
    std::optional<size_t> time_column;
    std::map<size_t, ComponentId> mapped_columns;
    HistoricalDataset dataset;
    for (size_t c = 0; c < header.size(); ++c) {
        const std::string name(header[c]);
        if (name == mapping.timestamp_column) {
            if (time_column) {
                throw IngestionError(context + ": duplicate timestamp column \"" + name + "\"");
            }
            time_column = c;
        }
        else if (auto it = mapping.columns.find(name); it != mapping.columns.end()) {
            mapped_columns[c] = it->second;
        }
        else {
            dataset.ignored_columns.push_back(name);
        }
    }
    if (!time_column) {
        throw IngestionError(context + ": timestamp column \"" + mapping.timestamp_column
                             + "\" not found");
    }
    for (const auto& [column, component] : mapping.columns) {
        bool found = false;
        for (const auto& [c, mapped] : mapped_columns) {
            found = found || std::string(header[c]) == column;
        }
        if (!found) {
            throw IngestionError(context + ": mapped column \"" + column
                                 + "\" not found in header");
        }
        (void)component;
    }

    for (const auto& [c, component] : mapped_columns) {
        dataset.series[component] = {};
        (void)c;
    }
    for (size_t row = 1; row < lines.size(); ++row) {
        const std::string ctx = context + ": row " + std::to_string(row);
        const std::vector<std::string_view> cells = detail::split_csv_row(lines[row]);
        if (cells.size() != header.size()) {
            throw IngestionError(ctx + ": expected " + std::to_string(header.size())
                                 + " columns, got " + std::to_string(cells.size()));
        }
        const std::optional<double> t = detail::try_parse_double(cells[*time_column]);
        if (!t) {
            throw IngestionError(ctx + ": timestamp \"" + std::string(cells[*time_column])
                                 + "\" is not numeric");
        }
        dataset.times_s.push_back(*t);
        for (const auto& [c, component] : mapped_columns) {
            const std::optional<double> v = detail::try_parse_double(cells[c]);
            if (!v) {
                throw IngestionError(ctx + ": column \"" + std::string(header[c])
                                     + "\" holds non-numeric \"" + std::string(cells[c]) + "\"");
            }
            dataset.series[component].push_back(*v);
        }
    }

    if (dataset.times_s.size() < 2) {
        throw IngestionError(context + ": need at least 2 data rows, got "
                             + std::to_string(dataset.times_s.size()));
    }
    dataset.interval_s = dataset.times_s[1] - dataset.times_s[0];
    if (!(dataset.interval_s > 0.0)) {
        throw IngestionError(context + ": timestamps must be strictly increasing");
    }
    for (size_t i = 1; i < dataset.times_s.size(); ++i) {
        const double step = dataset.times_s[i] - dataset.times_s[i - 1];
        if (std::abs(step - dataset.interval_s) > detail::kTimestampGridTolerance) {
            throw IngestionError(context + ": non-uniform timestamps at row "
                                 + std::to_string(i + 1) + " (step "
                                 + detail::format_double(step) + ", expected "
                                 + detail::format_double(dataset.interval_s) + ")");
        }
    }
    return dataset;
}

/// Replays normal plant operation from the dataset's first row and compares
/// every mapped sensor signal.  When `export_dir` is given, one
/// "paired_<sensor>.csv" per compared signal is written with columns
/// time,simulated,historical (index-aligned, times from the simulation).
inline ComparisonReport validate_against(
    const PlantIndex& ix, const HistoricalDataset& dataset, double horizon_s,
    double max_lag_s = 300.0,
    const std::optional<std::filesystem::path>& export_dir = std::nullopt)
{
    const PlantModel& model = *ix.model;
    if (dataset.times_s.size() < 2) {
        throw ContractViolation("validate_against: dataset has fewer than 2 rows");
    }
    if (!(max_lag_s >= 0.0)) {
        throw ContractViolation("validate_against: max_lag_s must be >= 0");
    }
    for (const auto& [component, values] : dataset.series) {
        if (values.size() != dataset.times_s.size()) {
            throw ContractViolation("validate_against: series \"" + component
                                    + "\" length does not match the timestamps");
        }
        if (!ix.sensor_pos.count(component) && !ix.element_pos.count(component)) {
            throw ContractViolation("validate_against: dataset maps unknown component \""
                                    + component + "\"");
        }
    }

    // Initial state from the first row: sensors by value, actuators by 0/1.
    std::map<ComponentId, double> sensor_values;
    std::map<ComponentId, std::string> actuator_states;
    for (const auto& [component, values] : dataset.series) {
        if (ix.sensor_pos.count(component)) {
            sensor_values[component] = values.front();
        }
        else {
            const FlowElement& e = model.flow_elements[ix.element_pos.at(component)];
            actuator_states[component] = state_label(e.kind, values.front() != 0.0);
        }
    }
    const DualState initial = initial_state_from(ix, sensor_values, actuator_states);

    const double dt = dataset.interval_s;
    const double span = dataset.times_s.back() - dataset.times_s.front();
    const SimulationTrace trace = run(ix, initial, {}, dt, std::min(horizon_s, span));

    ComparisonReport report;
    report.interval_s = dt;
    const size_t k_bound = static_cast<size_t>(std::floor(max_lag_s / dt + 1e-9));

    for (const auto& [component, values] : dataset.series) {
        auto sensor_it = ix.sensor_pos.find(component);
        if (sensor_it == ix.sensor_pos.end()) {
            continue; // actuator column: initialization only
        }
        const size_t sensor = sensor_it->second;
        const size_t n = std::min(values.size(), trace.samples.size());

        std::vector<double> sim(n);
        std::vector<double> hist(values.begin(), values.begin() + static_cast<long>(n));
        for (size_t i = 0; i < n; ++i) {
            sim[i] = trace.samples[i].physical_sensors[sensor];
        }

        SignalComparison cmp;
        double sum_sq = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double dev = std::abs(sim[i] - hist[i]);
            sum_sq += (sim[i] - hist[i]) * (sim[i] - hist[i]);
            cmp.max_abs_deviation = std::max(cmp.max_abs_deviation, dev);
        }
        cmp.rmse = std::sqrt(sum_sq / static_cast<double>(n));

        // Best-aligning shift: positive k compares sim[i] with hist[i + k],
        // i.e. the recorded signal trails the simulated one by k samples.
        const long max_k = std::min(static_cast<long>(k_bound), static_cast<long>(n) - 1);
        double best_corr = -2.0;
        long best_k = 0;
        for (long k = -max_k; k <= max_k; ++k) {
            const size_t sim_offset = k < 0 ? static_cast<size_t>(-k) : 0;
            const size_t hist_offset = k > 0 ? static_cast<size_t>(k) : 0;
            const size_t overlap = n - static_cast<size_t>(std::abs(k));
            if (overlap < 2) {
                continue;
            }
            const double corr =
                detail::normalized_correlation(sim, sim_offset, hist, hist_offset, overlap);
            const bool strictly_better = corr > best_corr + 1e-12;
            const bool tie_closer = std::abs(corr - best_corr) <= 1e-12
                && (std::abs(k) < std::abs(best_k)
                    || (std::abs(k) == std::abs(best_k) && k < best_k));
            if (strictly_better || tie_closer) {
                best_corr = corr;
                best_k = k;
            }
        }
        cmp.lag_s = static_cast<double>(best_k) * dt;
        cmp.lag_at_search_bound = max_k > 0 && std::abs(best_k) == max_k;
        report.signals[component] = cmp;

        if (export_dir) {
            std::string csv = "time,simulated,historical\n";
            for (size_t i = 0; i < n; ++i) {
                csv += detail::format_double(trace.samples[i].time);
                csv += "," + detail::format_double(sim[i]);
                csv += "," + detail::format_double(hist[i]) + "\n";
            }
            detail::write_text_file(*export_dir / ("paired_" + component + ".csv"), csv);
        }
    }
    report.horizon_s = trace.samples.back().time;
    return report;
}

inline nlohmann::json comparison_to_json(const ComparisonReport& report)
{
    nlohmann::json j;
    j["format"] = detail::kComparisonFormat;
    j["horizon_s"] = report.horizon_s;
    j["interval_s"] = report.interval_s;
    j["signals"] = nlohmann::json::object();
    for (const auto& [component, cmp] : report.signals) {
        j["signals"][component] = {{"rmse", cmp.rmse},
                                   {"max_abs_deviation", cmp.max_abs_deviation},
                                   {"lag_s", cmp.lag_s},
                                   {"lag_at_search_bound", cmp.lag_at_search_bound}};
    }
    return j;
}

inline void save_comparison(const ComparisonReport& report, const std::filesystem::path& path)
{
    detail::write_text_file(path, detail::dump_json(comparison_to_json(report)));
}

} // namespace icsim
