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
#include <string>
#include <string_view>
#include <vector>

#include "icsim/config_io.hpp"
#include "icsim/sim.hpp"

// ---------------------------------------------------------------------------
// Trace and event CSV files.
//
// A trace CSV holds one row per sample: the time column, every sensor's
// physical reading, every sensor's cyber reading (column name suffixed
// ".cyber"), then every actuator's state as its label ("on"/"off"/
// "open"/"closed").  Safety events go to a separate CSV with columns
// time,kind,component.  Numbers are written in shortest round-trip form, so
// save followed by load reproduces every value bit-exactly and identical
// traces produce byte-identical files.
//
// A loaded trace carries the observable state only: tank levels are
// recovered from their level sensors and commanded states are assumed to
// match actual ones, which is all the downstream metrics read.
// ---------------------------------------------------------------------------

namespace icsim {

namespace detail {

inline void require_csv_safe(const std::string& name)
{
    if (name.empty() || name.find_first_of(",\"\r\n") != std::string::npos) {
        throw ContractViolation("identifier \"" + name + "\" cannot be used as a CSV field");
    }
}

inline double parse_csv_double(std::string_view cell, const std::string& context)
{
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError(context + ": \"" + std::string(cell) + "\" is not a number");
    }
    return value;
}

inline std::vector<std::string_view> split_csv_row(std::string_view line)
{
    std::vector<std::string_view> cells;
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

/// Splits text into lines, tolerating a trailing newline and CRLF endings.
inline std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    size_t start = 0;
    while (start < text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

} // namespace detail

inline std::string trace_csv_header(const PlantModel& model)
{
    std::string header = "time";
    for (const Sensor& s : model.sensors) {
        detail::require_csv_safe(s.id);
        header += "," + s.id;
    }
    for (const Sensor& s : model.sensors) {
        header += "," + s.id + ".cyber";
    }
    for (const FlowElement& e : model.flow_elements) {
        detail::require_csv_safe(e.id);
        header += "," + e.id;
    }
    return header;
}

inline std::string trace_to_csv(const PlantIndex& ix, const SimulationTrace& trace)
{
    const PlantModel& model = *ix.model;
    std::string out = trace_csv_header(model) + "\n";
    for (const DualState& state : trace.samples) {
        out += detail::format_double(state.time);
        for (double v : state.physical_sensors) {
            out += "," + detail::format_double(v);
        }
        for (double v : state.cyber_sensors) {
            out += "," + detail::format_double(v);
        }
        for (size_t i = 0; i < model.flow_elements.size(); ++i) {
            out += ",";
            out += state_label(model.flow_elements[i].kind, state.actuator_states[i] != 0);
        }
        out += "\n";
    }
    return out;
}

inline void save_trace(const PlantIndex& ix, const SimulationTrace& trace,
                       const std::filesystem::path& path)
{
    detail::write_text_file(path, trace_to_csv(ix, trace));
}

/// Parses a trace CSV written by save_trace() for the same plant.  The header
/// must match the plant's column layout exactly.
inline SimulationTrace load_trace(const PlantIndex& ix, const std::filesystem::path& path)
{
    const PlantModel& model = *ix.model;
    const std::string context = path.filename().string();
    const std::string text = detail::read_text_file(path);
    const std::vector<std::string_view> lines = detail::split_lines(text);
    if (lines.empty()) {
        throw ConfigError(context + ": empty trace file");
    }
    const std::string expected_header = trace_csv_header(model);
    if (lines[0] != expected_header) {
        throw ConfigError(context + ": header does not match the plant (expected \""
                          + expected_header + "\")");
    }

    const size_t n_sensors = model.sensors.size();
    const size_t n_actuators = model.flow_elements.size();
    const size_t n_columns = 1 + 2 * n_sensors + n_actuators;

    SimulationTrace trace;
    for (size_t row = 1; row < lines.size(); ++row) {
        const std::string ctx = context + ": row " + std::to_string(row);
        const std::vector<std::string_view> cells = detail::split_csv_row(lines[row]);
        if (cells.size() != n_columns) {
            throw ConfigError(ctx + ": expected " + std::to_string(n_columns) + " columns, got "
                              + std::to_string(cells.size()));
        }
        DualState state;
        state.time = detail::parse_csv_double(cells[0], ctx);
        state.physical_sensors.resize(n_sensors);
        state.cyber_sensors.resize(n_sensors);
        for (size_t i = 0; i < n_sensors; ++i) {
            state.physical_sensors[i] = detail::parse_csv_double(cells[1 + i], ctx);
            state.cyber_sensors[i] = detail::parse_csv_double(cells[1 + n_sensors + i], ctx);
        }
        state.actuator_states.resize(n_actuators);
        for (size_t i = 0; i < n_actuators; ++i) {
            const FlowElement& e = model.flow_elements[i];
            state.actuator_states[i] =
                parse_state_label(e.kind,
                                  std::string(cells[1 + 2 * n_sensors + i]), e.id)
                    ? 1
                    : 0;
        }
        state.commanded_states = state.actuator_states;
        state.tank_levels.assign(model.tanks.size(), 0.0);
        for (size_t i = model.sensors.size(); i-- > 0;) {
            if (model.sensors[i].kind == SensorKind::Level) {
                state.tank_levels[ix.sensor_target[i]] = state.physical_sensors[i];
            }
        }
        trace.samples.push_back(std::move(state));
    }
    if (trace.samples.empty()) {
        throw ConfigError(context + ": trace has a header but no samples");
    }
    if (trace.samples.size() >= 2) {
        trace.dt = trace.samples[1].time - trace.samples[0].time;
        if (trace.dt <= 0.0) {
            throw ConfigError(context + ": sample times must be strictly increasing");
        }
    }
    return trace;
}

inline std::string events_to_csv(const std::vector<SafetyEvent>& events)
{
    std::string out = "time,kind,component\n";
    for (const SafetyEvent& e : events) {
        detail::require_csv_safe(e.component);
        out += detail::format_double(e.time);
        out += ",";
        out += event_kind_label(e.kind);
        out += "," + e.component + "\n";
    }
    return out;
}

inline void save_events(const std::vector<SafetyEvent>& events, const std::filesystem::path& path)
{
    detail::write_text_file(path, events_to_csv(events));
}

inline std::vector<SafetyEvent> load_events(const std::filesystem::path& path)
{
    const std::string context = path.filename().string();
    const std::string text = detail::read_text_file(path);
    const std::vector<std::string_view> lines = detail::split_lines(text);
    if (lines.empty() || lines[0] != "time,kind,component") {
        throw ConfigError(context + ": expected header \"time,kind,component\"");
    }
    std::vector<SafetyEvent> events;
    for (size_t row = 1; row < lines.size(); ++row) {
        const std::string ctx = context + ": row " + std::to_string(row);
        const std::vector<std::string_view> cells = detail::split_csv_row(lines[row]);
        if (cells.size() != 3) {
            throw ConfigError(ctx + ": expected 3 columns");
        }
        SafetyEvent e;
        e.time = detail::parse_csv_double(cells[0], ctx);
        const std::string kind(cells[1]);
        if (kind == "overflow") {
            e.kind = EventKind::Overflow;
        }
        else if (kind == "underflow") {
            e.kind = EventKind::Underflow;
        }
        else if (kind == "dry_run") {
            e.kind = EventKind::DryRun;
        }
        else {
            throw ConfigError(ctx + ": unknown event kind \"" + kind + "\"");
        }
        e.component = std::string(cells[2]);
        events.push_back(std::move(e));
    }
    return events;
}

} // namespace icsim
