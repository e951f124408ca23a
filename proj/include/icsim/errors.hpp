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

#include <stdexcept>
#include <string>

namespace icsim {

/// Base class for all icsim errors so callers can catch the library as a whole.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A caller broke a documented precondition (unknown component id, mismatched
/// grids, scenario that fails validation, ...).  The message names the
/// offending component or input so it is actionable.
class ContractViolation : public Error {
public:
    explicit ContractViolation(const std::string& what) : Error(what) {}
};

/// Impact-ratio denominator integrated to zero; the ratio is undefined.
class DegenerateDenominator : public Error {
public:
    explicit DegenerateDenominator(const std::string& what) : Error(what) {}
};

/// A trace is too short (or too static) for the requested analysis.
class InsufficientTrace : public Error {
public:
    explicit InsufficientTrace(const std::string& what) : Error(what) {}
};

/// Historical data could not be ingested (missing column, malformed cell,
/// non-uniform timestamps, empty file, ...).
class IngestionError : public Error {
public:
    explicit IngestionError(const std::string& what) : Error(what) {}
};

/// A configuration file is malformed or references unknown components.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

} // namespace icsim
