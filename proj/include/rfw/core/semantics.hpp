/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "rfw/core/cell.hpp"

namespace rfw {

enum class UnitKind {
    NoUnit,
    MHz,
    Hz,
    EARFCN,
    dBm,
    dB,
    Hexadecimal,
    Decimal,
    Seconds,
    Milliseconds,
    DecimalDegrees,
    Custom,
};

/// Measurement unit of a column. Custom units carry the user-configured name.
struct Unit {
    UnitKind kind = UnitKind::NoUnit;
    std::string custom;

    Unit() = default;
    Unit(UnitKind k) : kind(k) {}  // NOLINT: implicit by design of the closed set
    static Unit custom_unit(std::string name) {
        Unit u{UnitKind::Custom};
        u.custom = std::move(name);
        return u;
    }

    bool operator==(const Unit&) const = default;
};

/// Vocabulary spelling used in prompts and answers ("no unit", "MHz", "decimal degrees", ...).
std::string unit_name(const Unit& u);
/// Case-insensitive inverse of unit_name for the built-in set.
std::optional<Unit> unit_from_name(std::string_view name);
/// Space-free spelling for scripts (no_unit, decimal_degrees, custom:<name>).
std::string unit_token(const Unit& u);
std::optional<Unit> unit_from_token(std::string_view token);

enum class BroadType { TimestampType, Categorical, Numerical, Ordinal };
enum class ColumnRole { Grouping, Aggregating, TimeIndex };
enum class Scale { Linear, Logarithmic };

std::string_view to_string(BroadType t);
std::string_view to_string(ColumnRole r);
std::string_view to_string(Scale s);

enum class AggFn { Mean, Sum, Mode, Median, LogMean };

/// 'mean', 'sum', 'mode', 'median', 'log_mean'
std::string_view to_string(AggFn f);
std::optional<AggFn> agg_from_string(std::string_view s);

enum class ImputeKind { ForwardFill, BackwardFill, Interpolate, Mode, Constant };

struct ImputeFn {
    ImputeKind kind = ImputeKind::ForwardFill;
    Cell constant;  // only for Constant

    bool operator==(const ImputeFn&) const = default;
};

/// ffill, bfill, interpolate, mode, const:<value>
std::string to_string(const ImputeFn& f);
std::optional<ImputeFn> impute_from_string(std::string_view s);
std::string_view describe(ImputeKind k);  // "forward fill", ...

}  // namespace rfw
