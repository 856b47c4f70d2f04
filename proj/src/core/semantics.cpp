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

#include "rfw/core/semantics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

#include "rfw/core/csv.hpp"

namespace rfw {
namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

constexpr std::array<std::pair<UnitKind, std::string_view>, 11> k_unit_names{{
    {UnitKind::NoUnit, "no unit"},
    {UnitKind::MHz, "MHz"},
    {UnitKind::Hz, "Hz"},
    {UnitKind::EARFCN, "EARFCN"},
    {UnitKind::dBm, "dBm"},
    {UnitKind::dB, "dB"},
    {UnitKind::Hexadecimal, "hexadecimal"},
    {UnitKind::Decimal, "decimal"},
    {UnitKind::Seconds, "seconds"},
    {UnitKind::Milliseconds, "milliseconds"},
    {UnitKind::DecimalDegrees, "decimal degrees"},
}};

}  // namespace

std::string unit_name(const Unit& u) {
    if (u.kind == UnitKind::Custom) return u.custom;
    for (const auto& [k, n] : k_unit_names)
        if (k == u.kind) return std::string(n);
    return "no unit";
}

std::optional<Unit> unit_from_name(std::string_view name) {
    const std::string l = lower(name);
    for (const auto& [k, n] : k_unit_names)
        if (lower(n) == l) return Unit{k};
    return std::nullopt;
}

std::string unit_token(const Unit& u) {
    if (u.kind == UnitKind::Custom) return "custom:" + u.custom;
    std::string n = unit_name(u);
    std::replace(n.begin(), n.end(), ' ', '_');
    return n;
}

std::optional<Unit> unit_from_token(std::string_view token) {
    if (token.starts_with("custom:")) return Unit::custom_unit(std::string(token.substr(7)));
    std::string n(token);
    std::replace(n.begin(), n.end(), '_', ' ');
    return unit_from_name(n);
}

std::string_view to_string(BroadType t) {
    switch (t) {
        case BroadType::TimestampType: return "timestamp";
        case BroadType::Categorical: return "categorical";
        case BroadType::Numerical: return "numerical";
        case BroadType::Ordinal: return "ordinal";
    }
    return "categorical";
}

std::string_view to_string(ColumnRole r) {
    switch (r) {
        case ColumnRole::Grouping: return "grouping";
        case ColumnRole::Aggregating: return "aggregating";
        case ColumnRole::TimeIndex: return "time_index";
    }
    return "grouping";
}

std::string_view to_string(Scale s) { return s == Scale::Logarithmic ? "logarithmic" : "linear"; }

std::string_view to_string(AggFn f) {
    switch (f) {
        case AggFn::Mean: return "mean";
        case AggFn::Sum: return "sum";
        case AggFn::Mode: return "mode";
        case AggFn::Median: return "median";
        case AggFn::LogMean: return "log_mean";
    }
    return "mean";
}

std::optional<AggFn> agg_from_string(std::string_view s) {
    const std::string l = lower(s);
    if (l == "mean") return AggFn::Mean;
    if (l == "sum") return AggFn::Sum;
    if (l == "mode") return AggFn::Mode;
    if (l == "median") return AggFn::Median;
    if (l == "log_mean" || l == "logmean") return AggFn::LogMean;
    return std::nullopt;
}

std::string to_string(const ImputeFn& f) {
    switch (f.kind) {
        case ImputeKind::ForwardFill: return "ffill";
        case ImputeKind::BackwardFill: return "bfill";
        case ImputeKind::Interpolate: return "interpolate";
        case ImputeKind::Mode: return "mode";
        case ImputeKind::Constant: {
            if (f.constant.kind() == CellKind::Text) return "const:'" + f.constant.as_text() + "'";
            return "const:" + f.constant.to_string();
        }
    }
    return "ffill";
}

std::optional<ImputeFn> impute_from_string(std::string_view s) {
    if (s == "ffill") return ImputeFn{ImputeKind::ForwardFill, {}};
    if (s == "bfill") return ImputeFn{ImputeKind::BackwardFill, {}};
    if (s == "interpolate") return ImputeFn{ImputeKind::Interpolate, {}};
    if (s == "mode") return ImputeFn{ImputeKind::Mode, {}};
    if (s.starts_with("const:")) {
        std::string_view v = s.substr(6);
        if (v.size() >= 2 && v.front() == '\'' && v.back() == '\'')
            return ImputeFn{ImputeKind::Constant, Cell::text(std::string(v.substr(1, v.size() - 2)))};
        for (auto type : {ColumnType::Integer, ColumnType::Number, ColumnType::Timestamp}) {
            Cell c = parse_cell(v, type);
            if (!c.is_null() && c.kind() != CellKind::Text) return ImputeFn{ImputeKind::Constant, c};
        }
        return ImputeFn{ImputeKind::Constant, Cell::text(std::string(v))};
    }
    return std::nullopt;
}

std::string_view describe(ImputeKind k) {
    switch (k) {
        case ImputeKind::ForwardFill: return "forward fill";
        case ImputeKind::BackwardFill: return "backward fill";
        case ImputeKind::Interpolate: return "linear interpolation";
        case ImputeKind::Mode: return "the most frequent value";
        case ImputeKind::Constant: return "a constant";
    }
    return "forward fill";
}

}  // namespace rfw
