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

#include "rfw/profiler/profile.hpp"

#include <algorithm>

namespace rfw::profiler {

bool SemanticProfile::allows(AggFn f) const {
    return std::find(allowed_aggregations.begin(), allowed_aggregations.end(), f) != allowed_aggregations.end();
}

bool SemanticProfile::allows(const ImputeFn& f) const {
    if (f.kind == ImputeKind::Constant) return true;
    return std::any_of(allowed_imputations.begin(), allowed_imputations.end(),
                       [&](const ImputeFn& a) { return a.kind == f.kind; });
}

const SemanticProfile* TableProfiles::find(std::string_view column) const {
    for (const auto& p : columns)
        if (p.column == column) return &p;
    return nullptr;
}

const SemanticProfile* TableProfiles::time_index() const {
    for (const auto& p : columns)
        if (p.role == ColumnRole::TimeIndex) return &p;
    return nullptr;
}

std::vector<std::string> TableProfiles::columns_with_role(ColumnRole role) const {
    std::vector<std::string> out;
    for (const auto& p : columns)
        if (p.role == role) out.push_back(p.column);
    return out;
}

Strategies synthesize_strategies(const Unit& unit, BroadType broad_type, ColumnRole role) {
    const ImputeFn ffill{ImputeKind::ForwardFill, {}};
    const ImputeFn bfill{ImputeKind::BackwardFill, {}};
    const ImputeFn interp{ImputeKind::Interpolate, {}};
    const ImputeFn mode{ImputeKind::Mode, {}};

    Strategies s;
    const bool identifier = unit.kind == UnitKind::EARFCN || unit.kind == UnitKind::Hexadecimal ||
                            unit.kind == UnitKind::Decimal;
    if (unit.kind == UnitKind::dBm || unit.kind == UnitKind::dB) {
        s.scale = Scale::Logarithmic;
        s.allowed_aggregations = {AggFn::LogMean};
        s.allowed_imputations = {ffill, bfill};
    } else if (unit.kind == UnitKind::DecimalDegrees) {
        s.allowed_aggregations = {AggFn::Mean};
        s.allowed_imputations = {ffill, interp};
    } else if (broad_type == BroadType::TimestampType) {
        // time index: never aggregated or imputed
    } else if (broad_type == BroadType::Categorical || identifier) {
        s.allowed_imputations = {ffill, mode};
    } else if (broad_type == BroadType::Ordinal) {
        s.allowed_aggregations = {AggFn::Median, AggFn::Mode};
        s.allowed_imputations = {ffill, mode};
    } else {
        s.allowed_aggregations = {AggFn::Mean, AggFn::Median, AggFn::Sum};
        s.allowed_imputations = {ffill, interp};
    }

    if (broad_type != BroadType::TimestampType) {
        switch (unit.kind) {
            case UnitKind::EARFCN: s.cast_targets = {Unit{UnitKind::MHz}}; break;
            case UnitKind::MHz: s.cast_targets = {Unit{UnitKind::EARFCN}, Unit{UnitKind::Hz}}; break;
            case UnitKind::Hz: s.cast_targets = {Unit{UnitKind::MHz}}; break;
            case UnitKind::Hexadecimal: s.cast_targets = {Unit{UnitKind::Decimal}}; break;
            case UnitKind::Decimal: s.cast_targets = {Unit{UnitKind::Hexadecimal}}; break;
            case UnitKind::Seconds: s.cast_targets = {Unit{UnitKind::Milliseconds}}; break;
            case UnitKind::Milliseconds: s.cast_targets = {Unit{UnitKind::Seconds}}; break;
            default: break;
        }
    }

    if (role == ColumnRole::Grouping) {
        s.allowed_aggregations.clear();
        if (s.scale == Scale::Linear && broad_type != BroadType::TimestampType) s.allowed_imputations = {ffill, mode};
    }
    return s;
}

}  // namespace rfw::profiler
