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

#include "rfw/session/json_io.hpp"

#include "rfw/core/timestamp.hpp"

namespace rfw::session {

nlohmann::json cell_to_json(const Cell& c) {
    switch (c.kind()) {
        case CellKind::Null: return nullptr;
        case CellKind::Integer: return c.as_integer();
        case CellKind::Number: return c.as_number();
        case CellKind::Text: return c.as_text();
        case CellKind::Timestamp: return format_iso8601_ms(c.as_timestamp());
    }
    return nullptr;
}

nlohmann::json table_to_json(const Table& t, std::size_t max_rows) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : t.columns()) {
        nlohmann::json col{{"name", c.name}, {"type", to_string(c.type)}};
        if (c.declared_unit) col["unit"] = unit_name(*c.declared_unit);
        cols.push_back(std::move(col));
    }
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < t.row_count() && r < max_rows; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < t.column_count(); ++c) row.push_back(cell_to_json(t.at(r, c)));
        rows.push_back(std::move(row));
    }
    return {{"name", t.name()}, {"row_count", t.row_count()}, {"columns", cols}, {"rows", rows}};
}

nlohmann::json to_json(const profiler::SemanticProfile& p) {
    nlohmann::json aggs = nlohmann::json::array(), imps = nlohmann::json::array(), casts = nlohmann::json::array();
    for (auto f : p.allowed_aggregations) aggs.push_back(to_string(f));
    for (const auto& f : p.allowed_imputations) imps.push_back(to_string(f));
    for (const auto& u : p.cast_targets) casts.push_back(unit_name(u));
    return {{"column", p.column},
            {"unit", unit_name(p.unit)},
            {"broad_type", to_string(p.broad_type)},
            {"role", to_string(p.role)},
            {"scale", to_string(p.scale)},
            {"allowed_aggregations", aggs},
            {"allowed_imputations", imps},
            {"cast_targets", casts},
            {"confidence", p.confidence},
            {"provenance", p.provenance}};
}

nlohmann::json to_json(const profiler::TableProfiles& p) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : p.columns) cols.push_back(to_json(c));
    return {{"table", p.table}, {"columns", cols}};
}

}  // namespace rfw::session
