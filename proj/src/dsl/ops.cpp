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

#include "rfw/dsl/ops.hpp"

#include "rfw/dsl/script.hpp"

namespace rfw::dsl {

const std::string& op_table(const WranglingOp& op) {
    return std::visit([](const auto& o) -> const std::string& { return o.table; }, op);
}

std::string_view op_kind(const WranglingOp& op) {
    static constexpr std::string_view names[] = {"cast", "round", "impute", "downsample", "upsample", "droprow"};
    return names[op.index()];
}

std::string op_target(const WranglingOp& op) {
    struct Visitor {
        std::string operator()(const Cast& o) const { return o.column + "->" + unit_token(o.to); }
        std::string operator()(const Round& o) const { return o.column; }
        std::string operator()(const Impute& o) const { return o.column; }
        std::string operator()(const Downsample& o) const { return o.time_column; }
        std::string operator()(const Upsample& o) const { return o.time_column; }
        std::string operator()(const DropRow& o) const { return o.column; }
    };
    return std::visit(Visitor{}, op);
}

Rational SideEffect::row_fraction() const {
    if (rows_before == 0) return Rational{};
    return Rational{static_cast<std::int64_t>(rows_modified + rows_inserted + rows_deleted),
                    static_cast<std::int64_t>(rows_before)};
}

SideEffect& SideEffect::operator+=(const SideEffect& o) {
    rows_before += o.rows_before;
    rows_modified += o.rows_modified;
    rows_inserted += o.rows_inserted;
    rows_deleted += o.rows_deleted;
    cells_modified += o.cells_modified;
    residual_nulls += o.residual_nulls;
    return *this;
}

nlohmann::json to_json(const SideEffect& e) {
    const Rational f = e.row_fraction();
    return {{"rows_before", e.rows_before},
            {"rows_after", e.rows_after()},
            {"rows_modified", e.rows_modified},
            {"rows_inserted", e.rows_inserted},
            {"rows_deleted", e.rows_deleted},
            {"cells_modified", e.cells_modified},
            {"residual_nulls", e.residual_nulls},
            {"row_fraction", f.to_string()},
            {"row_fraction_value", f.to_double()}};
}

nlohmann::json to_json(const WranglingOp& op) {
    nlohmann::json j = {{"kind", op_kind(op)}, {"table", op_table(op)}, {"script", render_op(op)}};
    struct Visitor {
        nlohmann::json& j;
        void operator()(const Cast& o) const {
            j["column"] = o.column;
            j["from"] = unit_name(o.from);
            j["to"] = unit_name(o.to);
            j["band_hint"] = o.band_hint ? nlohmann::json(*o.band_hint) : nlohmann::json();
        }
        void operator()(const Round& o) const {
            j["column"] = o.column;
            if (o.granularity) j["granularity"] = format_duration(*o.granularity);
            if (o.decimals) j["decimals"] = *o.decimals;
        }
        void operator()(const Impute& o) const {
            j["column"] = o.column;
            j["method"] = to_string(o.method);
            j["group_by"] = o.group_by;
        }
        void operator()(const Downsample& o) const {
            j["time_column"] = o.time_column;
            j["delta"] = format_duration(o.delta);
            j["group_by"] = o.group_by;
            j["agg"] = nlohmann::json::object();
            for (const auto& [c, f] : o.agg) j["agg"][c] = to_string(f);
        }
        void operator()(const Upsample& o) const {
            j["time_column"] = o.time_column;
            j["delta"] = format_duration(o.delta);
            j["group_by"] = o.group_by;
            j["fill"] = nlohmann::json::object();
            for (const auto& [c, f] : o.fill) j["fill"][c] = to_string(f);
        }
        void operator()(const DropRow& o) const {
            j["column"] = o.column;
            switch (o.predicate) {
                case DropRow::Predicate::NullIn: j["predicate"] = "null"; break;
                case DropRow::Predicate::NotNumericIn: j["predicate"] = "not_numeric"; break;
                case DropRow::Predicate::OutsideRange:
                    j["predicate"] = "outside";
                    j["lo"] = o.lo;
                    j["hi"] = o.hi;
                    break;
            }
        }
    };
    std::visit(Visitor{j}, op);
    return j;
}

}  // namespace rfw::dsl
