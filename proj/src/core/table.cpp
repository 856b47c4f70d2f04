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

#include "rfw/core/table.hpp"

#include <unordered_set>

#include <fmt/format.h>

#include "rfw/core/error.hpp"

namespace rfw {

std::string_view to_string(ColumnType t) {
    switch (t) {
        case ColumnType::Integer: return "integer";
        case ColumnType::Number: return "number";
        case ColumnType::Timestamp: return "timestamp";
        case ColumnType::Text: return "text";
    }
    return "text";
}

Table::Table(std::string name, std::vector<Column> columns) : name_(std::move(name)), columns_(std::move(columns)) {
    std::unordered_set<std::string> seen;
    for (const auto& c : columns_) {
        if (!seen.insert(c.name).second)
            throw Error(ErrorCode::DuplicateColumn, fmt::format("duplicate column '{}' in table '{}'", c.name, name_));
    }
    rows_ = columns_.empty() ? 0 : columns_.front().cells.size();
    for (const auto& c : columns_) {
        if (c.cells.size() != rows_)
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("column '{}' has {} cells, expected {}", c.name, c.cells.size(), rows_));
    }
}

std::optional<std::size_t> Table::find_column(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].name == name) return i;
    return std::nullopt;
}

std::size_t Table::column_index(std::string_view name) const {
    if (auto i = find_column(name)) return *i;
    throw Error(ErrorCode::UnknownColumn, fmt::format("table '{}' has no column '{}'", name_, name));
}

std::vector<std::string> Table::column_names() const {
    std::vector<std::string> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) out.push_back(c.name);
    return out;
}

Table Table::renamed(std::string name) const {
    Table t = *this;
    t.name_ = std::move(name);
    return t;
}

Table Table::select_rows(std::span<const std::size_t> rows) const {
    std::vector<Column> cols;
    cols.reserve(columns_.size());
    for (const auto& c : columns_) {
        Column nc{c.name, c.type, c.declared_unit, {}};
        nc.cells.reserve(rows.size());
        for (std::size_t r : rows) nc.cells.push_back(c.cells.at(r));
        cols.push_back(std::move(nc));
    }
    return Table{name_, std::move(cols)};
}

Table Table::with_column(std::size_t index, Column column) const {
    std::vector<Column> cols = columns_;
    cols.at(index) = std::move(column);
    return Table{name_, std::move(cols)};
}

Table concat_rows(std::span<const Table> parts, std::string name) {
    if (parts.empty()) return Table{std::move(name), {}};
    std::vector<Column> cols;
    for (const auto& c : parts.front().columns()) cols.push_back(Column{c.name, c.type, c.declared_unit, {}});
    for (const auto& p : parts) {
        if (p.column_count() != cols.size())
            throw Error(ErrorCode::InvalidArgument, "concat_rows: schema mismatch");
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const auto& src = p.columns()[i];
            if (src.name != cols[i].name) throw Error(ErrorCode::InvalidArgument, "concat_rows: schema mismatch");
            cols[i].cells.insert(cols[i].cells.end(), src.cells.begin(), src.cells.end());
        }
    }
    return Table{std::move(name), std::move(cols)};
}

}  // namespace rfw
