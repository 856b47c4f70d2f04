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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfw/core/cell.hpp"
#include "rfw/core/semantics.hpp"

namespace rfw {

/// Storage type decided at ingestion. Individual cells may still be Null, or Text
/// when a minority of values failed to parse.
enum class ColumnType { Integer, Number, Timestamp, Text };

std::string_view to_string(ColumnType t);

struct Column {
    std::string name;
    ColumnType type = ColumnType::Text;
    std::optional<Unit> declared_unit;
    std::vector<Cell> cells;

    bool operator==(const Column&) const = default;
};

/// Immutable named table. Every transformation builds a new Table.
class Table {
public:
    Table() = default;
    /// Throws DuplicateColumn or InvalidArgument (ragged columns).
    Table(std::string name, std::vector<Column> columns);

    const std::string& name() const noexcept { return name_; }
    std::size_t row_count() const noexcept { return rows_; }
    std::size_t column_count() const noexcept { return columns_.size(); }
    const std::vector<Column>& columns() const noexcept { return columns_; }

    std::optional<std::size_t> find_column(std::string_view name) const noexcept;
    /// Throws UnknownColumn.
    std::size_t column_index(std::string_view name) const;
    const Column& column(std::string_view name) const { return columns_[column_index(name)]; }
    const Cell& at(std::size_t row, std::size_t col) const { return columns_[col].cells[row]; }

    std::vector<std::string> column_names() const;

    Table renamed(std::string name) const;
    /// Rows in the given order (indices may repeat).
    Table select_rows(std::span<const std::size_t> rows) const;
    Table with_column(std::size_t index, Column column) const;

    bool operator==(const Table&) const = default;

private:
    std::string name_;
    std::vector<Column> columns_;
    std::size_t rows_ = 0;
};

/// Concatenates tables with identical schemas (column names and order).
Table concat_rows(std::span<const Table> parts, std::string name);

}  // namespace rfw
