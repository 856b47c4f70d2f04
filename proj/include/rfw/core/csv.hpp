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

#include <string>
#include <string_view>
#include <vector>

#include "rfw/core/table.hpp"

namespace rfw {

struct CsvOptions {
    char delimiter = ',';
    bool header = true;
    /// Enabled timestamp spellings: "iso8601" and/or "epoch".
    std::vector<std::string> timestamp_formats{"iso8601"};
    /// Columns always parsed as epoch timestamps, regardless of name.
    std::vector<std::string> epoch_columns;
};

/// RFC 4180 ingestion with per-column type inference over a 1000-row prefix.
/// Unquoted empty fields become Null, quoted empty fields empty Text.
/// Throws EmptyFile, MalformedCsv (with the 1-based record index).
Table ingest_csv(std::string_view source, std::string table_name, const CsvOptions& options = {});

/// Mirrors ingestion: Null -> empty field, Timestamp -> ISO 8601 with milliseconds.
std::string export_csv(const Table& table, char delimiter = ',');

/// Parses a single field the way ingestion would for a column of the given type.
Cell parse_cell(std::string_view raw, ColumnType type, bool epoch_allowed = false);

}  // namespace rfw
