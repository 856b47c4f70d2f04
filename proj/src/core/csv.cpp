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

#include "rfw/core/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "rfw/core/error.hpp"
#include "rfw/core/timestamp.hpp"

namespace rfw {
namespace {

constexpr std::size_t k_vote_prefix = 1000;
constexpr double k_vote_share = 0.95;

struct Field {
    std::string text;
    bool quoted = false;
};

using Record = std::vector<Field>;

std::vector<Record> parse_records(std::string_view src, char delim) {
    std::vector<Record> records;
    Record current;
    Field field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t i = 0;
    if (src.starts_with("\xEF\xBB\xBF")) i = 3;

    auto end_field = [&] {
        current.push_back(std::move(field));
        field = Field{};
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        // A line holding nothing at all is skipped (typically a trailing blank line).
        if (!(current.size() == 1 && current[0].text.empty() && !current[0].quoted)) records.push_back(std::move(current));
        current.clear();
    };

    for (; i < src.size(); ++i) {
        const char c = src[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < src.size() && src[i + 1] == '"') {
                    field.text.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.text.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            in_quotes = true;
            field.quoted = true;
            field_started = true;
        } else if (c == delim) {
            end_field();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < src.size() && src[i + 1] == '\n') ++i;
            end_record();
        } else {
            field.text.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes)
        throw Error(ErrorCode::MalformedCsv, fmt::format("unterminated quoted field in record {}", records.size() + 1),
                    records.size() + 1);
    if (field_started || !current.empty()) end_record();
    return records;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

// Plain decimal epoch values are converted digit by digit so that fractional
// seconds keep their exact nanoseconds.
std::optional<Timestamp> exact_epoch(std::string_view s) {
    s = trim(s);
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    const auto dot = s.find('.');
    const std::string_view whole = s.substr(0, dot);
    const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    auto digits = [](std::string_view d) {
        return std::all_of(d.begin(), d.end(), [](unsigned char c) { return std::isdigit(c); });
    };
    if (whole.empty() || whole.size() > 19 || !digits(whole) || !digits(frac)) return std::nullopt;
    std::int64_t w = 0;
    std::from_chars(whole.data(), whole.data() + whole.size(), w);
    const std::int64_t scale = w < 100'000'000'000LL ? 1'000'000'000 : w < 100'000'000'000'000LL ? 1'000'000 : 1;
    std::int64_t f = 0, unit = scale;
    for (char c : frac) {
        if (unit == 1) break;
        unit /= 10;
        f += (c - '0') * unit;
    }
    std::int64_t ns = 0;
    if (__builtin_mul_overflow(w, scale, &ns) || __builtin_add_overflow(ns, f, &ns)) return std::nullopt;
    return Timestamp{negative ? -ns : ns};
}

std::optional<Timestamp> parse_ts(std::string_view s, bool epoch_allowed) {
    if (auto t = parse_iso8601(s)) return t;
    if (epoch_allowed) {
        if (auto t = exact_epoch(s)) return t;
        if (auto d = parse_double(s)) return timestamp_from_epoch(*d);
    }
    return std::nullopt;
}

bool is_time_name(std::string_view name) {
    std::string l(name);
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
    return l == "ts" || l == "time" || l == "timestamp" || l == "datetime" || l == "epoch" || l.ends_with("_time") ||
           l.starts_with("time_") || l.ends_with("_ts") || l.ends_with("timestamp");
}

ColumnType infer_type(const std::vector<Record>& rows, std::size_t col, bool epoch_allowed) {
    std::size_t non_null = 0, ints = 0, nums = 0, stamps = 0;
    const std::size_t n = std::min(rows.size(), k_vote_prefix);
    for (std::size_t r = 0; r < n; ++r) {
        const Field& f = rows[r][col];
        if (f.text.empty() && !f.quoted) continue;
        ++non_null;
        if (parse_int(f.text)) ++ints;
        if (parse_double(f.text)) ++nums;
        if (parse_ts(f.text, epoch_allowed)) ++stamps;
    }
    if (non_null == 0) return ColumnType::Text;
    const double need = k_vote_share * static_cast<double>(non_null);
    if (epoch_allowed && static_cast<double>(stamps) >= need) return ColumnType::Timestamp;
    if (static_cast<double>(ints) >= need) return ColumnType::Integer;
    if (static_cast<double>(nums) >= need) return ColumnType::Number;
    if (static_cast<double>(stamps) >= need) return ColumnType::Timestamp;
    return ColumnType::Text;
}

bool needs_quotes(const std::string& s, char delim) {
    if (s.empty()) return true;
    if (std::isspace(static_cast<unsigned char>(s.front())) || std::isspace(static_cast<unsigned char>(s.back())))
        return true;
    return s.find_first_of(std::string{delim, '"', '\n', '\r'}) != std::string::npos;
}

void append_field(std::string& out, const Cell& cell, char delim) {
    switch (cell.kind()) {
        case CellKind::Null: return;
        case CellKind::Integer: out += std::to_string(cell.as_integer()); return;
        case CellKind::Number: out += format_number(cell.as_number()); return;
        case CellKind::Timestamp: out += format_iso8601_ms(cell.as_timestamp()); return;
        case CellKind::Text: {
            const std::string& s = cell.as_text();
            if (!needs_quotes(s, delim)) {
                out += s;
                return;
            }
            out.push_back('"');
            for (char c : s) {
                if (c == '"') out.push_back('"');
                out.push_back(c);
            }
            out.push_back('"');
            return;
        }
    }
}

}  // namespace

Cell parse_cell(std::string_view raw, ColumnType type, bool epoch_allowed) {
    if (raw.empty()) return Cell::null();
    switch (type) {
        case ColumnType::Integer:
            if (auto v = parse_int(raw)) return Cell::integer(*v);
            if (auto d = parse_double(raw)) return Cell::number(*d);
            break;
        case ColumnType::Number:
            if (auto d = parse_double(raw)) return Cell::number(*d);
            break;
        case ColumnType::Timestamp:
            if (auto t = parse_ts(raw, epoch_allowed)) return Cell::timestamp(*t);
            break;
        case ColumnType::Text: break;
    }
    return Cell::text(std::string(raw));
}

Table ingest_csv(std::string_view source, std::string table_name, const CsvOptions& options) {
    std::vector<Record> records = parse_records(source, options.delimiter);
    if (records.empty()) throw Error(ErrorCode::EmptyFile, fmt::format("'{}' contains no records", table_name));

    std::vector<std::string> names;
    std::size_t first_data = 0;
    const std::size_t width = records.front().size();
    if (options.header) {
        for (auto& f : records.front()) names.push_back(f.text);
        first_data = 1;
    } else {
        for (std::size_t i = 0; i < width; ++i) names.push_back(fmt::format("column_{}", i + 1));
    }
    for (std::size_t r = 0; r < records.size(); ++r) {
        if (records[r].size() != width)
            throw Error(ErrorCode::MalformedCsv,
                        fmt::format("record {} has {} fields, expected {}", r + 1, records[r].size(), width), r + 1);
    }

    const bool epoch_enabled = std::find(options.timestamp_formats.begin(), options.timestamp_formats.end(),
                                         "epoch") != options.timestamp_formats.end();
    std::vector<Record> data(std::make_move_iterator(records.begin() + static_cast<std::ptrdiff_t>(first_data)),
                             std::make_move_iterator(records.end()));

    std::vector<Column> columns;
    columns.reserve(width);
    for (std::size_t c = 0; c < width; ++c) {
        const bool forced = std::find(options.epoch_columns.begin(), options.epoch_columns.end(), names[c]) !=
                            options.epoch_columns.end();
        const bool epoch_allowed = forced || (epoch_enabled && is_time_name(names[c]));
        Column col;
        col.name = names[c];
        col.type = infer_type(data, c, epoch_allowed);
        col.cells.reserve(data.size());
        for (const auto& rec : data) {
            const Field& f = rec[c];
            if (f.text.empty()) {
                col.cells.push_back(f.quoted ? Cell::text("") : Cell::null());
            } else if (f.quoted && col.type == ColumnType::Text) {
                col.cells.push_back(Cell::text(f.text));
            } else {
                col.cells.push_back(parse_cell(f.text, col.type, epoch_allowed));
            }
        }
        columns.push_back(std::move(col));
    }
    return Table{std::move(table_name), std::move(columns)};
}

std::string export_csv(const Table& table, char delimiter) {
    std::string out;
    const auto& cols = table.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) out.push_back(delimiter);
        append_field(out, Cell::text(cols[c].name), delimiter);
    }
    out.push_back('\n');
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out.push_back(delimiter);
            append_field(out, cols[c].cells[r], delimiter);
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace rfw
