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

#include "rfw/dsl/exec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "rfw/core/error.hpp"

namespace rfw::dsl {
namespace {

using Key = std::vector<Cell>;

struct KeyLess {
    bool operator()(const Key& a, const Key& b) const {
        for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
            const auto c = compare_cells(a[i], b[i]);
            if (c != 0) return c < 0;
        }
        return a.size() < b.size();
    }
};

struct CellLess {
    bool operator()(const Cell& a, const Cell& b) const { return compare_cells(a, b) < 0; }
};

std::vector<std::size_t> indices_of(const Table& t, const std::vector<std::string>& names) {
    std::vector<std::size_t> out;
    for (const auto& n : names) out.push_back(t.column_index(n));
    return out;
}

Key key_of(const std::vector<Column>& cols, std::size_t row, const std::vector<std::size_t>& idx) {
    Key k;
    k.reserve(idx.size());
    for (auto i : idx) k.push_back(cols[i].cells[row]);
    return k;
}

const Column& timestamp_column(const Table& t, std::string_view name) {
    const Column& c = t.column(name);
    if (c.type != ColumnType::Timestamp)
        throw Error(ErrorCode::NoTimestampColumn, fmt::format("column '{}' of '{}' is not a timestamp", name, t.name()));
    return c;
}

void refresh_type(Column& c) {
    if (c.type != ColumnType::Integer) return;
    if (std::any_of(c.cells.begin(), c.cells.end(), [](const Cell& x) { return x.kind() == CellKind::Number; }))
        c.type = ColumnType::Number;
}

const profiler::SemanticProfile* profile_of(const profiler::TableProfiles* profiles, std::string_view column) {
    return profiles ? profiles->find(column) : nullptr;
}

bool numeric_type(ColumnType t) { return t == ColumnType::Integer || t == ColumnType::Number; }

void check_impute_allowed(const profiler::TableProfiles* profiles, const Column& col, const ImputeFn& fn) {
    if (fn.kind == ImputeKind::Interpolate && !numeric_type(col.type))
        throw Error(ErrorCode::MethodNotAllowed, fmt::format("cannot interpolate non-numeric column '{}'", col.name));
    if (const auto* p = profile_of(profiles, col.name); p && !p->allows(fn))
        throw Error(ErrorCode::MethodNotAllowed,
                    fmt::format("{} is not an allowed imputation for '{}' ({})", to_string(fn), col.name,
                                unit_name(p->unit)));
}

std::optional<Cell> mode_of(const std::vector<Cell>& values) {
    std::map<Cell, std::size_t, CellLess> counts;
    for (const auto& v : values)
        if (!v.is_null()) ++counts[v];
    std::optional<Cell> best;
    std::size_t best_n = 0;
    for (const auto& [v, n] : counts)
        if (n > best_n) {
            best = v;
            best_n = n;
        }
    return best;
}

// Fills cells[r] for fillable rows of one partition, visited in `order`.
// Sources are the non-fillable, non-null cells. Returns the number filled.
std::size_t fill_partition(std::vector<Cell>& cells, const std::vector<std::size_t>& order,
                           const std::vector<bool>& fillable, const ImputeFn& fn, const std::vector<double>& x) {
    std::size_t filled = 0;
    auto is_source = [&](std::size_t r) { return !fillable[r] && !cells[r].is_null(); };
    switch (fn.kind) {
        case ImputeKind::ForwardFill:
        case ImputeKind::BackwardFill: {
            std::optional<Cell> last;
            auto visit = [&](std::size_t r) {
                if (fillable[r] && cells[r].is_null()) {
                    if (last) {
                        cells[r] = *last;
                        ++filled;
                    }
                } else if (!cells[r].is_null()) {
                    last = cells[r];
                }
            };
            if (fn.kind == ImputeKind::ForwardFill)
                std::for_each(order.begin(), order.end(), visit);
            else
                std::for_each(order.rbegin(), order.rend(), visit);
            break;
        }
        case ImputeKind::Interpolate: {
            auto numeric_source = [&](std::size_t r) { return is_source(r) && cells[r].is_numeric(); };
            std::vector<std::optional<std::size_t>> next(order.size());
            std::optional<std::size_t> ahead;
            for (std::size_t i = order.size(); i-- > 0;) {
                next[i] = ahead;
                if (numeric_source(order[i])) ahead = order[i];
            }
            std::optional<std::size_t> behind;
            for (std::size_t i = 0; i < order.size(); ++i) {
                const std::size_t r = order[i];
                if (numeric_source(r)) behind = r;
                if (!(fillable[r] && cells[r].is_null()) || !behind || !next[i]) continue;
                const std::size_t a = *behind, b = *next[i];
                const double ya = *cells[a].as_double(), yb = *cells[b].as_double();
                const double span = x[b] - x[a];
                cells[r] = Cell::number(span == 0 ? ya : ya + (yb - ya) * (x[r] - x[a]) / span);
                ++filled;
            }
            break;
        }
        case ImputeKind::Mode: {
            std::vector<Cell> values;
            for (auto r : order)
                if (is_source(r)) values.push_back(cells[r]);
            const auto m = mode_of(values);
            if (!m) break;
            for (auto r : order)
                if (fillable[r] && cells[r].is_null()) {
                    cells[r] = *m;
                    ++filled;
                }
            break;
        }
        case ImputeKind::Constant:
            for (auto r : order)
                if (fillable[r] && cells[r].is_null() && !fn.constant.is_null()) {
                    cells[r] = fn.constant;
                    ++filled;
                }
            break;
    }
    return filled;
}

// Time coordinate for interpolation: the timestamp, else the row position.
std::vector<double> time_axis(const Table& t, const Column* time) {
    std::vector<double> x(t.row_count());
    for (std::size_t r = 0; r < x.size(); ++r) {
        if (time && time->cells[r].kind() == CellKind::Timestamp)
            x[r] = static_cast<double>(time->cells[r].as_timestamp().ns);
        else
            x[r] = static_cast<double>(r) * 1e9;
    }
    return x;
}

std::map<Key, std::vector<std::size_t>, KeyLess> partitions(const std::vector<Column>& cols, std::size_t rows,
                                                           const std::vector<std::size_t>& group_idx) {
    std::map<Key, std::vector<std::size_t>, KeyLess> out;
    for (std::size_t r = 0; r < rows; ++r) out[key_of(cols, r, group_idx)].push_back(r);
    return out;
}

Cell aggregate(AggFn fn, const std::vector<Cell>& cells) {
    if (fn == AggFn::Mode) {
        auto m = mode_of(cells);
        return m ? *m : Cell::null();
    }
    std::vector<double> v;
    bool all_integer = true;
    for (const auto& c : cells) {
        if (!c.is_numeric()) continue;
        v.push_back(*c.as_double());
        if (c.kind() != CellKind::Integer) all_integer = false;
    }
    if (v.empty()) return Cell::null();
    switch (fn) {
        case AggFn::Mean: return Cell::number(std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()));
        case AggFn::Sum:
            if (all_integer) {
                std::int64_t s = 0;
                for (const auto& c : cells)
                    if (c.kind() == CellKind::Integer) s += c.as_integer();
                return Cell::integer(s);
            }
            return Cell::number(std::accumulate(v.begin(), v.end(), 0.0));
        case AggFn::Median: {
            std::sort(v.begin(), v.end());
            const std::size_t n = v.size();
            return Cell::number(n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0);
        }
        case AggFn::LogMean: return Cell::number(log_mean(v));
        case AggFn::Mode: break;
    }
    return Cell::null();
}

}  // namespace

std::string_view to_string(RowMarker m) {
    switch (m) {
        case RowMarker::Unchanged: return "unchanged";
        case RowMarker::Inserted: return "inserted";
        case RowMarker::Modified: return "modified";
        case RowMarker::Deleted: return "deleted";
    }
    return "unchanged";
}

double log_mean(const std::vector<double>& values) {
    if (values.empty()) throw Error(ErrorCode::EmptyInput, "log_mean of no values");
    const double m = *std::max_element(values.begin(), values.end());
    double s = 0;
    for (double v : values) s += std::pow(10.0, (v - m) / 10.0);
    return m + 10.0 * std::log10(s / static_cast<double>(values.size()));
}

double round_decimal(double v, int decimals) {
    if (!std::isfinite(v) || decimals < 0) return v;
    char buf[512];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    if (ec != std::errc{}) return v;
    std::string s(buf, end);
    const bool negative = !s.empty() && s[0] == '-';
    if (negative) s.erase(0, 1);
    const auto dot = s.find('.');
    if (dot == std::string::npos || s.size() - dot - 1 <= static_cast<std::size_t>(decimals)) return v;

    const bool up = s[dot + 1 + static_cast<std::size_t>(decimals)] >= '5';
    std::string digits = s.substr(0, dot) + s.substr(dot + 1, static_cast<std::size_t>(decimals));
    if (up) {
        std::size_t i = digits.size();
        while (i > 0) {
            --i;
            if (digits[i] == '9') {
                digits[i] = '0';
            } else {
                ++digits[i];
                break;
            }
            if (i == 0) digits.insert(digits.begin(), '1');
        }
    }
    const std::size_t int_len = digits.size() - static_cast<std::size_t>(decimals);
    std::string out = (negative ? "-" : "") + digits.substr(0, int_len);
    if (decimals > 0) out += "." + digits.substr(int_len);
    double r = 0;
    std::from_chars(out.data(), out.data() + out.size(), r);
    return r;
}

bool cast_supported(const Unit& from, const Unit& to) {
    auto pair = [&](UnitKind a, UnitKind b) { return from.kind == a && to.kind == b; };
    return pair(UnitKind::EARFCN, UnitKind::MHz) || pair(UnitKind::MHz, UnitKind::EARFCN) ||
           pair(UnitKind::Hz, UnitKind::MHz) || pair(UnitKind::MHz, UnitKind::Hz) ||
           pair(UnitKind::Hexadecimal, UnitKind::Decimal) || pair(UnitKind::Decimal, UnitKind::Hexadecimal) ||
           pair(UnitKind::Seconds, UnitKind::Milliseconds) || pair(UnitKind::Milliseconds, UnitKind::Seconds);
}

Cell cast_value(const Cell& v, const Unit& from, const Unit& to, const BandTable& bands, std::optional<int> band_hint) {
    if (!cast_supported(from, to))
        throw Error(ErrorCode::UnsupportedCast, fmt::format("no cast from {} to {}", unit_name(from), unit_name(to)));
    if (v.is_null()) return v;
    auto unparseable = [&] {
        return Error(ErrorCode::UnparseableValue,
                     fmt::format("'{}' is not a valid {} value", v.to_string(), unit_name(from)));
    };
    auto integral = [&]() -> std::int64_t {
        const auto d = v.as_double();
        if (!d || std::floor(*d) != *d) throw unparseable();
        return v.kind() == CellKind::Integer ? v.as_integer() : static_cast<std::int64_t>(*d);
    };
    auto number = [&]() -> double {
        const auto d = v.as_double();
        if (!d) throw unparseable();
        return *d;
    };

    switch (from.kind) {
        case UnitKind::EARFCN: return Cell::number(bands.earfcn_to_mhz(integral()));
        case UnitKind::MHz:
            if (to.kind == UnitKind::EARFCN) return Cell::integer(bands.mhz_to_earfcn(number(), band_hint));
            {
                const double hz = number() * 1e6;
                const double r = std::round(hz);
                if (std::abs(hz - r) < 1e-6 && std::abs(r) < 9e15) return Cell::integer(static_cast<std::int64_t>(r));
                return Cell::number(hz);
            }
        case UnitKind::Hz: return Cell::number(number() / 1e6);
        case UnitKind::Hexadecimal: {
            if (v.kind() != CellKind::Text) throw unparseable();
            std::string_view s = v.as_text();
            if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
            std::int64_t out = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 16);
            if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) throw unparseable();
            return Cell::integer(out);
        }
        case UnitKind::Decimal: {
            const std::int64_t n = integral();
            if (n < 0) throw unparseable();
            return Cell::text(fmt::format("0x{:x}", n));
        }
        case UnitKind::Seconds:
            if (v.kind() == CellKind::Integer) return Cell::integer(v.as_integer() * 1000);
            return Cell::number(number() * 1000.0);
        case UnitKind::Milliseconds:
            if (v.kind() == CellKind::Integer && v.as_integer() % 1000 == 0) return Cell::integer(v.as_integer() / 1000);
            return Cell::number(number() / 1000.0);
        default: break;
    }
    throw Error(ErrorCode::UnsupportedCast, fmt::format("no cast from {} to {}", unit_name(from), unit_name(to)));
}

ExecResult exec_cast(const Cast& op, const Table& t, const BandTable& bands) {
    if (!cast_supported(op.from, op.to))
        throw Error(ErrorCode::UnsupportedCast,
                    fmt::format("no cast from {} to {}", unit_name(op.from), unit_name(op.to)));
    const std::size_t ci = t.column_index(op.column);
    Column col = t.columns()[ci];
    ExecResult r;
    r.effect.rows_before = t.row_count();
    r.markers.assign(t.row_count(), RowMarker::Unchanged);
    bool any_text = false, any_number = false;
    for (std::size_t row = 0; row < col.cells.size(); ++row) {
        Cell out;
        try {
            out = cast_value(col.cells[row], op.from, op.to, bands, op.band_hint);
        } catch (const Error& e) {
            throw Error(e.code(), fmt::format("{} (column '{}', row {})", e.what(), op.column, row + 1), row + 1);
        }
        if (out.kind() == CellKind::Text) any_text = true;
        if (out.kind() == CellKind::Number) any_number = true;
        if (!(out == col.cells[row])) {
            ++r.effect.rows_modified;
            ++r.effect.cells_modified;
            r.markers[row] = RowMarker::Modified;
        }
        col.cells[row] = std::move(out);
    }
    col.type = any_text ? ColumnType::Text : any_number ? ColumnType::Number : ColumnType::Integer;
    col.declared_unit = op.to;
    r.table = t.with_column(ci, std::move(col));
    return r;
}

ExecResult exec_round(const Round& op, const Table& t) {
    const std::size_t ci = t.column_index(op.column);
    Column col = t.columns()[ci];
    if (op.granularity.has_value() == op.decimals.has_value())
        throw Error(ErrorCode::InvalidOp, "round needs exactly one of granularity or decimals");
    if (col.type == ColumnType::Timestamp && !op.granularity)
        throw Error(ErrorCode::GranularityMismatch, fmt::format("timestamp column '{}' needs a duration", op.column));
    if (numeric_type(col.type) && !op.decimals)
        throw Error(ErrorCode::GranularityMismatch, fmt::format("numeric column '{}' needs decimal places", op.column));
    if (col.type == ColumnType::Text)
        throw Error(ErrorCode::GranularityMismatch, fmt::format("cannot round text column '{}'", op.column));
    if (op.decimals && *op.decimals < 0) throw Error(ErrorCode::InvalidOp, "decimal places must be non-negative");

    ExecResult r;
    r.effect.rows_before = t.row_count();
    r.markers.assign(t.row_count(), RowMarker::Unchanged);
    for (std::size_t row = 0; row < col.cells.size(); ++row) {
        Cell& c = col.cells[row];
        Cell out = c;
        if (op.granularity && c.kind() == CellKind::Timestamp)
            out = Cell::timestamp(floor_to(c.as_timestamp(), *op.granularity));
        else if (op.decimals && c.kind() == CellKind::Number)
            out = Cell::number(round_decimal(c.as_number(), *op.decimals));
        if (!(out == c)) {
            c = std::move(out);
            ++r.effect.rows_modified;
            ++r.effect.cells_modified;
            r.markers[row] = RowMarker::Modified;
        }
    }
    r.table = t.with_column(ci, std::move(col));
    return r;
}

ExecResult exec_impute(const Impute& op, const Table& t, const profiler::TableProfiles* profiles) {
    const std::size_t ci = t.column_index(op.column);
    const auto group_idx = indices_of(t, op.group_by);
    Column col = t.columns()[ci];
    check_impute_allowed(profiles, col, op.method);

    const Column* time = nullptr;
    if (profiles && profiles->time_index()) {
        if (auto i = t.find_column(profiles->time_index()->column)) time = &t.columns()[*i];
    } else {
        for (const auto& c : t.columns())
            if (c.type == ColumnType::Timestamp) {
                time = &c;
                break;
            }
    }
    const auto x = time_axis(t, time);

    std::vector<bool> fillable(t.row_count());
    std::size_t nulls = 0;
    for (std::size_t row = 0; row < fillable.size(); ++row) {
        fillable[row] = col.cells[row].is_null();
        nulls += fillable[row];
    }
    ExecResult r;
    r.effect.rows_before = t.row_count();
    r.markers.assign(t.row_count(), RowMarker::Unchanged);
    for (const auto& [key, rows] : partitions(t.columns(), t.row_count(), group_idx))
        r.effect.cells_modified += fill_partition(col.cells, rows, fillable, op.method, x);
    for (std::size_t row = 0; row < fillable.size(); ++row)
        if (fillable[row] && !col.cells[row].is_null()) r.markers[row] = RowMarker::Modified;
    r.effect.rows_modified = r.effect.cells_modified;
    r.effect.residual_nulls = nulls - r.effect.cells_modified;
    refresh_type(col);
    r.table = t.with_column(ci, std::move(col));
    return r;
}

ExecResult exec_downsample(const Downsample& op, const Table& t, const profiler::TableProfiles* profiles) {
    const std::size_t ti = t.column_index(op.time_column);
    timestamp_column(t, op.time_column);
    const auto group_idx = indices_of(t, op.group_by);
    for (auto g : group_idx)
        if (g == ti) throw Error(ErrorCode::InvalidOp, "the time column cannot be a group-by column");

    std::vector<std::optional<AggFn>> fns(t.column_count());
    for (const auto& [name, fn] : op.agg) {
        const std::size_t i = t.column_index(name);
        if (i == ti || std::find(group_idx.begin(), group_idx.end(), i) != group_idx.end())
            throw Error(ErrorCode::InvalidOp, fmt::format("'{}' is a key column and cannot be aggregated", name));
        if (const auto* p = profile_of(profiles, name); p && fn == AggFn::LogMean && p->scale != Scale::Logarithmic)
            throw Error(ErrorCode::LogMeanOnLinear, fmt::format("'{}' is on a linear scale ({})", name, unit_name(p->unit)));
        if (const auto* p = profile_of(profiles, name); p && !p->allows(fn))
            throw Error(ErrorCode::MethodNotAllowed,
                        fmt::format("{} is not an allowed aggregation for '{}' ({})", to_string(fn), name, unit_name(p->unit)));
        fns[i] = fn;
    }
    for (std::size_t i = 0; i < t.column_count(); ++i) {
        if (i == ti || std::find(group_idx.begin(), group_idx.end(), i) != group_idx.end()) continue;
        if (!fns[i])
            throw Error(ErrorCode::MissingAggFn,
                        fmt::format("no aggregation given for column '{}'", t.columns()[i].name));
    }

    const auto& cols = t.columns();
    const std::int64_t d = op.delta.ns();
    std::map<Key, std::size_t, KeyLess> key_ids;
    std::map<std::pair<std::int64_t, std::size_t>, std::vector<std::size_t>> groups;
    std::vector<std::size_t> untimed;
    for (std::size_t row = 0; row < t.row_count(); ++row) {
        const Cell& tc = cols[ti].cells[row];
        if (tc.kind() != CellKind::Timestamp) {
            untimed.push_back(row);
            continue;
        }
        Key k = key_of(cols, row, group_idx);
        const std::size_t id = key_ids.emplace(std::move(k), key_ids.size()).first->second;
        groups[{floor_to(tc.as_timestamp().ns, d), id}].push_back(row);
    }

    std::vector<Column> out(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
        out[i].name = cols[i].name;
        out[i].type = cols[i].type;
        out[i].declared_unit = cols[i].declared_unit;
    }
    ExecResult r;
    r.effect.rows_before = t.row_count();
    for (const auto& [bk, rows] : groups) {
        const std::size_t first = rows.front();
        bool changed = false;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            Cell v;
            if (i == ti) {
                v = Cell::timestamp(Timestamp{bk.first});
            } else if (!fns[i] || rows.size() == 1) {
                v = cols[i].cells[first];
            } else {
                std::vector<Cell> in;
                for (auto row : rows) in.push_back(cols[i].cells[row]);
                v = aggregate(*fns[i], in);
            }
            if (!(v == cols[i].cells[first])) {
                changed = true;
                ++r.effect.cells_modified;
            }
            out[i].cells.push_back(std::move(v));
        }
        if (rows.size() > 1) {
            r.markers.push_back(RowMarker::Modified);
            r.deleted_rows.insert(r.deleted_rows.end(), rows.begin() + 1, rows.end());
        } else if (changed) {
            r.markers.push_back(RowMarker::Modified);
            ++r.effect.rows_modified;
        } else {
            r.markers.push_back(RowMarker::Unchanged);
        }
    }
    for (auto row : untimed) {
        for (std::size_t i = 0; i < cols.size(); ++i) out[i].cells.push_back(cols[i].cells[row]);
        r.markers.push_back(RowMarker::Unchanged);
    }
    for (auto& c : out) refresh_type(c);
    std::sort(r.deleted_rows.begin(), r.deleted_rows.end());
    r.effect.rows_deleted = r.deleted_rows.size();
    r.table = Table(t.name(), std::move(out));
    return r;
}

ExecResult exec_upsample(const Upsample& op, const Table& t, const profiler::TableProfiles* profiles) {
    const std::size_t ti = t.column_index(op.time_column);
    timestamp_column(t, op.time_column);
    const auto group_idx = indices_of(t, op.group_by);
    std::vector<std::pair<std::size_t, ImputeFn>> fills;
    for (const auto& [name, fn] : op.fill) {
        const std::size_t i = t.column_index(name);
        if (i == ti || std::find(group_idx.begin(), group_idx.end(), i) != group_idx.end())
            throw Error(ErrorCode::InvalidOp, fmt::format("'{}' is a key column and cannot be filled", name));
        check_impute_allowed(profiles, t.columns()[i], fn);
        fills.emplace_back(i, fn);
    }

    const auto& cols = t.columns();
    const std::int64_t d = op.delta.ns();
    std::optional<std::int64_t> lo, hi;
    std::map<Key, std::size_t, KeyLess> key_ids;
    std::vector<Key> keys;
    std::vector<std::vector<std::int64_t>> present;  // per key, sorted buckets
    for (std::size_t row = 0; row < t.row_count(); ++row) {
        const Cell& tc = cols[ti].cells[row];
        if (tc.kind() != CellKind::Timestamp) continue;
        const std::int64_t b = floor_to(tc.as_timestamp().ns, d);
        lo = lo ? std::min(*lo, b) : b;
        hi = hi ? std::max(*hi, b) : b;
        Key k = key_of(cols, row, group_idx);
        auto [it, fresh] = key_ids.emplace(k, keys.size());
        if (fresh) {
            keys.push_back(std::move(k));
            present.emplace_back();
        }
        present[it->second].push_back(b);
    }

    // Existing rows first, then inserted rows; a stable sort by time interleaves them.
    std::vector<Column> out = cols;
    std::size_t inserted = 0;
    if (lo) {
        std::vector<std::pair<std::int64_t, std::size_t>> missing;  // (bucket, key id)
        for (std::size_t k = 0; k < keys.size(); ++k) {
            auto& p = present[k];
            std::sort(p.begin(), p.end());
            p.erase(std::unique(p.begin(), p.end()), p.end());
            std::size_t j = 0;
            for (std::int64_t b = *lo; b <= *hi; b += d) {
                while (j < p.size() && p[j] < b) ++j;
                if (j < p.size() && p[j] == b) continue;
                missing.emplace_back(b, k);
            }
        }
        std::sort(missing.begin(), missing.end());
        for (const auto& [b, k] : missing) {
            for (std::size_t i = 0; i < out.size(); ++i) {
                Cell v;
                if (i == ti) v = Cell::timestamp(Timestamp{b});
                for (std::size_t g = 0; g < group_idx.size(); ++g)
                    if (group_idx[g] == i) v = keys[k][g];
                out[i].cells.push_back(std::move(v));
            }
            ++inserted;
        }
    }

    const std::size_t n = t.row_count() + inserted;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Cell& x = out[ti].cells[a];
        const Cell& y = out[ti].cells[b];
        const bool xn = x.kind() != CellKind::Timestamp, yn = y.kind() != CellKind::Timestamp;
        if (xn || yn) return !xn && yn;
        return x.as_timestamp() < y.as_timestamp();
    });
    Table merged = Table(t.name(), std::move(out)).select_rows(order);

    std::vector<bool> is_new(n);
    for (std::size_t i = 0; i < n; ++i) is_new[i] = order[i] >= t.row_count();

    ExecResult r;
    r.effect.rows_before = t.row_count();
    r.effect.rows_inserted = inserted;
    std::vector<Column> filled = merged.columns();
    const auto x = time_axis(merged, &merged.columns()[ti]);
    const auto parts = partitions(merged.columns(), n, group_idx);
    for (const auto& [ci, fn] : fills) {
        std::vector<bool> fillable(n);
        for (std::size_t i = 0; i < n; ++i) fillable[i] = is_new[i];
        std::size_t count = 0;
        for (const auto& [key, rows] : parts) count += fill_partition(filled[ci].cells, rows, fillable, fn, x);
        r.effect.cells_modified += count;
        r.effect.residual_nulls += inserted - count;
        refresh_type(filled[ci]);
    }
    for (std::size_t i = 0; i < n; ++i) r.markers.push_back(is_new[i] ? RowMarker::Inserted : RowMarker::Unchanged);
    r.table = Table(t.name(), std::move(filled));
    return r;
}

ExecResult exec_drop_row(const DropRow& op, const Table& t) {
    const Column& col = t.column(op.column);
    std::vector<std::size_t> keep;
    ExecResult r;
    r.effect.rows_before = t.row_count();
    for (std::size_t row = 0; row < t.row_count(); ++row) {
        const Cell& c = col.cells[row];
        bool drop = false;
        switch (op.predicate) {
            case DropRow::Predicate::NullIn: drop = c.is_null(); break;
            case DropRow::Predicate::NotNumericIn: drop = !c.is_null() && !c.is_numeric(); break;
            case DropRow::Predicate::OutsideRange:
                drop = c.is_numeric() && (*c.as_double() < op.lo || *c.as_double() > op.hi);
                break;
        }
        if (drop)
            r.deleted_rows.push_back(row);
        else
            keep.push_back(row);
    }
    r.effect.rows_deleted = r.deleted_rows.size();
    r.markers.assign(keep.size(), RowMarker::Unchanged);
    r.table = t.select_rows(keep);
    return r;
}

ExecResult apply(const WranglingOp& op, const Table& t, const profiler::TableProfiles* profiles,
                 const BandTable& bands) {
    if (op_table(op) != t.name())
        throw Error(ErrorCode::InvalidOp, fmt::format("operation targets '{}', not '{}'", op_table(op), t.name()));
    struct Visitor {
        const Table& t;
        const profiler::TableProfiles* profiles;
        const BandTable& bands;
        ExecResult operator()(const Cast& o) const { return exec_cast(o, t, bands); }
        ExecResult operator()(const Round& o) const { return exec_round(o, t); }
        ExecResult operator()(const Impute& o) const { return exec_impute(o, t, profiles); }
        ExecResult operator()(const Downsample& o) const { return exec_downsample(o, t, profiles); }
        ExecResult operator()(const Upsample& o) const { return exec_upsample(o, t, profiles); }
        ExecResult operator()(const DropRow& o) const { return exec_drop_row(o, t); }
    };
    return std::visit(Visitor{t, profiles, bands}, op);
}

}  // namespace rfw::dsl
