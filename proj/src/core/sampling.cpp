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

#include "rfw/core/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "rfw/core/error.hpp"

namespace rfw {
namespace {

const Column& time_column_of(const Table& t, std::string_view name) {
    auto idx = t.find_column(name);
    if (!idx || t.columns()[*idx].type != ColumnType::Timestamp)
        throw Error(ErrorCode::NoTimestampColumn,
                    fmt::format("table '{}' has no timestamp column '{}'", t.name(), name));
    return t.columns()[*idx];
}

bool ts_less(const Cell& a, const Cell& b) {
    const bool an = a.kind() != CellKind::Timestamp, bn = b.kind() != CellKind::Timestamp;
    if (an || bn) return !an && bn;
    return a.as_timestamp() < b.as_timestamp();
}

}  // namespace

bool is_sorted_by_time(const Table& t, std::string_view time_column) {
    const Column& col = time_column_of(t, time_column);
    return std::is_sorted(col.cells.begin(), col.cells.end(), ts_less);
}

Table sort_by_time(const Table& t, std::string_view time_column) {
    const Column& col = time_column_of(t, time_column);
    std::vector<std::size_t> order(t.row_count());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ts_less(col.cells[a], col.cells[b]); });
    return t.select_rows(order);
}

std::vector<Table> sample_window_slices(const Table& input, std::string_view time_column, Duration delta,
                                        const SampleSpec& spec) {
    if (spec.window_count == 0 || spec.window_length == 0)
        throw Error(ErrorCode::InvalidArgument, "sample spec needs positive window_count and window_length");
    Table t = is_sorted_by_time(input, time_column) ? input : sort_by_time(input, time_column);
    const Column& col = t.column(time_column);

    std::vector<std::int64_t> times;
    for (const auto& c : col.cells)
        if (c.kind() == CellKind::Timestamp) times.push_back(c.as_timestamp().ns);

    const long double wanted = static_cast<long double>(spec.window_count) * spec.window_length;
    if (times.empty() || wanted >= static_cast<long double>(t.row_count())) return {t};

    const std::int64_t d = delta.ns();
    const std::int64_t width = static_cast<std::int64_t>(spec.window_length) * d;
    const std::int64_t first = floor_to(times.front(), d);
    const std::int64_t last_end = floor_to(times.back(), d) + d;
    const std::int64_t latest_start = std::max(first, last_end - width);

    std::vector<std::int64_t> starts;
    starts.push_back(first);
    if (spec.window_count >= 2) starts.push_back(latest_start);
    if (spec.window_count >= 3) {
        const std::int64_t mid = first + (last_end - first) / 2 - width / 2;
        starts.push_back(std::clamp(floor_to(mid, d), first, latest_start));
    }
    std::mt19937_64 rng(spec.seed);
    const auto positions = static_cast<std::uint64_t>((latest_start - first) / d + 1);
    for (std::size_t i = 3; i < spec.window_count; ++i)
        starts.push_back(first + static_cast<std::int64_t>(rng() % positions) * d);
    std::sort(starts.begin(), starts.end());

    // Merge overlapping windows into disjoint half-open intervals.
    std::vector<std::pair<std::int64_t, std::int64_t>> spans;
    for (std::int64_t s : starts) {
        if (!spans.empty() && s <= spans.back().second) spans.back().second = std::max(spans.back().second, s + width);
        else spans.emplace_back(s, s + width);
    }

    std::vector<Table> slices;
    for (const auto& [lo, hi] : spans) {
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < t.row_count(); ++r) {
            const Cell& c = col.cells[r];
            if (c.kind() != CellKind::Timestamp) continue;
            const std::int64_t ns = c.as_timestamp().ns;
            if (ns >= lo && ns < hi) rows.push_back(r);
        }
        if (!rows.empty()) slices.push_back(t.select_rows(rows));
    }
    return slices;
}

Table sample_windows(const Table& t, std::string_view time_column, Duration delta, const SampleSpec& spec) {
    auto slices = sample_window_slices(t, time_column, delta, spec);
    return concat_rows(slices, t.name());
}

}  // namespace rfw
