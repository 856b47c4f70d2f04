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
#include <cstdint>
#include <string_view>
#include <vector>

#include "rfw/core/table.hpp"
#include "rfw/core/timestamp.hpp"

namespace rfw {

struct SampleSpec {
    std::size_t window_count = 3;
    std::size_t window_length = 50;  // in delta periods
    std::uint64_t seed = 0;

    bool operator==(const SampleSpec&) const = default;
};

/// Tables at or below this size are scored on their full contents.
inline constexpr std::size_t k_sampling_threshold_rows = 5000;

/// True when `time_column` is non-decreasing (nulls last).
bool is_sorted_by_time(const Table& t, std::string_view time_column);

/// Stable ascending sort; null timestamps go last. Throws NoTimestampColumn.
Table sort_by_time(const Table& t, std::string_view time_column);

/// Rows of each selected window, as separate tables in time order. Overlapping
/// windows are merged; a window never splits a delta bucket. When the spec asks
/// for at least as many rows as the table has, a single slice holds the whole
/// (sorted) table.
std::vector<Table> sample_window_slices(const Table& t, std::string_view time_column, Duration delta,
                                        const SampleSpec& spec);

/// Union of the window slices.
Table sample_windows(const Table& t, std::string_view time_column, Duration delta, const SampleSpec& spec);

}  // namespace rfw
