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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rfw/core/table.hpp"

namespace rfw::session {

enum class JoinKind { Inner, Left };
std::string_view to_string(JoinKind k);
/// "inner" | "left"; throws InvalidArgument.
JoinKind join_kind_from_string(std::string_view s);

struct JoinResult {
    Table table;
    std::size_t left_matched = 0;   // left rows with at least one partner
    std::size_t right_matched = 0;  // right rows with at least one partner
    std::size_t unmatched_left = 0;
    std::size_t unmatched_right = 0;
    /// Matched share of the smaller input.
    double match_fraction = 0;
    bool keys_not_aligned = false;
};

/// Equi-join on exactly equal keys (numbers compare by value, nulls never
/// match). Output: left columns, then right non-key columns; clashing right
/// names get a "<right table>." prefix. Row order follows the left table.
/// keys_not_aligned is set when match_fraction < floor.
/// Throws UnknownColumn, InvalidArgument (no keys).
JoinResult join_tables(const Table& left, const Table& right, const std::vector<std::pair<std::string, std::string>>& on,
                       JoinKind kind, std::string name, double floor = 0.5);

}  // namespace rfw::session
