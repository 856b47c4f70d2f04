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

#include "rfw/session/join.hpp"

#include <algorithm>
#include <unordered_map>

#include <fmt/format.h>

#include "rfw/core/error.hpp"

namespace rfw::session {

namespace {

// Canonical key text; nullopt for keys containing a null.
std::optional<std::string> key_of(const Table& t, const std::vector<std::size_t>& cols, std::size_t row) {
    std::string key;
    for (std::size_t c : cols) {
        const Cell& v = t.at(row, c);
        switch (v.kind()) {
            case CellKind::Null: return std::nullopt;
            case CellKind::Integer:
            case CellKind::Number: key += "n:" + format_number(*v.as_double()); break;
            case CellKind::Timestamp: key += "t:" + std::to_string(v.as_timestamp().ns); break;
            case CellKind::Text: key += "s:" + v.as_text(); break;
        }
        key += '\x1f';
    }
    return key;
}

}  // namespace

std::string_view to_string(JoinKind k) { return k == JoinKind::Inner ? "inner" : "left"; }

JoinKind join_kind_from_string(std::string_view s) {
    if (s == "inner") return JoinKind::Inner;
    if (s == "left") return JoinKind::Left;
    throw Error(ErrorCode::InvalidArgument, fmt::format("join kind must be 'inner' or 'left', not '{}'", s));
}

JoinResult join_tables(const Table& left, const Table& right, const std::vector<std::pair<std::string, std::string>>& on,
                       JoinKind kind, std::string name, double floor) {
    if (on.empty()) throw Error(ErrorCode::InvalidArgument, "join needs at least one key pair");
    std::vector<std::size_t> lk, rk;
    for (const auto& [l, r] : on) {
        lk.push_back(left.column_index(l));
        rk.push_back(right.column_index(r));
    }

    std::unordered_map<std::string, std::vector<std::size_t>> index;
    for (std::size_t r = 0; r < right.row_count(); ++r)
        if (auto k = key_of(right, rk, r)) index[*k].push_back(r);

    std::vector<std::size_t> right_out;
    std::vector<std::string> names;
    for (const auto& c : left.columns()) names.push_back(c.name);
    std::vector<Column> cols = left.columns();
    for (auto& c : cols) c.cells.clear();
    for (std::size_t c = 0; c < right.column_count(); ++c) {
        if (std::find(rk.begin(), rk.end(), c) != rk.end()) continue;
        Column col = right.columns()[c];
        col.cells.clear();
        if (std::find(names.begin(), names.end(), col.name) != names.end()) col.name = right.name() + "." + col.name;
        names.push_back(col.name);
        cols.push_back(std::move(col));
        right_out.push_back(c);
    }

    JoinResult out;
    std::vector<bool> right_hit(right.row_count(), false);
    const std::size_t nl = left.column_count();
    for (std::size_t r = 0; r < left.row_count(); ++r) {
        const auto k = key_of(left, lk, r);
        const auto it = k ? index.find(*k) : index.end();
        if (it == index.end()) {
            ++out.unmatched_left;
            if (kind == JoinKind::Inner) continue;
            for (std::size_t c = 0; c < nl; ++c) cols[c].cells.push_back(left.at(r, c));
            for (std::size_t i = 0; i < right_out.size(); ++i) cols[nl + i].cells.push_back(Cell::null());
            continue;
        }
        ++out.left_matched;
        for (std::size_t rr : it->second) {
            right_hit[rr] = true;
            for (std::size_t c = 0; c < nl; ++c) cols[c].cells.push_back(left.at(r, c));
            for (std::size_t i = 0; i < right_out.size(); ++i) cols[nl + i].cells.push_back(right.at(rr, right_out[i]));
        }
    }
    out.right_matched = static_cast<std::size_t>(std::count(right_hit.begin(), right_hit.end(), true));
    out.unmatched_right = right.row_count() - out.right_matched;

    const bool left_smaller = left.row_count() <= right.row_count();
    const std::size_t smaller = left_smaller ? left.row_count() : right.row_count();
    const std::size_t hit = left_smaller ? out.left_matched : out.right_matched;
    out.match_fraction = smaller == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(smaller);
    out.keys_not_aligned = out.match_fraction < floor;
    out.table = Table(std::move(name), std::move(cols));
    return out;
}

}  // namespace rfw::session
