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
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "rfw/core/rational.hpp"
#include "rfw/core/semantics.hpp"
#include "rfw/core/timestamp.hpp"

namespace rfw::dsl {

struct Cast {
    std::string table;
    std::string column;
    Unit from;
    Unit to;
    std::optional<int> band_hint;

    bool operator==(const Cast&) const = default;
};

/// Exactly one of granularity (timestamp columns) or decimals (numbers).
struct Round {
    std::string table;
    std::string column;
    std::optional<Duration> granularity;
    std::optional<int> decimals;

    bool operator==(const Round&) const = default;
};

struct Impute {
    std::string table;
    std::string column;
    ImputeFn method;
    std::vector<std::string> group_by;

    bool operator==(const Impute&) const = default;
};

struct Downsample {
    std::string table;
    std::string time_column;
    Duration delta;
    std::vector<std::string> group_by;
    std::vector<std::pair<std::string, AggFn>> agg;

    bool operator==(const Downsample&) const = default;
};

struct Upsample {
    std::string table;
    std::string time_column;
    Duration delta;
    std::vector<std::string> group_by;
    std::vector<std::pair<std::string, ImputeFn>> fill;

    bool operator==(const Upsample&) const = default;
};

struct DropRow {
    enum class Predicate { NullIn, NotNumericIn, OutsideRange };

    std::string table;
    Predicate predicate = Predicate::NullIn;
    std::string column;
    double lo = 0;  // OutsideRange only
    double hi = 0;

    bool operator==(const DropRow&) const = default;
};

/// Alternative order doubles as the tie-break order of suggestions.
using WranglingOp = std::variant<Cast, Round, Impute, Downsample, Upsample, DropRow>;

const std::string& op_table(const WranglingOp& op);
/// "cast", "round", "impute", "downsample", "upsample", "droprow"
std::string_view op_kind(const WranglingOp& op);
/// Column the op is aimed at (time column for resampling and rounding).
std::string op_target(const WranglingOp& op);

struct SideEffect {
    std::size_t rows_before = 0;
    std::size_t rows_modified = 0;
    std::size_t rows_inserted = 0;
    std::size_t rows_deleted = 0;
    std::size_t cells_modified = 0;
    /// Nulls the operator was asked to fill but could not.
    std::size_t residual_nulls = 0;

    std::size_t rows_after() const { return rows_before + rows_inserted - rows_deleted; }
    /// (modified + inserted + deleted) / rows_before; zero for empty tables.
    Rational row_fraction() const;
    SideEffect& operator+=(const SideEffect& o);
    bool operator==(const SideEffect&) const = default;
};

nlohmann::json to_json(const SideEffect& e);
nlohmann::json to_json(const WranglingOp& op);

}  // namespace rfw::dsl
