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
#include <vector>

#include "rfw/core/table.hpp"
#include "rfw/dsl/bands.hpp"
#include "rfw/dsl/ops.hpp"
#include "rfw/profiler/profile.hpp"

namespace rfw::dsl {

enum class RowMarker { Unchanged, Inserted, Modified, Deleted };

std::string_view to_string(RowMarker m);

struct ExecResult {
    Table table;
    SideEffect effect;
    /// One marker per output row (never Deleted).
    std::vector<RowMarker> markers;
    /// Input row indices that did not survive.
    std::vector<std::size_t> deleted_rows;
};

/// Runs one operator. With profiles, semantic guards apply (MethodNotAllowed,
/// LogMeanOnLinear); without them only structural checks run. The input table
/// is never modified.
ExecResult apply(const WranglingOp& op, const Table& t, const profiler::TableProfiles* profiles = nullptr,
                 const BandTable& bands = BandTable::shipped());

ExecResult exec_cast(const Cast& op, const Table& t, const BandTable& bands);
ExecResult exec_round(const Round& op, const Table& t);
ExecResult exec_impute(const Impute& op, const Table& t, const profiler::TableProfiles* profiles);
ExecResult exec_downsample(const Downsample& op, const Table& t, const profiler::TableProfiles* profiles);
ExecResult exec_upsample(const Upsample& op, const Table& t, const profiler::TableProfiles* profiles);
ExecResult exec_drop_row(const DropRow& op, const Table& t);

/// 10 log10(mean(10^(v/10))). Throws EmptyInput.
double log_mean(const std::vector<double>& values);

/// Half away from zero on the shortest decimal spelling of v.
double round_decimal(double v, int decimals);

/// Converts one cell. Nulls pass through. Throws UnsupportedCast, UnparseableValue,
/// UnknownBand, AmbiguousBand.
Cell cast_value(const Cell& v, const Unit& from, const Unit& to, const BandTable& bands,
                std::optional<int> band_hint = std::nullopt);
bool cast_supported(const Unit& from, const Unit& to);

}  // namespace rfw::dsl
