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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "rfw/core/table.hpp"
#include "rfw/core/timestamp.hpp"
#include "rfw/profiler/profile.hpp"

namespace rfw::constraints {

/// [delta, grouping...] -> determined...: one non-null value per determined
/// column in every (bucket, grouping key) cell of the table's time grid.
struct TemporalFD {
    std::string id;
    std::string table;
    Duration delta;
    std::string time_column;
    std::vector<std::string> grouping;
    std::vector<std::string> determined;

    bool operator==(const TemporalFD&) const = default;
};

/// Join keys of two tables must be exactly comparable: time keys on the delta
/// grid, or both key columns in the same unit.
struct KeyAlignment {
    enum class Kind { TimeGrid, UnitMatch };

    std::string id;
    Kind kind = Kind::TimeGrid;
    std::string left_table;
    std::string left_column;
    std::string right_table;
    std::string right_column;
    Duration delta;    // TimeGrid
    Unit target_unit;  // UnitMatch

    bool operator==(const KeyAlignment&) const = default;
};

using Constraint = std::variant<TemporalFD, KeyAlignment>;

const std::string& constraint_id(const Constraint& c);
/// Tables whose data the constraint reads.
std::vector<std::string> constraint_tables(const Constraint& c);
/// "[1s, frequency] -> RSRP", "RF.timestamp ~ GPS.timestamp on 1s grid".
std::string describe(const Constraint& c);

struct TimeRange {
    Timestamp start;
    Timestamp end;  // inclusive bucket start

    bool operator==(const TimeRange&) const = default;
};

struct ViolationReport {
    std::string constraint_id;
    std::string table;
    std::size_t total_degree = 0;
    std::size_t duplicates = 0;
    std::size_t missing_buckets = 0;
    std::size_t null_cells = 0;
    std::size_t misaligned_keys = 0;
    /// Row indices, ascending.
    std::vector<std::size_t> flagged_rows;
    std::optional<Timestamp> grid_start;
    std::optional<Timestamp> grid_end;
    /// Distinct grouping keys seen on the grid.
    std::size_t key_count = 0;
    /// Runs of consecutive missing buckets (any grouping key), merged.
    std::vector<TimeRange> missing_ranges;
    /// First and last violating bucket.
    std::optional<TimeRange> violated_span;
};

/// Throws UnsortedTable, UnknownColumn.
ViolationReport violation_degree(const Table& t, const TemporalFD& tfd);

/// Unit a column currently carries: its declared unit, else the profiled one.
using UnitResolver = std::function<Unit(const Table&, std::string_view column)>;
UnitResolver profile_unit_resolver(const profiler::ProfileCatalog& profiles);

/// Misaligned key cells contributed by table `t` (one side of the constraint;
/// the table may be on both sides). Empty report for unrelated tables.
ViolationReport alignment_degree(const Table& t, const KeyAlignment& c, const UnitResolver& units);

/// Dispatches on the constraint kind; TFDs on other tables yield an empty report.
ViolationReport evaluate(const Table& t, const Constraint& c, const UnitResolver& units);

struct JoinProposal {
    enum class Relation { SameUnit, ScaleConvertible, CastConvertible };

    std::string left_table;
    std::string left_column;
    std::string right_table;
    std::string right_column;
    Relation relation = Relation::SameUnit;
    /// from -> to, applied to the right column.
    std::optional<std::pair<Unit, Unit>> required_cast;
    double confidence = 1.0;

    bool operator==(const JoinProposal&) const = default;
};

std::string_view to_string(JoinProposal::Relation r);

/// Cross-table column pairs with identical, scale-related or cast-related units.
/// Columns without a unit are never proposed.
std::vector<JoinProposal> propose_joins(const std::vector<const Table*>& tables,
                                        const profiler::ProfileCatalog& profiles);

/// The constraint a confirmed join needs, if any: TimeGrid for two time
/// columns, UnitMatch for unit-converting pairs.
std::optional<KeyAlignment> alignment_for(const JoinProposal& p, const Table& left, const Table& right,
                                          Duration delta, std::string id);

/// Canonical TFD shape of one table, evaluated at each candidate delta.
struct DeltaProbe {
    const Table* table = nullptr;
    std::string time_column;
    std::vector<std::string> grouping;
    std::vector<std::string> determined;
};

struct DeltaScore {
    Duration delta;
    double score = 0;  // sum over tables of V / (buckets x keys)
};

struct DeltaDetection {
    Duration chosen;
    std::vector<DeltaScore> scores;  // in candidate order
};

std::vector<Duration> default_delta_candidates();

/// Throws AllTablesSingleRow, InvalidArgument (no candidates).
DeltaDetection detect_delta(const std::vector<DeltaProbe>& probes,
                            const std::vector<Duration>& candidates = default_delta_candidates());

/// Throws NoTimeIndex, NoDeterminedColumns.
TemporalFD synthesize_tfd(const Table& t, const profiler::TableProfiles& profiles, Duration delta, std::string id);

nlohmann::json to_json(const TemporalFD& tfd);
/// Throws InvalidArgument on missing fields.
TemporalFD tfd_from_json(const nlohmann::json& j);
nlohmann::json to_json(const KeyAlignment& c);
KeyAlignment alignment_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Constraint& c);
Constraint constraint_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ViolationReport& r);
nlohmann::json to_json(const JoinProposal& p);

}  // namespace rfw::constraints
